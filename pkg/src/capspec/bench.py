"""Backend benchmark: times the dense kernels on both implementations.

Run as `python -m capspec.bench`. For each matrix order a full generalized
solve path (factor, transform, diagonalize) is timed per backend on identical
inputs, and the resulting eigenvalues are cross-checked.
"""

import argparse
import time

import numpy as np

from ._kernels import available_backends


def _problem(order, seed):
    rng = np.random.RandomState(seed)
    m = rng.standard_normal((order, order))
    b = np.ascontiguousarray(m @ m.T + order * np.eye(order))
    g = rng.standard_normal((order, order))
    a = np.ascontiguousarray((g + g.T) / 2.0)
    return a, b


def _solve_path(impl, a, b):
    low, bad = impl.cholesky_lower(b, 0.0)
    if bad != -1:
        raise RuntimeError(f"benchmark matrix lost definiteness at pivot {bad}")
    y = impl.solve_lower(low, a)
    c = impl.solve_lower(low, np.ascontiguousarray(y.T))
    c = np.ascontiguousarray((c + c.T) / 2.0)
    target = 1e-13 * max(float(np.linalg.norm(c)), 1.0)
    diag, _, sweeps = impl.jacobi_eigh(c, target, 64)
    if sweeps < 0:
        raise RuntimeError("diagonalization budget exhausted")
    return np.sort(diag)


def _best_time(impl, a, b, repeats):
    best = float("inf")
    values = None
    for _ in range(repeats):
        start = time.perf_counter()
        values = _solve_path(impl, a, b)
        best = min(best, time.perf_counter() - start)
    return best, values


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="capspec.bench",
        description="compare kernel backends on generalized eigensolves")
    parser.add_argument("--orders", default="8,16,32,64",
                        help="comma-separated matrix orders (default 8,16,32,64)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions, best is kept (default 5)")
    parser.add_argument("--seed", type=int, default=1234)
    args = parser.parse_args(argv)

    orders = [int(s) for s in args.orders.split(",") if s.strip()]
    impls = available_backends()
    names = sorted(impls)
    print("backends:", ", ".join(names))
    header = f"{'order':>6}" + "".join(f"{name + ' [ms]':>14}" for name in names)
    if len(names) > 1:
        header += f"{'speedup':>10}{'max |dv|':>12}"
    print(header)

    for order in orders:
        a, b = _problem(order, args.seed)
        times = {}
        results = {}
        for name in names:
            times[name], results[name] = _best_time(impls[name], a, b,
                                                    args.repeats)
        line = f"{order:>6}" + "".join(f"{1e3 * times[name]:>14.3f}"
                                       for name in names)
        if len(names) > 1:
            ratio = times["python"] / times["cython"]
            gap = float(np.max(np.abs(results["python"] - results["cython"])))
            line += f"{ratio:>10.2f}{gap:>12.2e}"
            scale = max(1.0, float(np.max(np.abs(results["python"]))))
            if gap > 1e-10 * scale:
                print(line)
                print(f"backend disagreement at order {order}: {gap:.3e}")
                return 1
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
