"""Pure-numpy kernel implementations.

Fallback backend; mirrors the compiled extension function-for-function. The
rotation ordering and update formulas match the compiled kernel exactly, only
the inner k-loops are vectorized with numpy.
"""

import math

import numpy as np


def cholesky_lower(b, threshold):
    """Row-by-row Cholesky of symmetric b.

    Returns (L, i) where i == -1 on success; otherwise i is the index of the
    first pivot that fell at or below threshold (L is then partial garbage).
    """
    n = b.shape[0]
    low = np.zeros_like(b)
    for i in range(n):
        row = low[i, :i]
        pivot = b[i, i] - row @ row
        if pivot <= threshold:
            return low, i
        d = math.sqrt(pivot)
        low[i, i] = d
        if i + 1 < n:
            low[i + 1 :, i] = (b[i + 1 :, i] - low[i + 1 :, :i] @ row) / d
    return low, -1


def jacobi_eigh(c, off_target, max_sweeps):
    """Cyclic Jacobi diagonalization of symmetric c.

    Sweeps row-major over the strict upper triangle; convergence is checked
    against the off-diagonal Frobenius norm at the top of each sweep. Returns
    (diag, V, sweeps) with V accumulating the rotations columnwise; sweeps is
    -1 when the budget ran out before the target was met.
    """
    a = np.array(c, dtype=float, copy=True)
    n = a.shape[0]
    vec = np.eye(n)
    if n < 2:
        return a.diagonal().copy(), vec, 0
    # entries below this produce pure-roundoff rotations; skipping them keeps
    # sweeps cheap without stalling progress (see off-norm bound below)
    skip = off_target / (4.0 * n)
    for sweep in range(max_sweeps + 1):
        off = _offdiag_norm(a)
        if off <= off_target:
            return a.diagonal().copy(), vec, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                cs = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * cs
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                newp = cs * colp - sn * colq
                newq = sn * colp + cs * colq
                a[:, p] = newp
                a[p, :] = newp
                a[:, q] = newq
                a[q, :] = newq
                a[p, p] = cs * cs * app - 2.0 * sn * cs * apq + sn * sn * aqq
                a[q, q] = sn * sn * app + 2.0 * sn * cs * apq + cs * cs * aqq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = vec[:, p].copy()
                vq = vec[:, q].copy()
                vec[:, p] = cs * vp - sn * vq
                vec[:, q] = sn * vp + cs * vq
    return a.diagonal().copy(), vec, -1


def solve_lower(low, m):
    """Forward substitution: returns low^{-1} m (m may have many columns)."""
    x = np.array(m, dtype=float, copy=True)
    n = low.shape[0]
    for i in range(n):
        if i:
            x[i] -= low[i, :i] @ x[:i]
        x[i] /= low[i, i]
    return x


def solve_lower_t(low, m):
    """Back substitution with the transpose: returns low^{-T} m."""
    x = np.array(m, dtype=float, copy=True)
    n = low.shape[0]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= low[i + 1 :, i] @ x[i + 1 :]
        x[i] /= low[i, i]
    return x


def _offdiag_norm(a):
    # summed directly over off-diagonal entries: subtracting the diagonal
    # from the total Frobenius norm cancels catastrophically near convergence
    sq = a * a
    np.fill_diagonal(sq, 0.0)
    return math.sqrt(float(np.sum(sq)))
