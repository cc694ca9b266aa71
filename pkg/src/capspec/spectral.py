"""Per-mode Galerkin assembly and the merged cap spectrum.

For a cap of radius theta0 and mode l, trial functions are

    q_j(x) = (x - x0)^p * T_j(s),   j = 0 .. N-1,

with T_j Chebyshev in the mapped variable s and x0 = cos(theta0); the factor
(x - x0)^p encodes all p Dirichlet boundary conditions at once. Writing
m = floor(p/2) and D for the mode-reduced Laplacian, the forms are

    p even:    A[i][j] =  integral (D^m q_i) (D^m q_j) w dx
    p odd:     A[i][j] = -integral (D^m q_i) D(D^m q_j) w dx
    clamped:   B[i][j] =  integral q_i q_j w dx
    buckling:  B[i][j] = -integral q_i (D q_j) w dx

over [x0, 1] with weight w(x) = (1 - x^2)^gamma, gamma = l + (n-2)/2. The
weight splits as (1-x)^gamma * (1+x)^gamma; the first factor is the
Gauss-Jacobi weight on the mapped interval and the smooth second factor is
folded into the integrand. Every assembly is validated by node doubling.

Eigenvalues of one mode come from the generalized symmetric-definite solve;
the spectrum merges modes by value (ties broken by (l, radial_index)) and
expands each by the harmonic multiplicity of its mode.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .errors import (
    ModeCapTooSmall,
    MonotonicityViolation,
    NumericalError,
    QuadratureNotConverged,
    ValidationError,
)
from .linalg import SymMatrix, generalized_sym_eigen
from .quadrature import gauss_jacobi_rule
from .radial import multiplicity, operator_coeffs

QUAD_DOUBLING_REL = 1e-11
ASYMMETRY_WARN = 1e-8
MODE_SAFETY = 1.05
MONOTONE_SLACK = 1e-10
COMPANION_DROP = 4


class Problem(str, enum.Enum):
    CLAMPED = "clamped"
    BUCKLING = "buckling"


@dataclass(frozen=True)
class SolverConfig:
    """Frozen description of one cap eigenproblem and its discretization.

    mode_cap / quad_size of None mean automatic selection: the mode loop
    extends until the last mode's smallest radial value clears the current
    K-th merged value by 5%, and the quadrature base size is
    2 * (max polynomial degree) + 16.
    """

    n: int
    p: int
    theta0: float
    problem: Problem
    basis_size: int = 32
    mode_cap: int | None = None
    quad_size: int | None = None
    requested_count: int = 8

    def __post_init__(self):
        object.__setattr__(self, "problem", Problem(self.problem))
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 2):
            raise ValidationError(f"dimension must be an integer >= 2, got {self.n!r}")
        min_p = 2 if self.problem is Problem.BUCKLING else 1
        if not (isinstance(self.p, (int, np.integer)) and self.p >= min_p):
            raise ValidationError(
                f"order must be an integer >= {min_p} for {self.problem.value}, got {self.p!r}"
            )
        if not (
            isinstance(self.theta0, (int, float)) and 0.0 < float(self.theta0) < math.pi
        ):
            raise ValidationError(f"cap radius must lie in (0, pi), got {self.theta0!r}")
        object.__setattr__(self, "theta0", float(self.theta0))
        if not (isinstance(self.requested_count, (int, np.integer)) and self.requested_count >= 1):
            raise ValidationError(
                f"requested count must be a positive integer, got {self.requested_count!r}"
            )
        if not (
            isinstance(self.basis_size, (int, np.integer))
            and self.basis_size >= self.requested_count
        ):
            raise ValidationError(
                f"basis size must be an integer >= requested count "
                f"({self.requested_count}), got {self.basis_size!r}"
            )
        if self.mode_cap is not None and not (
            isinstance(self.mode_cap, (int, np.integer)) and self.mode_cap >= 0
        ):
            raise ValidationError(f"mode cap must be None or an integer >= 0, got {self.mode_cap!r}")
        if self.quad_size is not None and not (
            isinstance(self.quad_size, (int, np.integer)) and self.quad_size >= 2
        ):
            raise ValidationError(
                f"quadrature size must be None or an integer >= 2, got {self.quad_size!r}"
            )

    @property
    def quad_base(self) -> int:
        """Quadrature node count before the doubling check."""
        if self.quad_size is not None:
            return int(self.quad_size)
        return 2 * (self.p + self.basis_size - 1) + 16


@dataclass(frozen=True)
class ModeResult:
    """Radial eigenvalues of one angular mode, ascending, all positive."""

    l: int
    radial_values: np.ndarray
    multiplicity: int

    def __post_init__(self):
        self.radial_values.flags.writeable = False


@dataclass(frozen=True)
class SpectrumEntry:
    value: float
    l: int
    radial_index: int
    multiplicity: int


@dataclass(frozen=True)
class Spectrum:
    """Merged spectrum: entries ascending, covering requested_count
    eigenvalues after multiplicity expansion."""

    config: SolverConfig
    entries: tuple[SpectrumEntry, ...]
    diagnostics: dict = field(compare=False)

    def expanded_values(self, limit: int | None = None) -> np.ndarray:
        if limit is None:
            limit = self.config.requested_count
        out = []
        for e in self.entries:
            out.extend([e.value] * e.multiplicity)
            if len(out) >= limit:
                break
        return np.array(out[:limit])


def assemble_mode(cfg: SolverConfig, l: int) -> tuple[SymMatrix, SymMatrix]:
    """Stiffness-like and mass-like forms for mode l, doubling-validated.

    Raises QuadratureNotConverged if doubling the node count moves any entry
    by more than 1e-11 relative to the larger matrix's scale; otherwise
    returns the refined forms, symmetrized, with their asymmetry defects
    recorded on the SymMatrix wrappers.
    """
    base = cfg.quad_base
    a1, b1 = _raw_forms(cfg, l, base)
    a2, b2 = _raw_forms(cfg, l, 2 * base)
    for coarse, fine, tag in ((a1, a2, "stiffness"), (b1, b2, "mass")):
        scale = float(np.max(np.abs(fine)))
        gap = float(np.max(np.abs(coarse - fine)))
        if gap > QUAD_DOUBLING_REL * scale:
            raise QuadratureNotConverged(
                f"{tag} form moved by {gap:.3e} (scale {scale:.3e}) "
                f"under node doubling {base} -> {2 * base} at mode {l}"
            )
    return SymMatrix(a2), SymMatrix(b2)


def _raw_forms(cfg: SolverConfig, l: int, quad_m: int):
    n, p = cfg.n, cfg.p
    x0 = math.cos(cfg.theta0)
    half_width = (1.0 - x0) / 2.0
    gamma = l + (n - 2) / 2.0
    s, w = gauss_jacobi_rule(gamma, quad_m)
    x = x0 + half_width * (s + 1.0)
    eff_w = w * half_width ** (gamma + 1.0) * (1.0 + x) ** gamma

    size = p + cfg.basis_size  # coefficient length, degree p + N - 1
    coeffs0 = np.zeros((cfg.basis_size, size))
    factor = half_width**p * cheb.chebpow(np.array([1.0, 1.0]), p)
    for j in range(cfg.basis_size):
        unit = np.zeros(j + 1)
        unit[j] = 1.0
        prod = cheb.chebmul(factor, unit)
        coeffs0[j, : len(prod)] = prod

    def apply_op(mat):
        out = np.empty_like(mat)
        for row in range(mat.shape[0]):
            out[row] = operator_coeffs(mat[row], l, n, x0)
        return out

    half_order = p // 2
    coeffs_m = coeffs0
    for _ in range(half_order):
        coeffs_m = apply_op(coeffs_m)

    vander = cheb.chebvander(s, size - 1)  # (quad_m, size)
    v_m = coeffs_m @ vander.T
    if p % 2 == 0:
        a_raw = (v_m * eff_w) @ v_m.T
    else:
        v_md = apply_op(coeffs_m) @ vander.T
        a_raw = -(v_m * eff_w) @ v_md.T

    if cfg.problem is Problem.CLAMPED:
        v_0 = coeffs0 @ vander.T if half_order else v_m
        b_raw = (v_0 * eff_w) @ v_0.T
    else:
        v_0 = coeffs0 @ vander.T if p > 1 else v_m
        v_1 = apply_op(coeffs0) @ vander.T
        b_raw = -(v_0 * eff_w) @ v_1.T
    return a_raw, b_raw


def solve_mode(cfg: SolverConfig, l: int) -> ModeResult:
    """Radial eigenvalues of mode l (all of them, ascending)."""
    result, _ = _solve_mode_full(cfg, l)
    return result


def _solve_mode_full(cfg: SolverConfig, l: int):
    a_form, b_form = assemble_mode(cfg, l)
    defect = max(a_form.asymmetry_defect, b_form.asymmetry_defect)
    if defect > ASYMMETRY_WARN:
        warnings.warn(
            f"form asymmetry defect {defect:.3e} at mode {l} exceeds {ASYMMETRY_WARN:g}",
            RuntimeWarning,
            stacklevel=3,
        )
    pairs = generalized_sym_eigen(a_form, b_form)
    values = pairs.values
    if float(values[0]) <= 0.0:
        raise NumericalError(
            f"nonpositive radial eigenvalue {values[0]:.6e} at mode {l}"
        )
    return ModeResult(l, values.copy(), multiplicity(l, cfg.n)), defect


def solve_spectrum(cfg: SolverConfig) -> Spectrum:
    """First requested_count eigenvalues of the cap problem.

    Merges per-mode radial values across angular modes, expanding by
    multiplicity; the mode loop is extended (or, with a fixed cap, verified)
    until the last mode's smallest value clears the K-th merged value by 5%.
    Diagnostics carry the worst form asymmetry, a per-entry convergence
    estimate against a companion solve at basis N - 4, and the
    lambda_1 > n - 2 guard outcome.
    """
    records, l_last, defect, cache = _merge_modes(cfg, enforce_sufficiency=True)
    estimates = _convergence_estimates(cfg, records)
    entries = tuple(
        SpectrumEntry(value=float(v), l=l, radial_index=j, multiplicity=multiplicity(l, cfg.n))
        for v, l, j in records
    )
    diagnostics = {
        "max_form_asymmetry": defect,
        "convergence": estimates,
        "l_max": l_last,
        "quad_size": cfg.quad_base,
        "basis_companion": _companion_basis(cfg),
        "lambda1_guard_ok": bool(entries[0].value > cfg.n - 2),
        "backend_modes_solved": sorted(cache),
    }
    return Spectrum(config=cfg, entries=entries, diagnostics=diagnostics)


def _merge_modes(cfg: SolverConfig, enforce_sufficiency: bool):
    """Solve modes until sufficiency; returns (records, last_l, defect, cache).

    records are (value, l, radial_index) triples, ascending, covering at
    least requested_count expanded eigenvalues.
    """
    want = cfg.requested_count
    hard_cap = cfg.mode_cap if cfg.mode_cap is not None else max(64, 2 * want + 8)
    all_records = []
    cache = {}
    worst_defect = 0.0
    prev_ground = 0.0
    l = 0
    while True:
        mode, defect = _solve_mode_full(cfg, l)
        cache[l] = mode
        worst_defect = max(worst_defect, defect)
        ground = float(mode.radial_values[0])
        if ground < prev_ground * (1.0 - 1e-12):
            raise ModeCapTooSmall(
                f"per-mode ground value dropped from {prev_ground:.6e} to {ground:.6e} "
                f"at mode {l}; the sufficiency rule does not apply"
            )
        prev_ground = ground
        mult = mode.multiplicity
        all_records.extend(
            (float(v), l, j) for j, v in enumerate(mode.radial_values)
        )
        all_records.sort()
        kth = _kth_expanded(all_records, cfg.n, want)
        if kth is not None and ground > MODE_SAFETY * kth:
            break
        if l >= hard_cap:
            if enforce_sufficiency:
                raise ModeCapTooSmall(
                    f"modes 0..{l} cannot certify the first {want} eigenvalues "
                    f"(need last ground value > {MODE_SAFETY:g} * K-th merged value)"
                )
            break
        l += 1
    records = []
    total = 0
    for v, ll, j in all_records:
        records.append((v, ll, j))
        total += multiplicity(ll, cfg.n)
        if total >= want:
            break
    return records, l, worst_defect, cache


def _kth_expanded(sorted_records, n, k):
    total = 0
    for v, l, _ in sorted_records:
        total += multiplicity(l, n)
        if total >= k:
            return v
    return None


def _companion_basis(cfg: SolverConfig) -> int:
    return max(cfg.requested_count, cfg.basis_size - COMPANION_DROP)


def _convergence_estimates(cfg: SolverConfig, records):
    """Per-record |v_N - v_companion| / v_N; zeros when no companion."""
    companion = _companion_basis(cfg)
    if companion >= cfg.basis_size:
        return [0.0] * len(records)
    sub = replace(cfg, basis_size=companion, quad_size=None)
    cache = {}
    out = []
    for v, l, j in records:
        if l not in cache:
            cache[l], _ = _solve_mode_full(sub, l)
        coarse = cache[l].radial_values
        if j < len(coarse):
            out.append(abs(float(coarse[j]) - v) / v)
        else:
            out.append(float("inf"))
    return out


@dataclass(frozen=True)
class ConvergenceStudy:
    """Eigenvalue table over nested basis sizes, plus final-step estimates."""

    basis_sizes: tuple[int, ...]
    values: np.ndarray  # (len(basis_sizes), requested_count)
    estimates: np.ndarray  # (requested_count,)

    def __post_init__(self):
        self.values.flags.writeable = False
        self.estimates.flags.writeable = False


def convergence_study(cfg: SolverConfig, basis_sizes) -> ConvergenceStudy:
    """Re-solve cfg over ascending basis sizes and tabulate the first K
    eigenvalues per size.

    The mode cap is resolved once at the largest size and reused, so every
    column compares identical mode sets over nested trial spaces; values must
    be non-increasing per index within 1e-10 absolute slack, else
    MonotonicityViolation. Estimates are |last - previous| / last per index.
    """
    sizes = [int(b) for b in basis_sizes]
    if len(sizes) < 2:
        raise ValidationError("need at least two basis sizes")
    if any(b <= 0 for b in sizes) or any(
        sizes[i] > sizes[i + 1] for i in range(len(sizes) - 1)
    ):
        raise ValidationError(f"basis sizes must be positive and ascending, got {sizes}")

    top = replace(cfg, basis_size=sizes[-1])
    _, l_last, _, _ = _merge_modes(top, enforce_sufficiency=True)

    rows = []
    for size in sizes:
        sub = replace(cfg, basis_size=size, mode_cap=l_last)
        records, _, _, _ = _merge_modes(sub, enforce_sufficiency=False)
        expanded = []
        for v, l, _ in records:
            expanded.extend([v] * multiplicity(l, cfg.n))
        rows.append(expanded[: cfg.requested_count])

    values = np.array(rows)
    for t in range(1, len(sizes)):
        jump = values[t] - values[t - 1]
        worst = float(np.max(jump))
        if worst > MONOTONE_SLACK:
            idx = int(np.argmax(jump))
            raise MonotonicityViolation(
                f"eigenvalue {idx + 1} increased by {worst:.3e} when the basis "
                f"grew from {sizes[t - 1]} to {sizes[t]}"
            )
    estimates = np.abs(values[-1] - values[-2]) / values[-1]
    return ConvergenceStudy(tuple(sizes), values, estimates)
