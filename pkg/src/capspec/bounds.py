"""Universal eigenvalue bound families.

Every family bounds the (k+1)-th eigenvalue of a clamped or buckling
problem by the first k eigenvalues. Two mechanisms appear:

* predicate families state an inequality between both sides evaluated at a
  candidate value c >= Lambda_k; the implied bound is the first c at which
  the predicate fails (bracket doubling + bisection);
* closed-form families reduce to a quadratic
  k X^2 - X (2 sum v_i + sum c_i) + (sum v_i^2 + sum c_i v_i) <= 0
  whose larger root is the bound, or to the averaged pair (S, T) with
  bound S + sqrt(S^2 - T).

Sphere buckling families share the coefficient functions

    g(L) = factor(L) - L / (L - (n-2)),   h(L) = L + (n-2)^2 / 4,

where factor is sphere_buckling_factor below; they require every
eigenvalue to exceed n - 2 (for n = 2 this is just positivity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BracketFailure,
    DiscriminantNegative,
    DomainError,
    FamilyMismatch,
    ValidationError,
)
from .spectral import Problem, Spectrum

INEQ_SLACK = 1e-12
DISC_SLACK = 1e-12
BISECT_REL = 1e-11
BRACKET_DOUBLINGS = 64
DELTA_LOG_RANGE = (-6.0, 6.0)
DELTA_GRID_POINTS = 64
DELTA_LOG_TOL = 1e-8

SQRT = "sphere-buckling-sqrt"
QUADRATIC = "sphere-buckling-quadratic"
GAP = "sphere-buckling-gap"
DELTA = "sphere-buckling-delta"
DELTA_OPT = "sphere-buckling-delta-opt"
SQRT_P2 = "sphere-buckling-sqrt-p2"
SPHERE_CLAMPED = "sphere-clamped"
EUCLIDEAN_MEMBRANE = "euclidean-membrane"
EUCLIDEAN_CLAMPED = "euclidean-clamped"
EUCLIDEAN_BUCKLING_P2 = "euclidean-buckling-p2"
EUCLIDEAN_BUCKLING = "euclidean-buckling"

# name -> (problem, exact_p, min_p, sphere guard required)
_REGISTRY = {
    SQRT: (Problem.BUCKLING, None, 2, True),
    QUADRATIC: (Problem.BUCKLING, None, 2, True),
    GAP: (Problem.BUCKLING, None, 2, True),
    DELTA: (Problem.BUCKLING, 2, 2, True),
    DELTA_OPT: (Problem.BUCKLING, 2, 2, True),
    SQRT_P2: (Problem.BUCKLING, 2, 2, True),
    SPHERE_CLAMPED: (Problem.CLAMPED, None, 1, False),
    EUCLIDEAN_MEMBRANE: (Problem.CLAMPED, 1, 1, False),
    EUCLIDEAN_CLAMPED: (Problem.CLAMPED, None, 1, False),
    EUCLIDEAN_BUCKLING_P2: (Problem.BUCKLING, 2, 2, False),
    EUCLIDEAN_BUCKLING: (Problem.BUCKLING, None, 2, False),
}

FAMILY_NAMES = tuple(_REGISTRY)


@dataclass(frozen=True)
class EigenSequence:
    """Multiplicity-expanded ascending eigenvalues with their problem data."""

    n: int
    p: int
    problem: Problem
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "problem", Problem(self.problem))
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 2):
            raise ValidationError(f"dimension must be an integer >= 2, got {self.n!r}")
        min_p = 2 if self.problem is Problem.BUCKLING else 1
        if not (isinstance(self.p, (int, np.integer)) and self.p >= min_p):
            raise ValidationError(
                f"order must be an integer >= {min_p} for {self.problem.value}, got {self.p!r}"
            )
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValidationError("eigenvalue sequence is empty")
        if vals[0] <= 0.0 or not all(math.isfinite(v) for v in vals):
            raise ValidationError("eigenvalues must be positive finite reals")
        if any(vals[i] > vals[i + 1] for i in range(len(vals) - 1)):
            raise ValidationError("eigenvalues must be ascending")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_spectrum(cls, spectrum: Spectrum, count: int | None = None):
        cfg = spectrum.config
        return cls(n=cfg.n, p=cfg.p, problem=cfg.problem,
                   values=tuple(spectrum.expanded_values(count)))

    def __len__(self):
        return len(self.values)

    def prefix(self, k: int) -> np.ndarray:
        if not (isinstance(k, (int, np.integer)) and 1 <= k <= len(self.values)):
            raise ValidationError(
                f"prefix length must be in 1..{len(self.values)}, got {k!r}"
            )
        return np.array(self.values[:k])


@dataclass(frozen=True)
class BoundFamily:
    name: str
    problem: Problem
    exact_p: int | None
    min_p: int
    needs_guard: bool
    delta: float | None = None
    use_lambda_i: bool = False

    def __str__(self):
        if self.name == DELTA and self.delta is not None:
            return f"{self.name}({self.delta:g})"
        return self.name


def family(name: str, delta: float | None = None,
           sphere_clamped_use_lambda_i: bool = False) -> BoundFamily:
    """Construct a bound family by name, validating its parameters."""
    if name not in _REGISTRY:
        known = ", ".join(FAMILY_NAMES)
        raise ValidationError(f"unknown bound family {name!r}; known: {known}")
    problem, exact_p, min_p, needs_guard = _REGISTRY[name]
    if name == DELTA:
        if delta is None:
            raise ValidationError(f"{DELTA} requires a positive delta parameter")
        delta = float(delta)
        if not (math.isfinite(delta) and delta > 0.0):
            raise ValidationError(f"delta must be a positive finite real, got {delta!r}")
    elif delta is not None:
        raise ValidationError(f"delta does not apply to family {name!r}")
    if sphere_clamped_use_lambda_i and name != SPHERE_CLAMPED:
        raise ValidationError(
            f"sphere_clamped_use_lambda_i does not apply to family {name!r}"
        )
    return BoundFamily(name=name, problem=problem, exact_p=exact_p, min_p=min_p,
                       needs_guard=needs_guard, delta=delta,
                       use_lambda_i=bool(sphere_clamped_use_lambda_i))


@dataclass(frozen=True)
class PredicateResult:
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class BoundResult:
    family: BoundFamily
    k: int
    bound: float
    aux: dict = field(default_factory=dict, compare=False)
    actual: float | None = None

    @property
    def margin(self) -> float | None:
        if self.actual is None:
            return None
        return self.bound - self.actual


def sphere_buckling_factor(lam: float, n: int, p: int) -> float:
    """Order-p coefficient entering the sphere buckling families; reduces to
    lam + 1 at p = 2. Terms with a vanishing integer coefficient are exact
    zeros, so p = 2, 3 never meet a negative exponent."""
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise ValidationError(f"dimension must be an integer >= 2, got {n!r}")
    if not (isinstance(p, (int, np.integer)) and p >= 2):
        raise ValidationError(f"order must be an integer >= 2, got {p!r}")
    lam = float(lam)
    if not (math.isfinite(lam) and lam > 0.0):
        raise DomainError(f"eigenvalue must be positive, got {lam!r}")
    t = lam ** (1.0 / (p - 1))
    total = ((t + n) ** (p - 1) - (t - n + 2) ** (p - 1)) / (2 * (n - 1))
    total += n / (n - 1) * t * (t + n) ** (p - 2)
    total -= 1 / (n - 1) * t * (t - n + 2) ** (p - 2)
    c4 = 2 ** (p - 1) - p
    if c4:
        total += 2 * c4 * t * (t + n) ** (p - 3)
    c5 = 2 ** (p - 2) - (p - 1)
    if c5:
        total += 4 * c5 * t * t * (t + n) ** (p - 4)
    return total


def _guard_prefix(prefix: np.ndarray, n: int):
    floor = n - 2
    if float(prefix[0]) <= floor:
        raise DomainError(
            f"sphere buckling families require every eigenvalue > n - 2 = {floor}; "
            f"smallest is {prefix[0]:.6g}"
        )


def _coeff_g(prefix: np.ndarray, n: int, p: int) -> np.ndarray:
    factors = np.array([sphere_buckling_factor(v, n, p) for v in prefix])
    return factors - prefix / (prefix - (n - 2))


def _coeff_g_p2(prefix: np.ndarray, n: int) -> np.ndarray:
    return prefix - (n - 2) / (prefix - (n - 2))


def _coeff_h(prefix: np.ndarray, n: int) -> np.ndarray:
    return prefix + (n - 2) ** 2 / 4.0


def quadratic_terms(seq: EigenSequence, k: int) -> tuple[float, float]:
    """Averaged pair (S, T) of the closed-form sphere buckling bound."""
    _check_compat(family(QUADRATIC), seq)
    prefix = seq.prefix(k)
    _guard_prefix(prefix, seq.n)
    gh = _coeff_g(prefix, seq.n, seq.p) * _coeff_h(prefix, seq.n)
    s = float(np.mean(prefix) + np.sum(gh) / (2 * k))
    t = float(np.mean(prefix**2) + np.sum(prefix * gh) / k)
    return s, t


def _check_compat(fam: BoundFamily, seq: EigenSequence):
    if fam.problem is not seq.problem:
        raise FamilyMismatch(
            f"family {fam.name} applies to {fam.problem.value} spectra, "
            f"got {seq.problem.value}"
        )
    if fam.exact_p is not None and seq.p != fam.exact_p:
        raise FamilyMismatch(
            f"family {fam.name} requires order p = {fam.exact_p}, got p = {seq.p}"
        )
    if seq.p < fam.min_p:
        raise FamilyMismatch(
            f"family {fam.name} requires order p >= {fam.min_p}, got p = {seq.p}"
        )


_PREDICATE_FAMILIES = (SQRT, QUADRATIC, DELTA, SQRT_P2)
_IMPLIED_FAMILIES = (SQRT, DELTA, SQRT_P2)


def evaluate_predicate(fam: BoundFamily, seq: EigenSequence, k: int,
                       candidate: float) -> PredicateResult:
    """Both sides of a predicate family's inequality with the (k+1)-th
    eigenvalue replaced by the candidate; holds is tested with relative
    slack 1e-12."""
    if fam.name not in _PREDICATE_FAMILIES:
        raise FamilyMismatch(f"family {fam.name} has no candidate predicate")
    _check_compat(fam, seq)
    prefix = seq.prefix(k)
    _guard_prefix(prefix, seq.n)
    candidate = float(candidate)
    if not (math.isfinite(candidate) and candidate >= float(prefix[-1])):
        raise ValidationError(
            f"candidate must be >= the k-th eigenvalue {prefix[-1]:.6g}, "
            f"got {candidate!r}"
        )
    n = seq.n
    diffs = candidate - prefix
    h = _coeff_h(prefix, n)
    if fam.name in (SQRT, SQRT_P2):
        if fam.name == SQRT:
            g = _coeff_g(prefix, n, seq.p)
        else:
            g = _coeff_g_p2(prefix, n)
        lhs = float(np.sum(diffs**2 * (2.0 + (n - 2) / (prefix - (n - 2)))))
        rhs = 2.0 * math.sqrt(max(float(np.sum(diffs**2 * g)), 0.0)) * math.sqrt(
            max(float(np.sum(diffs * h)), 0.0)
        )
    elif fam.name == QUADRATIC:
        g = _coeff_g(prefix, n, seq.p)
        lhs = float(np.sum(diffs**2))
        rhs = float(np.sum(diffs * g * h))
    else:  # DELTA
        d = fam.delta
        mult = d * prefix + d * d * (prefix - (n - 2)) / (4.0 * (d * prefix + n - 2))
        lhs = 2.0 * float(np.sum(diffs**2))
        rhs = float(np.sum(diffs**2 * mult)) + float(np.sum(diffs * h)) / d
    holds = lhs <= rhs + INEQ_SLACK * (abs(lhs) + abs(rhs))
    return PredicateResult(lhs=lhs, rhs=rhs, holds=holds)


def implied_bound(fam: BoundFamily, seq: EigenSequence, k: int,
                  actual: float | None = None) -> BoundResult:
    """First candidate at which the predicate fails: bracket doubling from
    the k-th eigenvalue, then bisection to relative width 1e-11. The failing
    end of the final bracket is reported (conservative side)."""
    if fam.name not in _IMPLIED_FAMILIES:
        raise FamilyMismatch(f"family {fam.name} has no implied bound")
    _check_compat(fam, seq)
    prefix = seq.prefix(k)
    _guard_prefix(prefix, seq.n)
    lam_k = float(prefix[-1])

    def holds(c):
        return evaluate_predicate(fam, seq, k, c).holds

    limit = lam_k * 2.0**BRACKET_DOUBLINGS
    lo = lam_k
    step = max(lam_k, 1.0)
    hi = lam_k + step
    while holds(hi):
        lo = hi
        step *= 2.0
        hi = lam_k + step
        if hi > limit:
            raise BracketFailure(
                f"predicate of {fam} still holds at candidate {hi:.6g} "
                f"(limit {limit:.6g}); no finite implied bound"
            )
    while hi - lo > BISECT_REL * hi:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    aux = {}
    if fam.name == DELTA:
        aux["delta"] = fam.delta
    return BoundResult(family=fam, k=k, bound=hi, aux=aux, actual=actual)


def closed_form_bound(fam: BoundFamily, seq: EigenSequence, k: int,
                      actual: float | None = None) -> BoundResult:
    """Closed-form families: the averaged (S, T) bounds and the quadratic
    larger-root families."""
    _check_compat(fam, seq)
    prefix = seq.prefix(k)
    n, p = seq.n, seq.p
    if fam.name in (QUADRATIC, GAP):
        s, t = quadratic_terms(seq, k)
        root = _disc_root(s, t)
        if fam.name == QUADRATIC:
            bound = s + root
        else:
            bound = float(prefix[-1]) + 2.0 * root
        result = BoundResult(family=fam, k=k, bound=bound,
                             aux={"S": s, "T": t}, actual=actual)
    elif fam.name == SPHERE_CLAMPED:
        roots = prefix ** (1.0 / p)
        bracket = (roots + n) ** p - prefix
        c_extra = 2**p - (p + 1)
        if c_extra:
            bracket = bracket + 4.0 * c_extra * roots * (roots + n) ** (p - 2)
        tail = (roots if fam.use_lambda_i else roots[0]) + n * n / 4.0
        coeffs = 4.0 / (n * n) * bracket * tail
        result = _quadratic_root_result(fam, k, prefix, coeffs, actual)
    elif fam.name == EUCLIDEAN_MEMBRANE:
        result = _quadratic_root_result(fam, k, prefix, 4.0 / n * prefix, actual)
    elif fam.name == EUCLIDEAN_CLAMPED:
        coeff = 4.0 * p * (2 * p + n - 2) / (n * n)
        result = _quadratic_root_result(fam, k, prefix, coeff * prefix, actual)
    elif fam.name == EUCLIDEAN_BUCKLING_P2:
        coeff = 4.0 * (n + 2) / (n * n)
        result = _quadratic_root_result(fam, k, prefix, coeff * prefix, actual)
    elif fam.name == EUCLIDEAN_BUCKLING:
        coeff = 4.0 * (p - 1) * (n + 2 * p - 2) / (n * n)
        powers = prefix ** ((2 * p - 3) / (p - 1))
        result = _quadratic_root_result(fam, k, prefix, coeff * powers, actual)
    else:
        raise FamilyMismatch(f"family {fam.name} has no closed-form bound")
    if result.bound < float(prefix[-1]) * (1.0 - 1e-12):
        raise DomainError(
            f"bound {result.bound:.6g} fell below the k-th eigenvalue "
            f"{prefix[-1]:.6g}; the inputs are not a genuine spectrum prefix"
        )
    return result


def _disc_root(s: float, t: float) -> float:
    disc = s * s - t
    if disc < -DISC_SLACK * s * s:
        raise DiscriminantNegative(
            f"S^2 - T = {disc:.6g} < 0 (S = {s:.6g}, T = {t:.6g}); "
            f"the inputs cannot be a genuine eigenvalue prefix"
        )
    return math.sqrt(max(disc, 0.0))


def _quadratic_root_result(fam, k, prefix, coeffs, actual):
    s = float((2.0 * np.sum(prefix) + np.sum(coeffs)) / (2 * k))
    t = float((np.sum(prefix**2) + np.sum(coeffs * prefix)) / k)
    return BoundResult(family=fam, k=k, bound=s + _disc_root(s, t),
                       aux={}, actual=actual)


def best_delta_bound(seq: EigenSequence, k: int,
                     actual: float | None = None) -> BoundResult:
    """Minimize the delta family's implied bound over delta: a 64-point
    log10 grid on [1e-6, 1e6] seeds a golden-section search in log10 delta.
    Grid points with no finite bound count as +inf; if every point is
    infinite the failure propagates."""
    _check_compat(family(DELTA_OPT), seq)

    def bound_at(log_delta):
        try:
            return implied_bound(family(DELTA, delta=10.0**log_delta), seq, k).bound
        except BracketFailure:
            return float("inf")

    lo_log, hi_log = DELTA_LOG_RANGE
    grid = np.linspace(lo_log, hi_log, DELTA_GRID_POINTS)
    values = [bound_at(g) for g in grid]
    best = int(np.argmin(values))
    if not math.isfinite(values[best]):
        raise BracketFailure(
            "the delta family has no finite implied bound anywhere on the grid"
        )
    left = grid[max(best - 1, 0)]
    right = grid[min(best + 1, len(grid) - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = left, right
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = bound_at(c), bound_at(d)
    while b - a > DELTA_LOG_TOL:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = bound_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = bound_at(d)
    log_star = c if fc <= fd else d
    delta_star = 10.0**log_star
    bound = bound_at(log_star)
    fam = family(DELTA_OPT)
    return BoundResult(family=fam, k=k, bound=bound,
                       aux={"delta_star": delta_star}, actual=actual)


def evaluate_bound(fam: BoundFamily, seq: EigenSequence, k: int,
                   actual: float | None = None) -> BoundResult:
    """Single entry point: dispatches to the implied-bound search, the
    closed forms, or the delta optimizer according to the family."""
    if fam.name in _IMPLIED_FAMILIES:
        return implied_bound(fam, seq, k, actual=actual)
    if fam.name == DELTA_OPT:
        return best_delta_bound(seq, k, actual=actual)
    return closed_form_bound(fam, seq, k, actual=actual)
