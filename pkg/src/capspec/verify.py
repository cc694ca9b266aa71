"""End-to-end checks: bounds against computed spectra, sharpness
comparisons between families, and the flat-limit solver oracle.

Computed eigenvalues are Rayleigh-Ritz values, hence upper approximations
of the true ones, while every bound family is stated for exact eigenvalues;
validity checks therefore apply a small relative slack (1e-8) and reports
carry the raw margins so callers can apply stricter gates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    DELTA,
    SQRT,
    SQRT_P2,
    BoundFamily,
    BoundResult,
    EigenSequence,
    best_delta_bound,
    evaluate_bound,
    family,
    implied_bound,
)
from .errors import BracketFailure, GuardViolation, OracleMismatch, ValidationError
from .spectral import Problem, SolverConfig, Spectrum, solve_spectrum

HOLDS_SLACK = 1e-8
TWIN_REL_TOL = 1e-10
DOMINANCE_SLACK = 1e-10
FLAT_THETA_MAX = 0.2
FLAT_ORACLE_RTOL = 0.01


def _as_sequence(spec) -> EigenSequence:
    if isinstance(spec, Spectrum):
        return EigenSequence.from_spectrum(spec)
    if isinstance(spec, EigenSequence):
        return spec
    raise ValidationError(
        f"expected a Spectrum or EigenSequence, got {type(spec).__name__}"
    )


@dataclass(frozen=True)
class ReportRow:
    k: int
    actual: float
    result: BoundResult
    holds: bool


@dataclass(frozen=True)
class VerificationReport:
    sequence: EigenSequence
    families: tuple[BoundFamily, ...]
    rows: tuple[ReportRow, ...]
    summary: dict = field(compare=False)


def check_spectrum(spec, families) -> VerificationReport:
    """Evaluate each family's bound on every proper prefix and compare with
    the next computed eigenvalue.

    A row holds when actual <= bound + 1e-8 * actual. Rows are ordered k
    ascending, then families in the given order. Sphere buckling families
    refuse sequences failing the ground-value guard (GuardViolation).
    """
    seq = _as_sequence(spec)
    families = tuple(families)
    if not families:
        raise ValidationError("no bound families given")
    for fam in families:
        if fam.needs_guard and seq.values[0] <= seq.n - 2:
            raise GuardViolation(
                f"family {fam.name} requires the smallest eigenvalue to exceed "
                f"n - 2 = {seq.n - 2}; got {seq.values[0]:.6g}"
            )
    rows = []
    for k in range(1, len(seq)):
        actual = seq.values[k]
        for fam in families:
            result = evaluate_bound(fam, seq, k, actual=actual)
            holds = actual <= result.bound + HOLDS_SLACK * actual
            rows.append(ReportRow(k=k, actual=actual, result=result, holds=holds))
    margins = [r.result.margin for r in rows]
    sharpest = {}
    for k in range(1, len(seq)):
        group = [r for r in rows if r.k == k]
        best = min(group, key=lambda r: r.result.bound)
        name = best.result.family.name
        sharpest[name] = sharpest.get(name, 0) + 1
    summary = {
        "rows": len(rows),
        "violations": sum(1 for r in rows if not r.holds),
        "min_margin": min(margins) if margins else float("nan"),
        "families": [str(f) for f in families],
        "sharpest_family_counts": sharpest,
    }
    return VerificationReport(sequence=seq, families=families,
                              rows=tuple(rows), summary=summary)


@dataclass(frozen=True)
class SharpnessRow:
    k: int
    sqrt_bound: float
    p2_bound: float
    twins_agree: bool
    delta_opt_bound: float
    delta_star: float
    grid_min_bound: float
    dominated_count: int  # grid points the sqrt family does not beat
    grid_size: int

    @property
    def dominance_ok(self) -> bool:
        return self.dominated_count == 0


@dataclass(frozen=True)
class SharpnessReport:
    sequence: EigenSequence
    delta_grid: tuple
    rows: tuple[SharpnessRow, ...]
    summary: dict = field(compare=False)


def compare_sharpness(spec, delta_grid=(1e-3, 1e3, 32)) -> SharpnessReport:
    """Order-two sharpness audit: the sqrt family must agree with its p = 2
    twin to 1e-10 relative and must not exceed the delta family at any grid
    delta (grid points with no finite implied bound count as +inf).

    Violations are recorded in the summary, not raised; evaluator errors
    (domain guards etc.) propagate.
    """
    seq = _as_sequence(spec)
    if seq.p != 2 or seq.problem is not Problem.BUCKLING:
        raise ValidationError(
            f"sharpness comparison applies to order-2 buckling sequences, "
            f"got p = {seq.p} {seq.problem.value}"
        )
    lo, hi, count = delta_grid
    lo, hi, count = float(lo), float(hi), int(count)
    if not (0.0 < lo < hi and count >= 2):
        raise ValidationError(f"bad delta grid {delta_grid!r}")
    deltas = np.logspace(math.log10(lo), math.log10(hi), count)
    rows = []
    for k in range(1, len(seq)):
        sqrt_bound = implied_bound(family(SQRT), seq, k).bound
        p2_bound = implied_bound(family(SQRT_P2), seq, k).bound
        twins_agree = abs(sqrt_bound - p2_bound) <= TWIN_REL_TOL * sqrt_bound
        grid_bounds = []
        for d in deltas:
            try:
                grid_bounds.append(
                    implied_bound(family(DELTA, delta=float(d)), seq, k).bound
                )
            except BracketFailure:
                grid_bounds.append(float("inf"))
        slack = DOMINANCE_SLACK * max(1.0, sqrt_bound)
        dominated = sum(1 for b in grid_bounds if sqrt_bound > b + slack)
        opt = best_delta_bound(seq, k)
        rows.append(SharpnessRow(
            k=k,
            sqrt_bound=sqrt_bound,
            p2_bound=p2_bound,
            twins_agree=twins_agree,
            delta_opt_bound=opt.bound,
            delta_star=opt.aux["delta_star"],
            grid_min_bound=min(grid_bounds),
            dominated_count=dominated,
            grid_size=count,
        ))
    summary = {
        "rows": len(rows),
        "twin_violations": sum(1 for r in rows if not r.twins_agree),
        "dominance_violations": sum(1 for r in rows if not r.dominance_ok),
    }
    return SharpnessReport(sequence=seq, delta_grid=(lo, hi, count),
                           rows=tuple(rows), summary=summary)


@dataclass(frozen=True)
class FlatLimitReport:
    n: int
    p: int
    problem: Problem
    theta0s: tuple
    scaled: tuple  # ground value times theta0^2, per theta0
    oracle: float
    deviations: tuple  # |scaled - oracle| / oracle
    trend_improving: tuple  # deviation[i+1] < deviation[i] along descending theta0


def flat_limit_check(n, p, problem, theta0s, oracle, basis_size=24) -> FlatLimitReport:
    """Scaled ground values Lambda_1 * theta0^2 along shrinking caps against
    an externally supplied flat-disk constant.

    theta0s must be descending and <= 0.2; the smallest cap's scaled value
    must agree with the oracle to 1%, else OracleMismatch.
    """
    problem = Problem(problem)
    theta0s = tuple(float(t) for t in theta0s)
    if not theta0s:
        raise ValidationError("need at least one cap radius")
    if any(t > FLAT_THETA_MAX for t in theta0s):
        raise ValidationError(
            f"flat-limit caps must have theta0 <= {FLAT_THETA_MAX}, got {theta0s}"
        )
    if any(theta0s[i] <= theta0s[i + 1] for i in range(len(theta0s) - 1)):
        raise ValidationError(f"cap radii must be strictly descending, got {theta0s}")
    oracle = float(oracle)
    if not (math.isfinite(oracle) and oracle > 0.0):
        raise ValidationError(f"oracle constant must be positive, got {oracle!r}")
    scaled = []
    for t0 in theta0s:
        cfg = SolverConfig(n=n, p=p, theta0=t0, problem=problem,
                           basis_size=basis_size, requested_count=1)
        scaled.append(float(solve_spectrum(cfg).expanded_values()[0]) * t0 * t0)
    deviations = tuple(abs(s - oracle) / oracle for s in scaled)
    trend = tuple(deviations[i + 1] < deviations[i]
                  for i in range(len(deviations) - 1))
    if deviations[-1] > FLAT_ORACLE_RTOL:
        raise OracleMismatch(
            f"scaled ground value {scaled[-1]:.10g} at theta0 = {theta0s[-1]:g} "
            f"deviates from the flat-disk constant {oracle:.10g} by "
            f"{deviations[-1]:.3%} (tolerance 1%)"
        )
    return FlatLimitReport(n=n, p=p, problem=problem, theta0s=theta0s,
                           scaled=tuple(scaled), oracle=oracle,
                           deviations=deviations, trend_improving=trend)
