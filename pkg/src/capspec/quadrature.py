"""Gauss-Jacobi quadrature for the weight (1 - s)^gamma on [-1, 1].

Nodes are the roots of the degree-m Jacobi polynomial for parameters
(gamma, 0), found by sign-change bracketing on a cosine grid, bisection, and
a few Newton polish steps. With the second parameter fixed at 0 the classical
weight normalization collapses to 2^(gamma+1), so no Gamma functions appear:

    w_i = 2^(gamma+1) / ((1 - x_i^2) * P_m'(x_i)^2)

The resulting rule integrates polynomials of degree <= 2m - 1 against the
weight to relative 1e-13 (relative to the weight mass).
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import NoConvergence, ValidationError

_BISECTIONS = 72
_POLISH = 3


def gauss_jacobi_rule(gamma: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (ascending, inside (-1, 1)) and positive weights.

    gamma >= 0 is the weight exponent; m >= 1 the node count. Raises
    NoConvergence only if root bracketing or polishing fails, which signals
    an implementation bug for any m <= 512.
    """
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValidationError(f"node count must be a positive integer, got {m!r}")
    gamma = float(gamma)
    if not (gamma >= 0.0 and np.isfinite(gamma)):
        raise ValidationError(f"weight exponent must be finite and >= 0, got {gamma}")
    nodes, weights = _cached_rule(gamma, int(m))
    return nodes.copy(), weights.copy()


@functools.lru_cache(maxsize=512)
def _cached_rule(gamma: float, m: int):
    lo, hi = _bracket_roots(gamma, m)
    x = _refine_roots(gamma, m, lo, hi)
    _, deriv = _jacobi_eval(gamma, m, x)
    weights = 2.0 ** (gamma + 1.0) / ((1.0 - x * x) * deriv * deriv)
    if not (np.all(np.diff(x) > 0.0) and np.all(weights > 0.0)):
        raise NoConvergence("polished nodes not strictly ascending with positive weights")
    x.flags.writeable = False
    weights.flags.writeable = False
    return x, weights


def _jacobi_eval(gamma: float, m: int, x: np.ndarray):
    """Value and derivative of the degree-m Jacobi polynomial, parameters
    (gamma, 0), by the three-term recurrence (differentiated termwise)."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    d_prev = np.zeros_like(x)
    if m == 0:
        return p_prev, d_prev
    p = 0.5 * (gamma + 2.0) * x + 0.5 * gamma
    d = np.full_like(x, 0.5 * (gamma + 2.0))
    for k in range(2, m + 1):
        den = 2.0 * k * (k + gamma) * (2.0 * k + gamma - 2.0)
        ak = (2.0 * k + gamma - 1.0) * (2.0 * k + gamma) * (2.0 * k + gamma - 2.0) / den
        bk = (2.0 * k + gamma - 1.0) * gamma * gamma / den
        ck = 2.0 * (k + gamma - 1.0) * (k - 1.0) * (2.0 * k + gamma) / den
        lin = ak * x + bk
        p_next = lin * p - ck * p_prev
        d_next = lin * d + ak * p - ck * d_prev
        p_prev, p = p, p_next
        d_prev, d = d, d_next
    return p, d


def _bracket_roots(gamma: float, m: int):
    """Sign-change brackets for all m roots from a cosine-spaced grid."""
    count = 8 * (m + int(gamma) + 2)
    for _ in range(8):
        grid = np.cos(np.linspace(np.pi, 0.0, count + 1))  # ascending in x
        vals, _ = _jacobi_eval(gamma, m, grid)
        if np.any(vals == 0.0):  # nudge exact zeros off the grid
            hit = vals == 0.0
            grid[hit] = np.nextafter(grid[hit], 1.0)
            vals, _ = _jacobi_eval(gamma, m, grid)
        flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0.0)[0]
        if len(flips) == m:
            return grid[flips].copy(), grid[flips + 1].copy()
        count *= 2
    raise NoConvergence(
        f"failed to bracket {m} quadrature nodes for weight exponent {gamma}"
    )


def _refine_roots(gamma: float, m: int, lo: np.ndarray, hi: np.ndarray):
    flo, _ = _jacobi_eval(gamma, m, lo)
    sign_lo = np.sign(flo)
    for _ in range(_BISECTIONS):
        mid = 0.5 * (lo + hi)
        fmid, _ = _jacobi_eval(gamma, m, mid)
        left = np.sign(fmid) * sign_lo > 0.0
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    x = 0.5 * (lo + hi)
    for _ in range(_POLISH):
        val, deriv = _jacobi_eval(gamma, m, x)
        step = np.where(deriv != 0.0, val / np.where(deriv != 0.0, deriv, 1.0), 0.0)
        x = np.clip(x - step, lo, hi)
    return x
