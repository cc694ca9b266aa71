"""Radial reduction of the sphere Laplacian on a geodesic cap.

A function u = sin(theta)^l * q(cos(theta)) * Y_l, with Y_l a degree-l
harmonic on the equatorial sphere, has

    Laplacian(u) = sin(theta)^l * (D_{l,n} q)(cos(theta)) * Y_l,
    (D_{l,n} q)(x) = (1 - x^2) q'' - (2l + n) x q' - l (l + n - 1) q,

so the cap eigenproblems reduce per mode l to polynomial work in
x = cos(theta) on [x0, 1], x0 = cos(theta0). Polynomials are stored by their
Chebyshev coefficients in the mapped variable s = 2(x - x0)/(1 - x0) - 1,
which lives on [-1, 1]; the map anchor x0 travels with the coefficients.

D_{l,n} is exact on polynomials and does not raise the degree: the operator
is applied through coefficient recurrences (differentiation and
multiplication by fixed quadratics), never through sampled values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .errors import ValidationError


def multiplicity(l: int, n: int) -> int:
    """Dimension of the degree-l harmonics on the equatorial (n-1)-sphere.

    n = 2: 1 for l = 0, else 2. n >= 3: (2l+n-2) (l+n-3)! / (l! (n-2)!).
    Exact integer arithmetic.
    """
    if not (isinstance(l, (int, np.integer)) and l >= 0):
        raise ValidationError(f"mode index must be a nonnegative integer, got {l!r}")
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise ValidationError(f"dimension must be an integer >= 2, got {n!r}")
    if n == 2:
        return 1 if l == 0 else 2
    return (
        (2 * l + n - 2)
        * math.factorial(l + n - 3)
        // (math.factorial(l) * math.factorial(n - 2))
    )


@dataclass(frozen=True)
class RadialPoly:
    """Chebyshev coefficients in the mapped variable, plus the map anchor."""

    coeffs: np.ndarray
    x0: float

    def __post_init__(self):
        arr = np.atleast_1d(np.array(self.coeffs, dtype=float))
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("coefficients must be a nonempty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("coefficients must be finite")
        if not -1.0 < self.x0 < 1.0:
            raise ValidationError(f"map anchor must lie in (-1, 1), got {self.x0}")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_x_coeffs(cls, x_coeffs, x0: float) -> "RadialPoly":
        """Build from monomial coefficients in x (constant first)."""
        a = (1.0 - x0) / 2.0
        b = (1.0 + x0) / 2.0
        # compose with x = a s + b, then convert the s-monomial to Chebyshev
        s_poly = np.polynomial.polynomial.Polynomial([b, a])
        composed = np.polynomial.polynomial.Polynomial(np.atleast_1d(x_coeffs))(s_poly)
        return cls(cheb.poly2cheb(composed.coef), x0)

    def eval_x(self, x):
        """Evaluate at x = cos(theta) points."""
        a = (1.0 - self.x0) / 2.0
        s = (np.asarray(x, dtype=float) - self.x0) / a - 1.0
        return cheb.chebval(s, self.coeffs)


def apply_radial_operator(q: RadialPoly, l: int, n: int) -> RadialPoly:
    """D_{l,n} q, exactly, with the degree preserved."""
    multiplicity(l, n)  # reuses its argument validation
    out = operator_coeffs(q.coeffs, l, n, q.x0)
    return RadialPoly(out, q.x0)


def operator_coeffs(c: np.ndarray, l: int, n: int, x0: float) -> np.ndarray:
    """Coefficient-level D_{l,n} on Chebyshev-in-s coefficients.

    Returns an array of the same length as c.
    """
    c = np.asarray(c, dtype=float)
    size = len(c)
    a = (1.0 - x0) / 2.0
    b = (1.0 + x0) / 2.0
    # 1 - x^2 and x as Chebyshev series in s
    quad = np.array([1.0 - b * b - a * a / 2.0, -2.0 * a * b, -a * a / 2.0])
    lin = np.array([b, a])
    out = -float(l * (l + n - 1)) * c
    if size > 1:
        d1 = cheb.chebder(c) / a
        out = _add(out, -float(2 * l + n) * cheb.chebmul(lin, d1), size)
    if size > 2:
        d2 = cheb.chebder(c, 2) / (a * a)
        out = _add(out, cheb.chebmul(quad, d2), size)
    return out


def _add(acc, term, size):
    term = term[:size]
    if len(term) < len(acc):
        term = np.pad(term, (0, len(acc) - len(term)))
    return acc + term
