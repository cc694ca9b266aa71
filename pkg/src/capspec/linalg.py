"""Dense symmetric linear algebra on small matrices.

Everything here is sized for spectral-Galerkin systems (order <= a few
hundred): a pivot-checked Cholesky, a cyclic Jacobi eigensolver, and the
Cholesky reduction of the generalized symmetric-definite problem. The hot
loops live in `capspec._kernels` (compiled when available, numpy fallback
otherwise); this module owns the contracts and tolerances.

Tolerances:
  - Cholesky pivot failure: pivot <= order * 1e-14 * max(diag).
  - Jacobi convergence: off-diagonal Frobenius norm <= 1e-12 * ||C||_F,
    within a 64-sweep budget (the kernel targets 1e-13 for margin).
  - Reported eigenvectors are orthonormal (B-orthonormal in the generalized
    case) to 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NoConvergence, NotPositiveDefinite, ValidationError

PIVOT_RELATIVE = 1e-14
JACOBI_TARGET = 1e-13
JACOBI_SWEEP_BUDGET = 64


class SymMatrix:
    """A symmetrized square matrix that remembers how asymmetric it arrived.

    Construction replaces the input with (M + M^T) / 2 and records the
    relative asymmetry defect max|M - M^T| / max|M| (0 for the zero matrix).
    Entries are exposed read-only.
    """

    __slots__ = ("_entries", "asymmetry_defect")

    def __init__(self, entries):
        arr = np.array(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {arr.shape}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValidationError("matrix entries must be finite")
        scale = float(np.max(np.abs(arr))) if arr.size else 0.0
        gap = float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0
        self.asymmetry_defect = gap / scale if scale > 0.0 else 0.0
        sym = (arr + arr.T) / 2.0
        sym.flags.writeable = False
        self._entries = sym

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def order(self) -> int:
        return self._entries.shape[0]

    def __repr__(self):
        return f"SymMatrix(order={self.order}, asymmetry_defect={self.asymmetry_defect:.3e})"


@dataclass(frozen=True)
class EigenPairs:
    """Ascending eigenvalues with matching eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        self.values.flags.writeable = False
        self.vectors.flags.writeable = False

    def __len__(self):
        return len(self.values)


def _as_sym(mat) -> SymMatrix:
    return mat if isinstance(mat, SymMatrix) else SymMatrix(mat)


def cholesky(mat) -> np.ndarray:
    """Lower Cholesky factor L with L L^T = mat.

    Raises NotPositiveDefinite when any pivot falls at or below
    order * 1e-14 * max(diag); the message names the failing pivot.
    """
    b = _as_sym(mat).entries
    n = b.shape[0]
    maxdiag = float(np.max(b.diagonal())) if n else 0.0
    threshold = n * PIVOT_RELATIVE * maxdiag
    low, bad = _kernels.cholesky_lower(np.ascontiguousarray(b), threshold)
    if bad >= 0:
        raise NotPositiveDefinite(
            f"pivot {bad + 1} of {n} at or below threshold {threshold:.3e}"
        )
    return low


def sym_eigen(mat, max_sweeps: int = JACOBI_SWEEP_BUDGET) -> EigenPairs:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi.

    Values come back ascending, vectors orthonormal in the columns. Raises
    NoConvergence if the off-diagonal norm has not dropped to
    1e-12 * ||C||_F within the sweep budget.
    """
    c = _as_sym(mat).entries
    norm = float(np.linalg.norm(c))
    target = JACOBI_TARGET * norm
    diag, vec, sweeps = _kernels.jacobi_eigh(
        np.ascontiguousarray(c), target, max_sweeps
    )
    if sweeps < 0:
        raise NoConvergence(
            f"cyclic Jacobi missed its off-diagonal target after {max_sweeps} sweeps"
        )
    order = np.argsort(diag, kind="stable")
    return EigenPairs(values=diag[order].copy(), vectors=vec[:, order].copy())


def generalized_sym_eigen(a_mat, b_mat, max_sweeps: int = JACOBI_SWEEP_BUDGET) -> EigenPairs:
    """Solve A x = lambda B x for symmetric A and positive definite B.

    Reduction is B = L L^T, C = L^{-1} A L^{-T}, then cyclic Jacobi on C;
    vectors are mapped back through L^{-T} so they are B-orthonormal. A
    symmetric diagonal pre-scaling (unit diagonal of B) is applied first;
    it is an exact congruence and only improves conditioning.
    """
    a = _as_sym(a_mat).entries
    b = _as_sym(b_mat).entries
    if a.shape != b.shape:
        raise ValidationError(f"operand orders differ: {a.shape[0]} vs {b.shape[0]}")
    diag = b.diagonal()
    if np.all(diag > 0.0):
        d = 1.0 / np.sqrt(diag)
    else:
        d = np.ones_like(diag)  # not positive definite; let the pivot check say so
    scale = np.outer(d, d)
    a_s = np.ascontiguousarray(a * scale)
    b_s = np.ascontiguousarray(b * scale)
    n = b.shape[0]
    maxdiag = float(np.max(b_s.diagonal())) if n else 0.0
    low, bad = _kernels.cholesky_lower(b_s, n * PIVOT_RELATIVE * maxdiag)
    if bad >= 0:
        raise NotPositiveDefinite(
            f"pivot {bad + 1} of {n} at or below threshold; right operand not positive definite"
        )
    half = _kernels.solve_lower(low, a_s)
    c = _kernels.solve_lower(low, np.ascontiguousarray(half.T))
    c = np.ascontiguousarray((c + c.T) / 2.0)
    norm = float(np.linalg.norm(c))
    diag_c, vec, sweeps = _kernels.jacobi_eigh(c, JACOBI_TARGET * norm, max_sweeps)
    if sweeps < 0:
        raise NoConvergence(
            f"cyclic Jacobi missed its off-diagonal target after {max_sweeps} sweeps"
        )
    x = _kernels.solve_lower_t(low, vec)
    x = x * d[:, None]
    order = np.argsort(diag_c, kind="stable")
    return EigenPairs(values=diag_c[order].copy(), vectors=np.ascontiguousarray(x[:, order]))
