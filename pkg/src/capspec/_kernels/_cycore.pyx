# cython: language_level=3
"""Compiled kernel implementations.

Function-for-function twin of the numpy fallback: same rotation ordering,
pivot rules, and update formulas, with the inner loops in C. Results agree
with the fallback to roundoff (numpy dot products accumulate in a different
order), which the cross-backend parity test pins down.
"""

from libc.math cimport sqrt, fabs, copysign

import numpy as np

cimport numpy as cnp

cnp.import_array()


def cholesky_lower(b, double threshold):
    """Row-by-row Cholesky of symmetric b.

    Returns (L, i) where i == -1 on success; otherwise i is the index of the
    first pivot that fell at or below threshold (L is then partial garbage).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = bb.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] low = np.zeros((n, n), dtype=np.float64)
    cdef Py_ssize_t i, j, k
    cdef double acc, pivot, d
    for i in range(n):
        acc = 0.0
        for k in range(i):
            acc += low[i, k] * low[i, k]
        pivot = bb[i, i] - acc
        if pivot <= threshold:
            return np.asarray(low), i
        d = sqrt(pivot)
        low[i, i] = d
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(i):
                acc += low[j, k] * low[i, k]
            low[j, i] = (bb[j, i] - acc) / d
    return np.asarray(low), -1


def jacobi_eigh(c, double off_target, int max_sweeps):
    """Cyclic Jacobi diagonalization of symmetric c.

    Sweeps row-major over the strict upper triangle; convergence is checked
    against the off-diagonal Frobenius norm at the top of each sweep. Returns
    (diag, V, sweeps) with V accumulating the rotations columnwise; sweeps is
    -1 when the budget ran out before the target was met.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.array(c, dtype=np.float64, copy=True, order="C")
    cdef Py_ssize_t n = a.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] vec = np.eye(n, dtype=np.float64)
    if n < 2:
        return np.diagonal(a).copy(), np.asarray(vec), 0
    cdef double skip = off_target / (4.0 * n)
    cdef Py_ssize_t sweep, p, q, k
    cdef double off, apq, app, aqq, theta, t, cs, sn, xp, xq
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += a[p, q] * a[p, q]
        off = sqrt(off)
        if off <= off_target:
            return np.diagonal(a).copy(), np.asarray(vec), sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if fabs(apq) <= skip:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                cs = 1.0 / sqrt(t * t + 1.0)
                sn = t * cs
                for k in range(n):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = cs * xp - sn * xq
                    a[k, q] = sn * xp + cs * xq
                for k in range(n):
                    a[p, k] = a[k, p]
                    a[q, k] = a[k, q]
                a[p, p] = cs * cs * app - 2.0 * sn * cs * apq + sn * sn * aqq
                a[q, q] = sn * sn * app + 2.0 * sn * cs * apq + cs * cs * aqq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    xp = vec[k, p]
                    xq = vec[k, q]
                    vec[k, p] = cs * xp - sn * xq
                    vec[k, q] = sn * xp + cs * xq
    return np.diagonal(a).copy(), np.asarray(vec), -1


def solve_lower(low, m):
    """Forward substitution: returns low^{-1} m (m may have many columns)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ll = np.ascontiguousarray(low, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x2
    m_arr = np.array(m, dtype=np.float64, copy=True, order="C")
    one_dim = m_arr.ndim == 1
    x2 = m_arr.reshape(m_arr.shape[0], -1)
    cdef Py_ssize_t n = ll.shape[0]
    cdef Py_ssize_t cols = x2.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc
    for j in range(cols):
        for i in range(n):
            acc = 0.0
            for k in range(i):
                acc += ll[i, k] * x2[k, j]
            x2[i, j] = (x2[i, j] - acc) / ll[i, i]
    out = np.asarray(x2)
    return out[:, 0] if one_dim else out


def solve_lower_t(low, m):
    """Back substitution with the transpose: returns low^{-T} m."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ll = np.ascontiguousarray(low, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x2
    m_arr = np.array(m, dtype=np.float64, copy=True, order="C")
    one_dim = m_arr.ndim == 1
    x2 = m_arr.reshape(m_arr.shape[0], -1)
    cdef Py_ssize_t n = ll.shape[0]
    cdef Py_ssize_t cols = x2.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc
    for j in range(cols):
        for i in range(n - 1, -1, -1):
            acc = 0.0
            for k in range(i + 1, n):
                acc += ll[k, i] * x2[k, j]
            x2[i, j] = (x2[i, j] - acc) / ll[i, i]
    out = np.asarray(x2)
    return out[:, 0] if one_dim else out
