# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled two-phase dense simplex (Bland's rule).

Mirrors ``_simplex_py.simplex_solve`` exactly; see that module for the
algorithm description. Works in double precision, or in long double when
any input array is ``np.longdouble``.
"""
import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()

ctypedef fused real:
    double
    long double

cdef enum:
    OPTIMAL = 0
    INFEASIBLE = 1
    UNBOUNDED = 2
    PIVOT_LIMIT = 3

TIE_TOL = 1e-12


cdef inline real _abs(real v) noexcept nogil:
    return -v if v < 0 else v


cdef inline void _pivot(real* T, Py_ssize_t nrow, Py_ssize_t ncol,
                        Py_ssize_t r, Py_ssize_t q) noexcept nogil:
    cdef real piv = T[r * ncol + q]
    cdef real f
    cdef Py_ssize_t i, j
    cdef real* row_r = T + r * ncol
    cdef real* row_i
    for j in range(ncol):
        row_r[j] /= piv
    for i in range(nrow):
        if i == r:
            continue
        row_i = T + i * ncol
        f = row_i[q]
        if f != 0.0:
            for j in range(ncol):
                row_i[j] -= f * row_r[j]
            row_i[q] = 0.0


cdef int _iterate(real* T, Py_ssize_t m, Py_ssize_t ncol, Py_ssize_t n_enter,
                  Py_ssize_t* basis, double tol, double tie_tol, int* pivots,
                  int max_pivots) noexcept nogil:
    cdef Py_ssize_t rhs = ncol - 1
    cdef Py_ssize_t i, j, q, r
    cdef real a, ratio, best, tie
    cdef real* obj = T + m * ncol
    while True:
        q = -1
        for j in range(n_enter):
            if obj[j] < -tol:
                q = j
                break
        if q < 0:
            return OPTIMAL
        r = -1
        best = 0.0
        for i in range(m):
            a = T[i * ncol + q]
            if a > tol:
                ratio = T[i * ncol + rhs] / a
                if r < 0:
                    r = i
                    best = ratio
                else:
                    tie = tie_tol * (1.0 + _abs(best))
                    if ratio < best - tie:
                        r = i
                        best = ratio
                    elif ratio <= best + tie and basis[i] < basis[r]:
                        r = i
                        if ratio < best:
                            best = ratio
        if r < 0:
            return UNBOUNDED
        _pivot(T, m + 1, ncol, r, q)
        basis[r] = q
        pivots[0] += 1
        if pivots[0] > max_pivots:
            return PIVOT_LIMIT


cdef int _solve(const real[:, ::1] Am, const real[::1] bv, const real[::1] cv, real[:, ::1] Tarr, real[::1] x,
                Py_ssize_t[::1] barr, double tol, double feas_tol, double tie_tol, int max_pivots,
                int* pivots) noexcept:
    cdef Py_ssize_t m = Am.shape[0]
    cdef Py_ssize_t n = Am.shape[1]
    cdef Py_ssize_t ncol = n + m + 1
    cdef Py_ssize_t rhs = ncol - 1
    cdef Py_ssize_t i, j, best_j
    cdef real s, big, cb
    cdef int status
    cdef real* T = &Tarr[0, 0]
    cdef Py_ssize_t* basis = &barr[0]
    cdef real* obj = T + m * ncol

    for i in range(m):
        s = 1.0 if bv[i] >= 0.0 else -1.0
        for j in range(n):
            T[i * ncol + j] = s * Am[i, j]
        T[i * ncol + n + i] = 1.0
        T[i * ncol + rhs] = s * bv[i]
        basis[i] = n + i
    for j in range(n):
        s = 0.0
        for i in range(m):
            s += T[i * ncol + j]
        obj[j] = -s
    s = 0.0
    for i in range(m):
        s += T[i * ncol + rhs]
    obj[rhs] = -s

    with nogil:
        status = _iterate(T, m, ncol, n, basis, tol, tie_tol, pivots, max_pivots)
    if status == PIVOT_LIMIT:
        return PIVOT_LIMIT
    if -obj[rhs] > feas_tol:
        return INFEASIBLE

    # drive remaining artificials out of the basis; rows that cannot pivot are redundant
    for i in range(m):
        if basis[i] >= n:
            best_j = -1
            big = tol
            for j in range(n):
                if _abs(T[i * ncol + j]) > big:
                    big = _abs(T[i * ncol + j])
                    best_j = j
            if best_j >= 0:
                T[i * ncol + rhs] = 0.0
                _pivot(T, m + 1, ncol, i, best_j)
                basis[i] = best_j

    for j in range(ncol):
        obj[j] = 0.0
    for j in range(n):
        obj[j] = cv[j]
    for i in range(m):
        if basis[i] < n:
            cb = cv[basis[i]]
            if cb != 0.0:
                for j in range(ncol):
                    obj[j] -= cb * T[i * ncol + j]

    with nogil:
        status = _iterate(T, m, ncol, n, basis, tol, tie_tol, pivots, max_pivots)
    if status != OPTIMAL:
        return status

    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i * ncol + rhs] if T[i * ncol + rhs] > 0.0 else 0.0
    return OPTIMAL


def simplex_solve(A, b, c, double tol=1e-10, double feas_tol=1e-9,
                  int max_pivots=10000):
    """Minimize ``c @ x`` subject to ``A @ x == b`` and ``x >= 0``.

    Returns ``(status, x, value, pivots)`` with status 0 optimal,
    1 infeasible, 2 unbounded, 3 pivot budget exceeded.
    """
    dt = np.result_type(A, b, c, np.float64)
    if dt != np.longdouble:
        dt = np.float64
    Am = np.ascontiguousarray(A, dtype=dt)
    bv = np.ascontiguousarray(b, dtype=dt)
    cv = np.ascontiguousarray(c, dtype=dt)
    cdef Py_ssize_t m = Am.shape[0]
    cdef Py_ssize_t n = Am.shape[1]
    cdef int pivots = 0
    cdef int status
    x = np.zeros(n, dtype=dt)

    if m == 0:
        if np.any(cv < -tol):
            return UNBOUNDED, x, -np.inf, 0
        return OPTIMAL, x, 0.0, 0

    T = np.zeros((m + 1, n + m + 1), dtype=dt)
    basis = np.empty(m, dtype=np.intp)
    tie_tol = TIE_TOL * float(np.finfo(dt).eps / np.finfo(np.float64).eps)
    if dt == np.float64:
        status = _solve[double](Am, bv, cv, T, x, basis, tol, feas_tol, tie_tol, max_pivots, &pivots)
    else:
        status = _solve[cython.longdouble](Am, bv, cv, T, x, basis, tol, feas_tol, tie_tol, max_pivots, &pivots)
    if status == PIVOT_LIMIT:
        return PIVOT_LIMIT, x, np.nan, pivots
    if status == INFEASIBLE:
        return INFEASIBLE, x, np.inf, pivots
    if status == UNBOUNDED:
        return UNBOUNDED, x, -np.inf, pivots
    return OPTIMAL, x, float(cv @ x), pivots
