"""Pure numpy two-phase dense simplex with Bland's anti-cycling rule.

This is the fallback used when the compiled ``_simplex`` extension is not
available. Both kernels implement the same algorithm step for step:

* rows with negative right-hand side are negated, one artificial per row;
* phase 1 minimizes the sum of artificials; the problem is declared
  infeasible when that optimum exceeds ``feas_tol``;
* artificials left in the basis are pivoted out on the largest available
  entry, rows where that is impossible are redundant and stay inert;
* phase 2 minimizes ``c @ x`` over the original columns only.

Entering column: lowest index with reduced cost below ``-tol``. Leaving row:
minimum ratio, ties broken by the lowest basic variable index.
"""
import numpy as np

OPTIMAL, INFEASIBLE, UNBOUNDED, PIVOT_LIMIT = 0, 1, 2, 3
# relative width of a ratio-test tie in float64; scaled by eps for other dtypes
TIE_TOL = 1e-12


def _pivot(T, r, q):
    T[r] /= T[r, q]
    col = T[:, q].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    T[:, q] = 0.0
    T[r, q] = 1.0


def _iterate(T, basis, n_enter, tol, pivots, max_pivots, tie_tol=TIE_TOL):
    m = T.shape[0] - 1
    while True:
        cand = np.flatnonzero(T[m, :n_enter] < -tol)
        if cand.size == 0:
            return OPTIMAL, pivots
        q = cand[0]
        r = -1
        best = 0.0
        for i in range(m):
            a = T[i, q]
            if a > tol:
                ratio = T[i, -1] / a
                if r < 0:
                    r, best = i, ratio
                else:
                    tie = tie_tol * (1.0 + abs(best))
                    if ratio < best - tie:
                        r, best = i, ratio
                    elif ratio <= best + tie and basis[i] < basis[r]:
                        r = i
                        best = min(best, ratio)
        if r < 0:
            return UNBOUNDED, pivots
        _pivot(T, r, q)
        basis[r] = q
        pivots += 1
        if pivots > max_pivots:
            return PIVOT_LIMIT, pivots


def simplex_solve(A, b, c, tol=1e-10, feas_tol=1e-9, max_pivots=10000):
    """Minimize ``c @ x`` subject to ``A @ x == b`` and ``x >= 0``.

    Returns ``(status, x, value, pivots)`` with status 0 optimal,
    1 infeasible, 2 unbounded, 3 pivot budget exceeded.
    """
    # float64 unless the caller passes extended-precision arrays
    dt = np.result_type(A, b, c, np.float64)
    A = np.asarray(A, dtype=dt)
    b = np.asarray(b, dtype=dt)
    c = np.asarray(c, dtype=dt)
    m, n = A.shape
    x = np.zeros(n, dtype=dt)
    tie_tol = TIE_TOL * float(np.finfo(dt).eps / np.finfo(np.float64).eps)
    if m == 0:
        if np.any(c < -tol):
            return UNBOUNDED, x, -np.inf, 0
        return OPTIMAL, x, 0.0, 0

    sign = np.where(b >= 0.0, 1.0, -1.0)
    T = np.zeros((m + 1, n + m + 1), dtype=dt)
    T[:m, :n] = sign[:, None] * A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = sign * b
    T[m, :n] = -T[:m, :n].sum(axis=0)
    T[m, -1] = -T[:m, -1].sum()
    basis = np.arange(n, n + m)

    status, pivots = _iterate(T, basis, n, tol, 0, max_pivots, tie_tol)
    if status == PIVOT_LIMIT:
        return PIVOT_LIMIT, x, np.nan, pivots
    if -T[m, -1] > feas_tol:
        return INFEASIBLE, x, np.inf, pivots

    for i in range(m):
        if basis[i] >= n and n > 0:
            j = int(np.argmax(np.abs(T[i, :n])))
            if abs(T[i, j]) > tol:
                T[i, -1] = 0.0
                _pivot(T, i, j)
                basis[i] = j

    T[m, :] = 0.0
    T[m, :n] = c
    for i in range(m):
        if basis[i] < n and c[basis[i]] != 0.0:
            T[m] -= c[basis[i]] * T[i]

    status, pivots = _iterate(T, basis, n, tol, pivots, max_pivots, tie_tol)
    if status == PIVOT_LIMIT:
        return PIVOT_LIMIT, x, np.nan, pivots
    if status == UNBOUNDED:
        return UNBOUNDED, x, -np.inf, pivots

    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = max(T[i, -1], 0.0)
    return OPTIMAL, x, float(c @ x), pivots
