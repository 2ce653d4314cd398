"""Small dense linear programs on top of the simplex kernel.

The kernel is picked at import time: the compiled ``_simplex`` extension when
it was built, the numpy implementation otherwise. Setting the environment
variable ``INFCONVKIT_BACKEND=python`` forces the fallback.
"""
import os
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import _simplex_py

try:
    from . import _simplex as _compiled
except ImportError:  # extension not built
    _compiled = None

PIVOT_TOL = 1e-10
MAX_PIVOTS = 10_000

_STATUS = {0: "optimal", 1: "infeasible", 2: "unbounded"}

_KERNELS = {"python": _simplex_py.simplex_solve}
if _compiled is not None:
    _KERNELS["compiled"] = _compiled.simplex_solve

if os.environ.get("INFCONVKIT_BACKEND", "").lower() == "python" or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"
_kernel = _KERNELS[BACKEND]


class LPCyclingError(RuntimeError):
    """The pivot budget ran out. With Bland's rule this signals a bug."""


def available_backends():
    return sorted(_KERNELS)


def set_backend(name):
    """Switch the simplex kernel globally; returns the previous backend name."""
    global BACKEND, _kernel
    if name not in _KERNELS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {available_backends()}")
    previous = BACKEND
    BACKEND, _kernel = name, _KERNELS[name]
    return previous


@contextmanager
def backend(name):
    previous = set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


@dataclass(frozen=True)
class LPResult:
    status: str
    x: np.ndarray
    fun: float
    pivots: int

    @property
    def success(self):
        return self.status == "optimal"


def solve_standard(c, A, b, *, feas_tol=None, tol=PIVOT_TOL, max_pivots=MAX_PIVOTS):
    """Minimize ``c @ x`` s.t. ``A @ x == b``, ``x >= 0``.

    ``feas_tol`` is the phase-1 threshold: the problem is infeasible when the
    least total constraint violation exceeds it. Defaults to
    ``1e-9 * (1 + max|b|)``. Inputs in ``np.longdouble`` are solved in
    extended precision by either kernel.
    """
    b = np.asarray(b)
    if b.dtype != np.longdouble:
        b = b.astype(float)
    if feas_tol is None:
        feas_tol = 1e-9 * (1.0 + (float(np.abs(b).max()) if b.size else 0.0))
    status, x, fun, pivots = _kernel(A, b, c, tol, feas_tol, max_pivots)
    if status == 3:
        raise LPCyclingError(f"simplex exceeded {max_pivots} pivots")
    return LPResult(_STATUS[status], x, fun, pivots)


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None, *, feas_tol=None):
    """General small LP, reduced to standard form.

    ``bounds`` is a list of ``(lo, hi)`` pairs with ``None`` for an infinite
    side; the default is ``(0, None)`` for every variable.
    """
    c = np.asarray(c, dtype=float)
    nv = c.size
    if bounds is None:
        bounds = [(0.0, None)] * nv

    # x = x0 + M u with u >= 0
    cols = []
    x0 = np.zeros(nv)
    upper_rows = []
    for j, (lo, hi) in enumerate(bounds):
        if lo is not None:
            x0[j] = lo
            cols.append((j, 1.0))
            if hi is not None:
                upper_rows.append((len(cols) - 1, hi - lo))
        elif hi is not None:
            x0[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    nu = len(cols)
    M = np.zeros((nv, nu))
    for k, (j, s) in enumerate(cols):
        M[j, k] = s

    blocks, rhs, n_slack = [], [], 0
    if A_ub is not None and len(A_ub):
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        blocks.append(("ub", A_ub @ M))
        rhs.append(np.asarray(b_ub, dtype=float) - A_ub @ x0)
        n_slack += A_ub.shape[0]
    if upper_rows:
        U = np.zeros((len(upper_rows), nu))
        for r, (k, _) in enumerate(upper_rows):
            U[r, k] = 1.0
        blocks.append(("ub", U))
        rhs.append(np.array([w for _, w in upper_rows]))
        n_slack += len(upper_rows)
    if A_eq is not None and len(A_eq):
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        blocks.append(("eq", A_eq @ M))
        rhs.append(np.asarray(b_eq, dtype=float) - A_eq @ x0)

    rows = sum(B.shape[0] for _, B in blocks)
    A = np.zeros((rows, nu + n_slack))
    r = s = 0
    for kind, B in blocks:
        k = B.shape[0]
        A[r:r + k, :nu] = B
        if kind == "ub":
            A[r:r + k, nu + s:nu + s + k] = np.eye(k)
            s += k
        r += k
    b = np.concatenate(rhs) if rhs else np.zeros(0)
    cu = np.concatenate([M.T @ c, np.zeros(n_slack)])

    res = solve_standard(cu, A, b, feas_tol=feas_tol)
    x = x0 + M @ res.x[:nu]
    fun = float(c @ x) if res.success else res.fun
    return LPResult(res.status, x, fun, res.pivots)
