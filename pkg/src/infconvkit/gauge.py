"""Minkowski gauge of a convex body: rho_F(x) = inf{t >= 0 : x in tF}."""
from dataclasses import dataclass
import math

import numpy as np

from . import lp
from .convex_bodies import (
    DEFAULT_TOL, ConvexBody, NormBall, Singleton, VPolytope, as_vector, pnorm, support,
    support_many,
)
from .errors import InputError

#: phase-1 threshold of the gauge LP, scaled by (1 + |x|) on the unit-normalized point
GAUGE_FEAS_TOL = 1e-8
SINGLETON_TOL = 1e-9
# keeps x/hi well above contains_tol so membership stays meaningful
BISECTION_DOUBLINGS = 20
# phase-1 threshold of the bisection oracle, relative to the tableau scale
EXTENDED_FEAS_TOL = 1e-18
# relative bracket width below which the oracle switches to extended precision
EXTENDED_SWITCH = 1e-10
PIVOT_TOL = 1e-13


class GaugeLPError(RuntimeError):
    """The gauge LP came back unbounded, which a bounded F cannot produce."""


@dataclass(frozen=True, eq=False)
class Gauge:
    """Gauge of ``body``.

    ``zero_body_constant`` is the coercivity constant reported when F = {0};
    any positive number is valid there since the gauge is then the indicator
    of the origin.
    """

    body: ConvexBody
    zero_body_constant: float = 1.0

    def __post_init__(self):
        if not (self.zero_body_constant > 0 and math.isfinite(self.zero_body_constant)):
            raise InputError("zero_body_constant must be a positive real")

    @property
    def dim(self):
        return self.body.dim

    def __call__(self, x):
        return gauge_eval(self, x)


def _vpolytope_gauge(F, u):
    # substituting mu_i = t * lam_i turns inf{t : u in tF} into
    # min sum(mu) s.t. V^T mu = u, mu >= 0
    k = F.vertices.shape[0]
    feas_tol = GAUGE_FEAS_TOL * (1.0 + float(np.linalg.norm(u)))
    res = lp.solve_standard(np.ones(k), F._vt, u, feas_tol=feas_tol)
    if res.status == "infeasible":
        return math.inf
    if res.status == "unbounded":
        raise GaugeLPError(f"gauge LP unbounded for {F!r}")
    return res.fun


def gauge_eval(g, x):
    """Exact gauge value; ``math.inf`` outside the cone generated by F."""
    F = g.body
    x = as_vector(x, F.dim)
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        return 0.0
    if isinstance(F, NormBall):
        return pnorm(x, F.p) / F.radius
    if isinstance(F, Singleton):
        v = F.point
        vv = float(v @ v)
        slack = SINGLETON_TOL * (1.0 + nx)
        if vv == 0.0:
            return 0.0 if nx <= slack else math.inf
        t = max(float(x @ v) / vv, 0.0)
        return t if float(np.linalg.norm(x - t * v)) <= slack else math.inf
    if isinstance(F, VPolytope):
        # the gauge is positively homogeneous, so solve on the unit sphere
        return nx * _vpolytope_gauge(F, x / nx)
    raise InputError(f"unsupported body {F!r}")


def gauge_eval_many(g, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    F = g.body
    if isinstance(F, NormBall):
        return np.linalg.norm(X, ord=F.p, axis=1) / F.radius
    return np.array([gauge_eval(g, x) for x in X])


def gauge_eval_bisection(g, x, tol=1e-8, contains_tol=1e-12):
    """Independent gauge oracle: bisection on t using only membership x/t in F."""
    if tol <= 0:
        raise InputError("tol must be positive")
    F = g.body
    x = as_vector(x, F.dim)
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        return 0.0
    m = coercivity_constant(g)
    # x in t conv(F u {0}) iff x in sF for some s <= t, so bisect on the hull:
    # same infimum, and membership is monotone in t even when 0 is not in F
    G = F.generators()
    if G is not None:
        F = VPolytope(np.vstack([G, np.zeros(F.dim)]))

    member, refine = _membership(F, x, nx, contains_tol)
    hi = 10.0 * m * nx  # rho(x) >= m nx
    for _ in range(BISECTION_DOUBLINGS):
        if member(hi):
            break
        hi *= 2.0
    else:
        return math.inf
    lo, hi = _bisect(member, 0.0, hi, lambda lo, hi: max(tol * max(1.0, hi), EXTENDED_SWITCH * hi))
    if refine is not member:
        # float64 decisions can be wrong close to the boundary; re-bracket before refining
        w = EXTENDED_SWITCH * hi
        while not refine(hi):
            lo, hi, w = hi, hi + w, 2.0 * w
        while lo > 0.0 and refine(lo):
            lo, hi, w = max(lo - w, 0.0), lo, 2.0 * w
    return _bisect(refine, lo, hi, lambda lo, hi: tol * max(1.0, hi))[1]


def _bisect(test, lo, hi, width):
    # invariant: test(hi) holds and test(lo) fails (or lo = 0)
    while hi - lo > width(lo, hi):
        mid = 0.5 * (lo + hi)
        if mid > 0.0 and test(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def _membership(F, x, nx, contains_tol):
    """(float64 test, final-stage test) for x in tF."""
    if not isinstance(F, VPolytope):
        def member(t):
            return F.contains(x / t, contains_tol)
        return member, member
    # test x in tF rather than x/t in F so the tolerance lives on the scale of x:
    # sum_i lam_i t v_i = x, sum_i lam_i = 1, lam >= 0
    k, n = F.vertices.shape
    vt = F._vt
    A = np.ones((n + 1, k))
    b = np.append(x, 1.0)
    c = np.zeros(k)
    feas64 = max(contains_tol, 1e-12)

    def member(t):
        A[:-1] = t * vt
        return lp.solve_standard(c, A, b, feas_tol=feas64).status == "optimal"

    # a float64 decision is only good to about eps * t * |V|, i.e. eps * rho^2 in
    # the gauge, so the last bisection steps decide in extended precision
    A_ext = A.astype(np.longdouble)
    vt_ext = vt.astype(np.longdouble)
    b_ext = b.astype(np.longdouble)
    c_ext = c.astype(np.longdouble)
    vmax = float(np.abs(F.vertices).max())

    def refine(t):
        A_ext[:-1] = t * vt_ext
        feas = EXTENDED_FEAS_TOL * (1.0 + nx + t * vmax)
        return lp.solve_standard(c_ext, A_ext, b_ext, feas_tol=feas, tol=PIVOT_TOL).status == "optimal"

    return member, refine


def coercivity_constant(g):
    """m with m*|x| <= rho_F(x) everywhere: 1/||F||, or the configured constant for F = {0}."""
    if g.body.is_zero():
        return g.zero_body_constant
    return 1.0 / g.body.body_norm()


def polar_contains(g, xstar, tol=DEFAULT_TOL):
    """Exact membership of ``xstar`` in the subdifferential of rho_F at 0 (the polar of F)."""
    if tol < 0:
        raise InputError("tol must be nonnegative")
    return support(g.body, xstar) <= 1.0 + tol


def polar_contains_many(g, covectors, tol=DEFAULT_TOL):
    return support_many(g.body, covectors) <= 1.0 + tol
