"""Infimal convolution T(x) = inf_y phi(y - x) + f(y) and its presets.

Three evaluation strategies:

``ExactEnumeration``
    f has a finite effective domain; the infimum is a minimum over it.
``ConvexProgram``
    f is the indicator (or zero-perturbed indicator) of a finite union of
    polyhedra and phi is a polyhedral gauge or a Euclidean norm. Each convex
    piece is solved exactly: an LP for polyhedral phi, an active-set
    projection for the Euclidean norm.
``GridSearch``
    anything else, on caller-supplied bounds; the value is an upper bound
    and is flagged approximate.
"""
from dataclasses import dataclass, field
import itertools
import math
import warnings

import numpy as np

from . import lp
from .convex_bodies import NormBall, as_vector
from .errors import InputError
from .fields import (
    GaugeField, HalfspaceIntersection, Indicator, NormField, Perturbed, PointCloud, ScalarField,
    VPolytopeRegion, Zero, field_eval, finite_support,
)
from .gauge import Gauge

PHI_ZERO_TOL = 1e-12
DEFAULT_SLACK = 1e-9
PROGRAM_FEAS_TOL = 1e-11
CANDIDATE_TOL = 1e-12


@dataclass(frozen=True)
class ExactEnumeration:
    pass


@dataclass(frozen=True)
class ConvexProgram:
    pass


@dataclass(frozen=True, eq=False)
class GridSearch:
    lower: np.ndarray
    upper: np.ndarray
    resolution: int = 64
    refinement_levels: int = 3

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(-1)
        hi = np.asarray(self.upper, dtype=float).reshape(-1)
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise InputError("GridSearch bounds need lower < upper componentwise")
        if self.resolution < 1 or self.refinement_levels < 0:
            raise InputError("GridSearch needs resolution >= 1 and refinement_levels >= 0")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)


class DomainUnreachableWarning(UserWarning):
    pass


@dataclass(frozen=True)
class InfConvValue:
    value: float
    minimizers: list
    slack: float
    approximate: bool = False


# --------------------------------------------------------------------------- phi classification


def _phi_shape(phi):
    """('poly', G) when phi is the gauge of conv(G); ('euclid', w) when phi = w * |.|_2; else None."""
    if isinstance(phi, GaugeField):
        F = phi.gauge.body
        if isinstance(F, NormBall) and F.p == 2:
            return "euclid", 1.0 / F.radius
        G = F.generators()
        return ("poly", G) if G is not None else None
    if isinstance(phi, NormField) and not np.any(phi.center) and phi.weight > 0:
        if phi.p == 2:
            return "euclid", phi.weight
        ball = NormBall(phi.p, 1.0 / phi.weight, phi.dim)
        return "poly", ball.generators()
    return None


def _indicator_region(f):
    if isinstance(f, Indicator):
        return f.region
    if isinstance(f, Perturbed) and isinstance(f.J, Zero):
        return f.region
    return None


def _program_supported(phi, f):
    region = _indicator_region(f)
    if region is None or _phi_shape(phi) is None:
        return False
    return all(isinstance(p, (PointCloud, HalfspaceIntersection, VPolytopeRegion)) for p in region.parts())


def default_strategy(phi, f):
    if finite_support(f) is not None:
        return ExactEnumeration()
    if _program_supported(phi, f):
        return ConvexProgram()
    raise InputError("no exact strategy for this (phi, f); pass GridSearch bounds explicitly")


# --------------------------------------------------------------------------- exact convex pieces


class _PolyHalfspace:
    # min sum(mu) s.t. A (x + G^T mu) <= b, mu >= 0
    def __init__(self, part, G):
        self.A, self.b, self.G = part.A, part.b, G
        AG = part.A @ G.T
        m, k = AG.shape
        self.M = np.hstack([AG, np.eye(m)])
        self.c = np.concatenate([np.ones(k), np.zeros(m)])
        self.k = k

    def solve(self, x):
        rhs = self.b - self.A @ x
        res = lp.solve_standard(self.c, self.M, rhs, feas_tol=PROGRAM_FEAS_TOL * (1.0 + np.abs(rhs).max()))
        if res.status != "optimal":
            return math.inf, None
        mu = res.x[:self.k]
        return res.fun, x + self.G.T @ mu


class _PolyVPolytope:
    # min sum(mu) s.t. G^T mu - W^T lam = -x, sum(lam) = 1, mu, lam >= 0
    def __init__(self, part, G):
        W = part.vertices
        n, k, q = W.shape[1], len(G), len(W)
        M = np.zeros((n + 1, k + q))
        M[:n, :k] = G.T
        M[:n, k:] = -W.T
        M[n, k:] = 1.0
        self.M, self.W, self.k = M, W, k
        self.c = np.concatenate([np.ones(k), np.zeros(q)])

    def solve(self, x):
        rhs = np.append(-x, 1.0)
        res = lp.solve_standard(self.c, self.M, rhs, feas_tol=PROGRAM_FEAS_TOL * (1.0 + np.abs(rhs).max()))
        if res.status != "optimal":
            return math.inf, None
        return res.fun, self.W.T @ res.x[self.k:]


class _EuclidHalfspace:
    """Projection onto {A y <= b} by enumerating independent active sets of size <= n."""

    def __init__(self, part, weight):
        self.A, self.b, self.w = part.A, part.b, weight
        m, n = part.A.shape
        self.maps = [(np.array([], dtype=int), None)]
        for size in range(1, min(m, n) + 1):
            for S in itertools.combinations(range(m), size):
                AS = part.A[list(S)]
                gram = AS @ AS.T
                if np.linalg.matrix_rank(gram) < size:
                    continue
                self.maps.append((np.array(S), AS.T @ np.linalg.inv(gram)))

    def solve_many(self, X):
        best = np.full(len(X), math.inf)
        arg = np.full(X.shape, np.nan)
        for S, P in self.maps:
            Y = X if P is None else X - (X @ self.A[S].T - self.b[S]) @ P.T
            tol = CANDIDATE_TOL * (1.0 + np.abs(self.b).max() + np.abs(Y).max(axis=1, initial=0.0)[:, None])
            ok = np.all(Y @ self.A.T <= self.b + tol, axis=1)
            d = np.where(ok, np.linalg.norm(Y - X, axis=1), math.inf)
            better = d < best
            best[better] = d[better]
            arg[better] = Y[better]
        return self.w * best, arg

    def solve(self, x):
        v, Y = self.solve_many(x[None, :])
        return float(v[0]), (Y[0] if math.isfinite(v[0]) else None)


class _EuclidVPolytope:
    """Projection onto conv(W) by enumerating affinely independent vertex subsets."""

    def __init__(self, part, weight):
        W = part.vertices
        n = W.shape[1]
        self.w = weight
        self.maps = []
        for size in range(1, min(len(W), n + 1) + 1):
            for S in itertools.combinations(range(len(W)), size):
                w0 = W[S[0]]
                B = (W[list(S[1:])] - w0).T
                if size > 1:
                    if np.linalg.matrix_rank(B) < size - 1:
                        continue
                    pinv = np.linalg.inv(B.T @ B) @ B.T
                else:
                    pinv = None
                self.maps.append((w0, B, pinv))

    def solve_many(self, X):
        best = np.full(len(X), math.inf)
        arg = np.full(X.shape, np.nan)
        for w0, B, pinv in self.maps:
            if pinv is None:
                Y = np.repeat(w0[None, :], len(X), axis=0)
                ok = np.ones(len(X), dtype=bool)
            else:
                C = (X - w0) @ pinv.T
                lam0 = 1.0 - C.sum(axis=1)
                ok = (C >= -CANDIDATE_TOL).all(axis=1) & (lam0 >= -CANDIDATE_TOL)
                Y = w0 + C @ B.T
            d = np.where(ok, np.linalg.norm(Y - X, axis=1), math.inf)
            better = d < best
            best[better] = d[better]
            arg[better] = Y[better]
        return self.w * best, arg

    def solve(self, x):
        v, Y = self.solve_many(x[None, :])
        return float(v[0]), (Y[0] if math.isfinite(v[0]) else None)


def _build_pieces(phi, region):
    kind, data = _phi_shape(phi)
    pieces = []
    for part in region.parts():
        if isinstance(part, PointCloud):
            pieces.append(("cloud", part.points))
        elif kind == "poly":
            cls = _PolyHalfspace if isinstance(part, HalfspaceIntersection) else _PolyVPolytope
            pieces.append(("solver", cls(part, np.atleast_2d(data))))
        else:
            cls = _EuclidHalfspace if isinstance(part, HalfspaceIntersection) else _EuclidVPolytope
            pieces.append(("solver", cls(part, data)))
    return pieces


# --------------------------------------------------------------------------- the convolution


@dataclass(frozen=True, eq=False)
class InfConvolution:
    """T(x) = inf_y phi(y - x) + f(y); requires phi(0) = 0."""

    phi: ScalarField
    f: ScalarField
    strategy: object = None
    _pieces: list = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.phi.dim != self.f.dim:
            raise InputError(f"phi has dimension {self.phi.dim} but f has {self.f.dim}")
        phi0 = field_eval(self.phi, np.zeros(self.phi.dim))
        if not abs(phi0) <= PHI_ZERO_TOL:
            raise InputError(f"phi(0) must be 0, got {phi0}")
        strategy = self.strategy if self.strategy is not None else default_strategy(self.phi, self.f)
        if isinstance(strategy, ExactEnumeration) and finite_support(self.f) is None:
            raise InputError("ExactEnumeration needs f with a finite effective domain")
        if isinstance(strategy, ConvexProgram):
            if not _program_supported(self.phi, self.f):
                raise InputError("ConvexProgram needs an indicator of polyhedra and a polyhedral or Euclidean phi")
            object.__setattr__(self, "_pieces", _build_pieces(self.phi, _indicator_region(self.f)))
        if isinstance(strategy, GridSearch) and strategy.lower.size != self.f.dim:
            raise InputError("GridSearch bounds have the wrong dimension")
        object.__setattr__(self, "strategy", strategy)

    @property
    def dim(self):
        return self.f.dim

    @property
    def approximate(self):
        return isinstance(self.strategy, GridSearch)

    def __call__(self, x):
        return infconv_eval(self, x).value

    def values(self, X):
        """T at each row of X (value only)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if isinstance(self.strategy, ExactEnumeration):
            Y = finite_support(self.f)
            if len(Y) == 0:
                return np.full(len(X), math.inf)
            fy = self.f.eval_many(Y)
            best = np.full(len(X), math.inf)
            for y, v in zip(Y, fy):
                best = np.minimum(best, self.phi.eval_many(y - X) + v)
            return best
        if isinstance(self.strategy, ConvexProgram):
            best = np.full(len(X), math.inf)
            for kind, piece in self._pieces:
                if kind == "cloud":
                    for y in piece:
                        best = np.minimum(best, self.phi.eval_many(y - X))
                elif hasattr(piece, "solve_many"):
                    best = np.minimum(best, piece.solve_many(X)[0])
                else:
                    best = np.minimum(best, [piece.solve(x)[0] for x in X])
            return best
        return np.array([infconv_eval(self, x).value for x in X])


def _candidates(T, x):
    """(points, objectives) over which the infimum is taken exactly, or approximately for grids."""
    if isinstance(T.strategy, ExactEnumeration):
        Y = finite_support(T.f)
        if len(Y) == 0:
            return Y, np.zeros(0)
        return Y, T.phi.eval_many(Y - x) + T.f.eval_many(Y)
    if isinstance(T.strategy, ConvexProgram):
        pts, objs = [], []
        for kind, piece in T._pieces:
            if kind == "cloud":
                pts.extend(piece)
                objs.extend(T.phi.eval_many(piece - x))
            else:
                v, y = piece.solve(x)
                if y is not None:
                    pts.append(y)
                    objs.append(v)
        return np.array(pts).reshape(-1, T.dim), np.array(objs, dtype=float)
    return _grid_search(T, x)


def _grid_axes(lo, hi, cells):
    h = (hi - lo) / cells
    return [lo[i] + h[i] * (np.arange(cells) + 0.5) for i in range(lo.size)], h


def _grid_objective(T, x, axes):
    Y = np.array(list(itertools.product(*axes)))
    return Y, T.phi.eval_many(Y - x) + T.f.eval_many(Y)


def _grid_search(T, x):
    s = T.strategy
    axes, h = _grid_axes(s.lower, s.upper, s.resolution)
    Y, obj = _grid_objective(T, x, axes)
    all_Y, all_obj = [Y], [obj]
    best = int(np.argmin(obj))
    for _ in range(s.refinement_levels):
        if not math.isfinite(obj[best]):
            break
        c = Y[best]
        # halve the cell size over a 4-cell window around the incumbent
        axes, h = _grid_axes(c - 2 * h, c + 2 * h, 8)
        Yr, objr = _grid_objective(T, x, axes)
        all_Y.append(Yr)
        all_obj.append(objr)
        j = int(np.argmin(objr))
        if objr[j] < obj[best]:
            Y, obj, best = Yr, objr, j
    return np.vstack(all_Y), np.concatenate(all_obj)


def grid_levels(T, x):
    """Incumbent value after each GridSearch level (nonincreasing)."""
    s = T.strategy
    if not isinstance(s, GridSearch):
        raise InputError("grid_levels needs a GridSearch strategy")
    x = as_vector(x, T.dim)
    axes, h = _grid_axes(s.lower, s.upper, s.resolution)
    Y, obj = _grid_objective(T, x, axes)
    best = int(np.argmin(obj))
    out = [float(obj[best])]
    for _ in range(s.refinement_levels):
        if math.isfinite(obj[best]):
            axes, h = _grid_axes(Y[best] - 2 * h, Y[best] + 2 * h, 8)
            Yr, objr = _grid_objective(T, x, axes)
            j = int(np.argmin(objr))
            if objr[j] < obj[best]:
                Y, obj, best = Yr, objr, j
        out.append(float(obj[best]))
    return out


def infconv_eval(T, x, slack=DEFAULT_SLACK):
    """Value of T at x with every candidate minimizer within ``slack`` of it."""
    if slack < 0:
        raise InputError("slack must be nonnegative")
    x = as_vector(x, T.dim)
    Y, obj = _candidates(T, x)
    if obj.size == 0 or not np.isfinite(obj).any():
        if T.approximate:
            warnings.warn(f"GridSearch bounds reach no point of dom f for x={x.tolist()}",
                          DomainUnreachableWarning, stacklevel=2)
        return InfConvValue(math.inf, [], slack, T.approximate)
    value = float(obj.min())
    keep = np.flatnonzero(obj <= value + slack)
    order = sorted(keep, key=lambda i: tuple(Y[i]))
    mins = [(Y[i].copy(), float(obj[i])) for i in order]
    return InfConvValue(value, mins, slack, T.approximate)


def is_in_S0(T, x, tol=1e-9):
    """x is in dom f and T(x) = f(x) within tol."""
    if tol < 0:
        raise InputError("tol must be nonnegative")
    fx = field_eval(T.f, x)
    if not math.isfinite(fx):
        return False
    return abs(infconv_eval(T, x).value - fx) <= tol


# --------------------------------------------------------------------------- presets


def minimal_time_function(F, Omega, zero_body_constant=1.0):
    return InfConvolution(GaugeField(Gauge(F, zero_body_constant)), Indicator(Omega))


def minimal_time(F, Omega, x, slack=DEFAULT_SLACK):
    """Least t with y - x in tF for some y in Omega."""
    return infconv_eval(minimal_time_function(F, Omega), x, slack)


def distance_function(Omega):
    return InfConvolution(NormField(2, Omega.dim), Indicator(Omega))


def perturbed_minimal_time(F, f, zero_body_constant=1.0, strategy=None):
    return InfConvolution(GaugeField(Gauge(F, zero_body_constant)), f, strategy)


def perturbed_distance(J, Omega, strategy=None):
    return InfConvolution(NormField(2, Omega.dim), Perturbed(J, Omega), strategy)
