"""Extended-real-valued functions on R^n and the regions they live on.

Fields never take the value -inf; +inf is ``math.inf``. Every field is a
callable on a single point and has ``eval_many`` for an ``(N, n)`` batch.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import lp
from .convex_bodies import DEFAULT_TOL, VPolytope, as_vector
from .errors import DimensionError, DomainEmptyError, InputError, PreconditionError
from .gauge import Gauge, gauge_eval, gauge_eval_many

KEY_TOL = 1e-12
SAMPLE_CHUNK = 256
BURN_IN = 64
MAX_FAILED_TRIALS = 60
DEFAULT_BOX = 10.0


def _chunk_rng(seed, chunk):
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, chunk])


def _chunked(k, seed, draw):
    """Concatenate ``draw(rng, SAMPLE_CHUNK)`` blocks; the first k rows are prefix-stable in k."""
    blocks, have, c = [], 0, 0
    while have < k:
        blk = draw(_chunk_rng(seed, c), SAMPLE_CHUNK)
        blocks.append(blk)
        have += len(blk)
        c += 1
    return np.concatenate(blocks)[:k]


# --------------------------------------------------------------------------- regions


class Region:
    dim: int

    def contains(self, x, tol=DEFAULT_TOL):
        return bool(self.contains_many(np.asarray(x, dtype=float)[None, :], tol)[0])

    def contains_many(self, X, tol=DEFAULT_TOL):
        raise NotImplementedError

    def sample(self, k, seed):
        raise NotImplementedError

    def parts(self):
        """Convex pieces whose union is the region (point clouds count as one piece)."""
        return [self]


def _as_points(points, name):
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        raise InputError(f"{name} needs at least one point")
    for i, row in enumerate(P):
        as_vector(row, dim=P.shape[1], name=f"{name} point {i}")
    P.setflags(write=False)
    return P


@dataclass(frozen=True, eq=False)
class PointCloud(Region):
    points: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        P = _as_points(self.points, "PointCloud")
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "dim", P.shape[1])

    def contains_many(self, X, tol=DEFAULT_TOL):
        X = np.atleast_2d(X)
        diff = np.abs(X[:, None, :] - self.points[None, :, :]).max(axis=2)
        return (diff <= KEY_TOL).any(axis=1)

    def sample(self, k, seed):
        idx = np.arange(k) % len(self.points)
        return self.points[idx].copy()

    def __repr__(self):
        return f"PointCloud({self.points.tolist()})"


@dataclass(frozen=True, eq=False)
class VPolytopeRegion(Region):
    vertices: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        V = _as_points(self.vertices, "VPolytopeRegion")
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "dim", V.shape[1])
        object.__setattr__(self, "_body", VPolytope(V))

    def contains_many(self, X, tol=DEFAULT_TOL):
        return np.array([self._body.contains(x, tol) for x in np.atleast_2d(X)])

    def sample(self, k, seed):
        V = self.vertices

        def draw(rng, size):
            return rng.dirichlet(np.ones(len(V)), size=size) @ V

        return _chunked(k, seed, draw)

    def __repr__(self):
        return f"VPolytopeRegion({self.vertices.tolist()})"


@dataclass(frozen=True, eq=False)
class HalfspaceIntersection(Region):
    """{x : A x <= b}. Emptiness is detected when the region is used, not at construction.

    Unbounded regions are sampled inside a box of half-width ``box`` around
    their Chebyshev centre.
    """

    A: np.ndarray
    b: np.ndarray
    box: float = DEFAULT_BOX
    dim: int = field(init=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != b.size or A.shape[0] == 0:
            raise InputError("HalfspaceIntersection needs matching nonempty rows A, b")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InputError("HalfspaceIntersection rows must be finite")
        as_vector(A[0], name="halfspace normal")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "dim", A.shape[1])

    @classmethod
    def from_rows(cls, rows, box=DEFAULT_BOX):
        rows = list(rows)
        return cls(np.array([r[0] for r in rows], dtype=float), np.array([r[1] for r in rows], dtype=float), box)

    def contains_many(self, X, tol=DEFAULT_TOL):
        X = np.atleast_2d(X)
        return np.all(X @ self.A.T <= self.b + tol, axis=1)

    def active_rows(self, x, tol=DEFAULT_TOL):
        return np.flatnonzero(np.abs(self.A @ x - self.b) <= tol)

    def chebyshev_center(self):
        """Centre of a largest inscribed ball (radius capped at 1); raises if empty."""
        n = self.dim
        norms = np.linalg.norm(self.A, axis=1)
        A_ub = np.hstack([self.A, norms[:, None]])
        c = np.zeros(n + 1)
        c[-1] = -1.0
        bounds = [(None, None)] * n + [(0.0, 1.0)]
        res = lp.linprog(c, A_ub=A_ub, b_ub=self.b, bounds=bounds)
        if res.status != "optimal":
            raise DomainEmptyError(f"halfspace region is empty ({res.status})")
        return res.x[:n], res.x[-1]

    def sample(self, k, seed):
        center, _ = self.chebyshev_center()
        lo, hi = center - self.box, center + self.box
        A, b = self.A, self.b

        def draw(rng, size):
            X = np.repeat(center[None, :], size, axis=0)
            for _ in range(BURN_IN):
                D = rng.normal(size=X.shape)
                D /= np.linalg.norm(D, axis=1, keepdims=True)
                tmin = np.full(size, -np.inf)
                tmax = np.full(size, np.inf)
                # chord through the halfspaces and the bounding box
                AD = D @ A.T
                slack = b - X @ A.T
                with np.errstate(divide="ignore", invalid="ignore"):
                    t = slack / AD
                tmax = np.minimum(tmax, np.where(AD > 1e-15, t, np.inf).min(axis=1))
                tmin = np.maximum(tmin, np.where(AD < -1e-15, t, -np.inf).max(axis=1))
                with np.errstate(divide="ignore", invalid="ignore"):
                    t_lo = (lo - X) / D
                    t_hi = (hi - X) / D
                tmax = np.minimum(tmax, np.where(D > 0, t_hi, np.where(D < 0, t_lo, np.inf)).min(axis=1))
                tmin = np.maximum(tmin, np.where(D > 0, t_lo, np.where(D < 0, t_hi, -np.inf)).max(axis=1))
                tmax = np.maximum(tmax, 0.0)
                tmin = np.minimum(tmin, 0.0)
                X = X + (tmin + (tmax - tmin) * rng.random(size))[:, None] * D
            return X

        return _chunked(k, seed, draw)

    def __repr__(self):
        return f"HalfspaceIntersection(A={self.A.tolist()}, b={self.b.tolist()})"


@dataclass(frozen=True, eq=False)
class Union(Region):
    members: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise InputError("Union needs at least one region")
        dims = {r.dim for r in members}
        if len(dims) != 1:
            raise DimensionError(f"Union members have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "dim", dims.pop())

    def contains_many(self, X, tol=DEFAULT_TOL):
        X = np.atleast_2d(X)
        out = np.zeros(len(X), dtype=bool)
        for r in self.members:
            out |= r.contains_many(X, tol)
        return out

    def parts(self):
        return [p for r in self.members for p in r.parts()]

    def sample(self, k, seed):
        usable = []
        for i, r in enumerate(self.members):
            try:
                usable.append((i, r, r.sample(k, seed + 7919 * (i + 1))))
            except DomainEmptyError:
                pass
        if not usable:
            raise DomainEmptyError("every member of the union is empty")
        rng = np.random.default_rng(seed)
        pick = rng.integers(len(usable), size=k)
        return np.array([usable[p][2][j] for j, p in enumerate(pick)])

    def __repr__(self):
        return f"Union({list(self.members)!r})"


# --------------------------------------------------------------------------- fields


class ScalarField:
    dim: int

    def __call__(self, x):
        return field_eval(self, x)

    def value(self, x):
        raise NotImplementedError

    def eval_many(self, X):
        return np.array([self.value(x) for x in np.atleast_2d(X)], dtype=float)


@dataclass(frozen=True, eq=False)
class Zero(ScalarField):
    dim: int

    def value(self, x):
        return 0.0

    def eval_many(self, X):
        return np.zeros(len(np.atleast_2d(X)))


@dataclass(frozen=True, eq=False)
class Indicator(ScalarField):
    """delta_Omega: 0 on the region, +inf off it."""

    region: Region
    tol: float = DEFAULT_TOL

    @property
    def dim(self):
        return self.region.dim

    def value(self, x):
        return 0.0 if self.region.contains(x, self.tol) else math.inf

    def eval_many(self, X):
        return np.where(self.region.contains_many(np.atleast_2d(X), self.tol), 0.0, math.inf)


@dataclass(frozen=True, eq=False)
class Table(ScalarField):
    """Finite values on finitely many points, +inf elsewhere. Keys match to 1e-12 per coordinate."""

    points: np.ndarray
    values: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        P = _as_points(self.points, "Table")
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size != len(P) or not np.all(np.isfinite(v)):
            raise InputError("Table needs one finite value per key")
        v.setflags(write=False)
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "dim", P.shape[1])

    @classmethod
    def from_mapping(cls, mapping):
        items = list(mapping.items())
        return cls(np.array([k for k, _ in items], dtype=float), np.array([v for _, v in items], dtype=float))

    def eval_many(self, X):
        X = np.atleast_2d(X)
        match = np.abs(X[:, None, :] - self.points[None, :, :]).max(axis=2) <= KEY_TOL
        vals = np.where(match, self.values[None, :], math.inf)
        return vals.min(axis=1)

    def value(self, x):
        return float(self.eval_many(np.asarray(x, dtype=float)[None, :])[0])


@dataclass(frozen=True, eq=False)
class Perturbed(ScalarField):
    """J + delta_Omega."""

    J: ScalarField
    region: Region
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.J.dim != self.region.dim:
            raise DimensionError("Perturbed: J and region dimensions differ")

    @property
    def dim(self):
        return self.region.dim

    def value(self, x):
        return self.J.value(x) if self.region.contains(x, self.tol) else math.inf

    def eval_many(self, X):
        X = np.atleast_2d(X)
        inside = self.region.contains_many(X, self.tol)
        out = np.full(len(X), math.inf)
        if inside.any():
            out[inside] = self.J.eval_many(X[inside])
        return out


@dataclass(frozen=True, eq=False)
class NormField(ScalarField):
    """weight * ||x - center||_p."""

    p: float
    dim: int
    weight: float = 1.0
    center: np.ndarray = None

    def __post_init__(self):
        from .convex_bodies import _parse_p

        object.__setattr__(self, "p", _parse_p(self.p))
        if not (self.weight >= 0 and math.isfinite(self.weight)):
            raise InputError("NormField weight must be finite and nonnegative")
        c = np.zeros(self.dim) if self.center is None else as_vector(self.center, self.dim, "center")
        object.__setattr__(self, "center", c)

    def value(self, x):
        return self.weight * float(np.linalg.norm(x - self.center, ord=self.p))

    def eval_many(self, X):
        return self.weight * np.linalg.norm(np.atleast_2d(X) - self.center, ord=self.p, axis=1)


@dataclass(frozen=True, eq=False)
class GaugeField(ScalarField):
    gauge: Gauge

    @property
    def dim(self):
        return self.gauge.dim

    def value(self, x):
        return gauge_eval(self.gauge, x)

    def eval_many(self, X):
        return gauge_eval_many(self.gauge, X)


@dataclass(frozen=True, eq=False)
class Sum(ScalarField):
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise InputError("Sum needs at least one term")
        if len({t.dim for t in terms}) != 1:
            raise DimensionError("Sum terms have mixed dimensions")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self):
        return self.terms[0].dim

    def value(self, x):
        total = 0.0
        for t in self.terms:
            v = t.value(x)
            if v == math.inf:
                return math.inf
            total += v
        return total

    def eval_many(self, X):
        return np.sum([t.eval_many(X) for t in self.terms], axis=0)


@dataclass(frozen=True, eq=False)
class ShiftedArg(ScalarField):
    """y -> f(y - shift)."""

    f: ScalarField
    shift: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "shift", as_vector(self.shift, self.f.dim, "shift"))

    @property
    def dim(self):
        return self.f.dim

    def value(self, x):
        return self.f.value(np.asarray(x, dtype=float) - self.shift)

    def eval_many(self, X):
        return self.f.eval_many(np.atleast_2d(X) - self.shift)


def field_eval(f, x):
    """Value of f at x in (-inf, +inf]."""
    x = as_vector(x, f.dim)
    v = float(f.value(x))
    if math.isnan(v) or v == -math.inf:
        raise ValueError(f"field {f!r} produced {v} at {x.tolist()}")
    return v


def field_eval_many(f, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != f.dim:
        raise DimensionError(f"points have dimension {X.shape[1]}, expected {f.dim}")
    return f.eval_many(X)


def finite_support(f):
    """The finite effective domain of f as an array of points, or None when not finite."""
    if isinstance(f, Table):
        return f.points
    if isinstance(f, Indicator) and isinstance(f.region, PointCloud):
        return f.region.points
    if isinstance(f, Perturbed):
        inner = finite_support(f.J)
        if isinstance(f.region, PointCloud):
            P = f.region.points
        elif inner is not None:
            P = inner[f.region.contains_many(inner, f.tol)]
        else:
            return None
        return P[np.isfinite(f.J.eval_many(P))] if len(P) else P
    if isinstance(f, Sum):
        for t in f.terms:
            P = finite_support(t)
            if P is not None:
                return P[np.isfinite(f.eval_many(P))] if len(P) else P
    return None


# --------------------------------------------------------------------------- sampling


def _rejection(k, seed, propose, f):
    out, have, failures, c = [], 0, 0, 0
    while have < k:
        X = propose(_chunk_rng(seed, c), SAMPLE_CHUNK)
        c += 1
        X = X[np.isfinite(f.eval_many(X))]
        if len(X) == 0:
            failures += 1
            if failures >= MAX_FAILED_TRIALS:
                raise DomainEmptyError(f"no finite value of {f!r} in {MAX_FAILED_TRIALS} trials")
            continue
        failures = 0
        out.append(X)
        have += len(X)
    return np.concatenate(out)[:k]


def domain_sample(f, k, seed=0):
    """k points of dom f, deterministic per seed."""
    if k < 1:
        raise InputError("k must be >= 1")
    P = finite_support(f)
    if P is not None:
        if len(P) == 0:
            raise DomainEmptyError(f"{f!r} has an empty domain")
        return P[np.arange(k) % len(P)].copy()
    if isinstance(f, Indicator):
        return f.region.sample(k, seed)
    if isinstance(f, Perturbed):
        region = f.region

        def propose(rng, size):
            return region.sample(size, int(rng.integers(2**31)))

        return _rejection(k, seed, propose, f)
    if isinstance(f, ShiftedArg):
        return domain_sample(f.f, k, seed) + f.shift
    if isinstance(f, Sum):
        restricted = [t for t in f.terms if not isinstance(t, (Zero, NormField))]
        lead = restricted[0] if restricted else f.terms[0]

        def propose(rng, size):
            return domain_sample(lead, size, int(rng.integers(2**31)))

        return _rejection(k, seed, propose, f)
    if isinstance(f, GaugeField):
        G = f.gauge.body.generators()
        if G is not None:
            def draw(rng, size):
                return rng.exponential(size=(size, len(G))) @ G

            return _chunked(k, seed, draw)
    # finite on the whole space
    dim = f.dim

    def draw(rng, size):
        return rng.normal(size=(size, dim))

    return _chunked(k, seed, draw)


@dataclass(frozen=True)
class CalmnessEstimate:
    ell: float
    sample_count: int
    saturated: bool


def calm_constant(f, xbar, k=1000, seed=0, cap=1e6):
    """Sampled center-Lipschitz constant of f at xbar over dom f.

    A lower estimate of the true constant; indicators return exactly 0.
    """
    xbar = as_vector(xbar, f.dim, "xbar")
    fbar = field_eval(f, xbar)
    if not math.isfinite(fbar):
        raise PreconditionError(f"xbar={xbar.tolist()} is outside dom f")
    if isinstance(f, Indicator):
        return CalmnessEstimate(0.0, 0, False)
    X = domain_sample(f, k, seed)
    dist = np.linalg.norm(X - xbar, axis=1)
    keep = dist > KEY_TOL
    vals = f.eval_many(X[keep])
    q = np.abs(vals - fbar) / dist[keep]
    ell = float(q.max()) if q.size else 0.0
    if ell >= cap:
        return CalmnessEstimate(float(cap), int(k), True)
    return CalmnessEstimate(ell, int(k), False)


def critical_directions(region, xbar, tol=DEFAULT_TOL):
    """Unit directions along which the region's local cone at xbar has edges or normals."""
    dirs = []
    for part in region.parts():
        if isinstance(part, HalfspaceIntersection):
            for i in part.active_rows(xbar, tol):
                a = part.A[i] / np.linalg.norm(part.A[i])
                dirs.extend([a, -a])
                if part.dim == 2:
                    t = np.array([-a[1], a[0]])
                    dirs.extend([t, -t])
        elif isinstance(part, VPolytopeRegion):
            for w in part.vertices:
                d = w - xbar
                nd = np.linalg.norm(d)
                if nd > KEY_TOL:
                    dirs.append(d / nd)
    return dirs
