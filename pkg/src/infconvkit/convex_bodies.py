"""Closed bounded convex sets F (the velocity sets of the minimal time function).

Vectors and covectors are plain 1-d float arrays; the pairing is the dot
product. Extended reals are floats with ``math.inf`` standing for +infinity.
"""
from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from . import lp
from .errors import DimensionError, InputError

MAX_DIM = 16
DEFAULT_TOL = 1e-9


def as_vector(x, dim=None, name="vector"):
    """Validate and convert to a finite float array of length 1..16."""
    v = np.asarray(x, dtype=float).reshape(-1)
    if not 1 <= v.size <= MAX_DIM:
        raise DimensionError(f"{name} has length {v.size}; expected 1..{MAX_DIM}")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite entries: {v.tolist()}")
    if dim is not None and v.size != dim:
        raise DimensionError(f"{name} has dimension {v.size}, expected {dim}")
    return v


def pairing(xstar, x):
    return float(np.dot(xstar, x))


def dual_norm_exponent(p):
    return {1: math.inf, 2: 2, math.inf: 1}[p]


def pnorm(x, p):
    return float(np.linalg.norm(np.asarray(x, dtype=float).reshape(-1), ord=p))


def _parse_p(p):
    if p in ("inf", "Inf", "INF") or p == math.inf:
        return math.inf
    if p in (1, 2):
        return int(p)
    raise InputError(f"norm exponent must be 1, 2 or inf, got {p!r}")


class ConvexBody:
    """Base class; concrete bodies are VPolytope, NormBall and Singleton."""

    dim: int

    def support(self, xstar):
        raise NotImplementedError

    def contains(self, x, tol=DEFAULT_TOL):
        raise NotImplementedError

    def body_norm(self):
        raise NotImplementedError

    def generators(self):
        """Vertex rows whose convex hull is the body, or None if not polyhedral."""
        return None

    def is_zero(self):
        return False


@dataclass(frozen=True, eq=False)
class VPolytope(ConvexBody):
    """Convex hull of a nonempty finite vertex list."""

    vertices: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if V.size == 0 or V.ndim != 2:
            raise InputError("VPolytope needs at least one vertex")
        for i, row in enumerate(V):
            as_vector(row, dim=V.shape[1], name=f"vertex {i}")
        V.setflags(write=False)
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "dim", V.shape[1])
        # column layout used by every LP over this body
        object.__setattr__(self, "_vt", np.ascontiguousarray(V.T))

    def support(self, xstar):
        xstar = as_vector(xstar, self.dim, "covector")
        return float(np.max(self.vertices @ xstar))

    def contains(self, x, tol=DEFAULT_TOL):
        x = as_vector(x, self.dim)
        return _combination_feasible(self._vt, x, tol)

    def body_norm(self):
        return max(math.hypot(*v) for v in self.vertices)

    def generators(self):
        return self.vertices

    def is_zero(self):
        return not np.any(self.vertices)

    def __repr__(self):
        return f"VPolytope({self.vertices.tolist()})"


def _combination_feasible(vt, x, tol):
    # phase-1 LP: sum_i lam_i v_i = x, sum_i lam_i = 1, lam >= 0
    k = vt.shape[1]
    A = np.empty((vt.shape[0] + 1, k))
    A[:-1] = vt
    A[-1] = 1.0
    b = np.append(x, 1.0)
    res = lp.solve_standard(np.zeros(k), A, b, feas_tol=max(tol, 1e-12))
    return res.status == "optimal"


@dataclass(frozen=True, eq=False)
class NormBall(ConvexBody):
    """Origin-centred p-norm ball, p in {1, 2, inf}."""

    p: float
    radius: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "p", _parse_p(self.p))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InputError(f"NormBall radius must be positive, got {self.radius}")
        if not 1 <= int(self.dim) <= MAX_DIM:
            raise DimensionError(f"NormBall dimension {self.dim} out of range")
        object.__setattr__(self, "dim", int(self.dim))

    def support(self, xstar):
        xstar = as_vector(xstar, self.dim, "covector")
        return self.radius * pnorm(xstar, dual_norm_exponent(self.p))

    def contains(self, x, tol=DEFAULT_TOL):
        x = as_vector(x, self.dim)
        return pnorm(x, self.p) <= self.radius + tol

    def body_norm(self):
        # largest Euclidean norm on the unit p-ball: 1 for p in {1, 2}, sqrt(n) for inf
        return self.radius * (math.sqrt(self.dim) if self.p == math.inf else 1.0)

    def generators(self):
        if self.p == 2:
            return None
        if self.p == 1:
            eye = np.eye(self.dim)
            return self.radius * np.vstack([eye, -eye])
        return self.radius * np.array(list(itertools.product((1.0, -1.0), repeat=self.dim)))

    def __repr__(self):
        return f"NormBall(p={self.p}, radius={self.radius}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Singleton(ConvexBody):
    point: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        v = as_vector(self.point, name="singleton point")
        v.setflags(write=False)
        object.__setattr__(self, "point", v)
        object.__setattr__(self, "dim", v.size)

    def support(self, xstar):
        return pairing(as_vector(xstar, self.dim, "covector"), self.point)

    def contains(self, x, tol=DEFAULT_TOL):
        x = as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.point)) <= tol

    def body_norm(self):
        return math.hypot(*self.point)

    def generators(self):
        return self.point[None, :]

    def is_zero(self):
        return not np.any(self.point)

    def __repr__(self):
        return f"Singleton({self.point.tolist()})"


def support(F, xstar):
    """sup over u in F of <xstar, u>."""
    return F.support(xstar)


def contains(F, x, tol=DEFAULT_TOL):
    if tol < 0:
        raise InputError("tol must be nonnegative")
    return F.contains(x, tol)


def body_norm(F):
    """sup over u in F of the Euclidean norm of u."""
    return F.body_norm()


def support_many(F, covectors):
    """Row-wise support values for a (k, n) array of covectors."""
    C = np.atleast_2d(np.asarray(covectors, dtype=float))
    if C.shape[1] != F.dim:
        raise DimensionError(f"covectors have dimension {C.shape[1]}, expected {F.dim}")
    if isinstance(F, NormBall):
        return F.radius * np.linalg.norm(C, ord=dual_norm_exponent(F.p), axis=1)
    G = F.generators()
    return np.max(C @ G.T, axis=1)
