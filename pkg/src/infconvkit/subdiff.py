"""Membership tests for epsilon-Frechet and s-Holder subdifferentials.

Numeric tests (``frechet_test``, ``holder_test``) sample the difference
quotient along rays x = xbar + r*d for radii r0*theta**j and a fixed
direction set. They are one-sided: NonMember comes with a witness point,
Member only means no violation was found.

Exact tests cover the structured cases: normal cones of polyhedral regions
and point clouds, and the polar of a gauge or norm unit ball.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from itertools import combinations
import math

import numpy as np

from .convex_bodies import DEFAULT_TOL, as_vector, dual_norm_exponent, support_many
from .errors import InputError, PreconditionError
from .fields import (
    GaugeField, HalfspaceIntersection, NormField, PointCloud, VPolytopeRegion, critical_directions,
    finite_support,
)
from .infconv import InfConvolution, _indicator_region, _phi_shape, is_in_S0

S0_TOL = 1e-7
ACTIVE_TOL = 1e-9
HOLDER_POLAR_TOL = 1e-9
DEFAULT_SIGMA_CAP = 1e6
DIVERGENCE_LEVELS = 4
# a diverging Holder quotient must grow at least this much per level
DIVERGENCE_GROWTH = 1.0 + 1e-3
ROUNDING_FLOOR = 64 * np.finfo(float).eps
DEFAULT_DIRECTIONS = {1: 2, 2: 720, 3: 2000}


class Verdict(str, Enum):
    MEMBER = "Member"
    NON_MEMBER = "NonMember"
    UNDETERMINED = "Undetermined"


Member, NonMember, Undetermined = Verdict.MEMBER, Verdict.NON_MEMBER, Verdict.UNDETERMINED


@dataclass(frozen=True)
class Frechet:
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise InputError("epsilon must be nonnegative")


@dataclass(frozen=True)
class Holder:
    s: float = 1.0

    def __post_init__(self):
        if not self.s > 0:
            raise InputError("s must be positive")


@dataclass(frozen=True)
class MembershipResult:
    verdict: Verdict
    witness: tuple = None
    worst_quotient: float = math.nan

    @property
    def is_member(self):
        return self.verdict is Member


# --------------------------------------------------------------------------- sampling plan


def _base_directions(n, count, seed):
    if n == 1:
        return np.array([[1.0], [-1.0]])
    rng = np.random.default_rng(seed)
    if n == 2:
        offset = 0.0 if seed == 0 else rng.uniform(0.0, 2 * math.pi / count)
        a = offset + 2 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(a), np.sin(a)])
    if n == 3:
        k = np.arange(count) + 0.5
        z = 1.0 - 2.0 * k / count
        phi = math.pi * (3.0 - math.sqrt(5.0)) * k
        rxy = np.sqrt(1.0 - z * z)
        D = np.column_stack([rxy * np.cos(phi), rxy * np.sin(phi), z])
        if seed != 0:
            Q, R = np.linalg.qr(rng.normal(size=(3, 3)))
            D = D @ (Q * np.sign(np.diag(R)))
        return D
    D = rng.normal(size=(count, n))
    return D / np.linalg.norm(D, axis=1, keepdims=True)


@dataclass(frozen=True)
class SamplingPlan:
    """Radii r0*theta**j (j < levels) times a deterministic unit-direction set.

    ``extra_directions`` are appended (with their negatives) to the base set;
    callers use them for edges and normals where a quotient may be extremal.
    """

    base_radius: float = 0.5
    decay: float = 0.5
    levels: int = 20
    directions: int = None
    seed: int = 0
    quotient_tolerance: float = 1e-6
    extra_directions: tuple = ()

    def __post_init__(self):
        if not (self.base_radius > 0 and 0 < self.decay < 1 and self.levels >= 2):
            raise InputError("SamplingPlan needs base_radius > 0, 0 < decay < 1, levels >= 2")
        if self.directions is not None and self.directions < 1:
            raise InputError("directions must be positive")
        if not self.quotient_tolerance >= 0:
            raise InputError("quotient_tolerance must be nonnegative")

    def radii(self):
        return self.base_radius * self.decay ** np.arange(self.levels)

    def direction_set(self, n):
        return _direction_set(self, n)

    def with_directions(self, dirs):
        extra = list(self.extra_directions)
        for d in dirs:
            d = np.asarray(d, dtype=float)
            nd = np.linalg.norm(d)
            if nd > 0:
                extra.append(tuple(float(v) for v in d / nd))
        return replace(self, extra_directions=tuple(dict.fromkeys(extra)))


@lru_cache(maxsize=32)
def _direction_set(plan, n):
    count = plan.directions or DEFAULT_DIRECTIONS.get(n, 2000)
    D = _base_directions(n, count, plan.seed)
    extra = [e for e in plan.extra_directions if len(e) == n]
    if extra:
        E = np.array(extra)
        D = np.vstack([D, E, -E])
    D.setflags(write=False)
    return D


# --------------------------------------------------------------------------- probes


def _values(g, X):
    if isinstance(g, InfConvolution):
        return g.values(X)
    if hasattr(g, "eval_many"):
        return np.asarray(g.eval_many(X), dtype=float)
    return np.array([float(g(x)) for x in X])


def _value(g, x):
    if hasattr(g, "eval_many") or isinstance(g, InfConvolution):
        return float(_values(g, x[None, :])[0])
    return float(g(x))


@dataclass(frozen=True, eq=False)
class Probe:
    """g sampled once on the plan points around xbar; shared by every covector test."""

    xbar: np.ndarray
    gbar: float
    radii: np.ndarray
    D: np.ndarray
    diff: np.ndarray  # (levels, directions): g(xbar + r d) - g(xbar), +inf off the domain
    points: np.ndarray = field(repr=False)


def make_probe(g, xbar, plan):
    dim = g.dim if hasattr(g, "dim") else np.asarray(xbar).size
    xbar = as_vector(xbar, dim, "xbar")
    gbar = _value(g, xbar)
    if not math.isfinite(gbar):
        raise PreconditionError(f"g(xbar) is not finite at xbar={xbar.tolist()}")
    return _probe_cached(g, tuple(xbar.tolist()), plan, gbar)


@lru_cache(maxsize=128)
def _probe_cached(g, xbar, plan, gbar):
    xbar = np.array(xbar)
    radii = plan.radii()
    D = plan.direction_set(xbar.size)
    P = xbar + radii[:, None, None] * D[None, :, :]
    vals = _values(g, P.reshape(-1, xbar.size)).reshape(len(radii), len(D))
    if np.any(np.isnan(vals)) or np.any(vals == -math.inf):
        raise InputError("g returned NaN or -inf on the sampling plan")
    return Probe(xbar, gbar, radii, D, vals - gbar, P)


def _numerators(probe, C, levels=slice(None)):
    # (K, levels, directions); +inf entries stay +inf
    lin = (C @ probe.D.T)[:, None, :] * probe.radii[levels][None, :, None]
    with np.errstate(invalid="ignore"):
        return probe.diff[None, levels, :] - lin


def _witness(probe, j, i, q):
    return (probe.points[j, i].copy(), float(q))


# --------------------------------------------------------------------------- Frechet


def _frechet_verdicts(probe, C, epsilon, qtol):
    """Verdict codes (0 Member, 1 NonMember, 2 Undetermined), worst quotients, witness indices."""
    last = len(probe.radii) - 1
    r = probe.radii[last - 1:]
    num = _numerators(probe, C, slice(last - 1, None))
    q = num / r[None, :, None]
    bad = q < -epsilon - qtol
    persistent = bad[:, 0, :] & bad[:, 1, :]
    any_last = bad[:, 1, :].any(axis=1)
    code = np.where(persistent.any(axis=1), 1, np.where(any_last, 2, 0))
    q_last = q[:, 1, :]
    worst = np.min(np.where(np.isfinite(q_last), q_last, np.inf), axis=1)
    wit = np.argmin(np.where(persistent, q_last, np.inf), axis=1)
    return code, worst, wit


_CODES = (Member, NonMember, Undetermined)


def frechet_many(probe, C, epsilon, qtol):
    """Frechet verdict per row of C against a prepared probe."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    code, worst, wit = _frechet_verdicts(probe, C, epsilon, qtol)
    out = []
    last = len(probe.radii) - 1
    for k in range(len(C)):
        w = None
        if code[k] == 1:
            i = wit[k]
            qv = (probe.diff[last, i] - probe.radii[last] * (C[k] @ probe.D[i])) / probe.radii[last]
            w = _witness(probe, last, i, qv)
        out.append(MembershipResult(_CODES[code[k]], w, float(worst[k])))
    return out


def frechet_test(g, xbar, xstar, epsilon, plan=None, probe=None):
    """epsilon-Frechet membership of xstar at xbar by sampled difference quotients."""
    if not epsilon >= 0:
        raise InputError("epsilon must be nonnegative")
    plan = plan or SamplingPlan()
    probe = probe or make_probe(g, xbar, plan)
    xstar = as_vector(xstar, probe.xbar.size, "covector")
    return frechet_many(probe, xstar[None, :], epsilon, plan.quotient_tolerance)[0]


# --------------------------------------------------------------------------- Holder


def _holder_verdicts(probe, C, s, sigma_cap):
    num = _numerators(probe, C)
    r = probe.radii
    scale = 1.0 + abs(probe.gbar) + np.abs(C @ probe.xbar) + np.linalg.norm(C, axis=1) * np.linalg.norm(probe.xbar)
    floor = ROUNDING_FLOOR * scale[:, None, None]
    neg = num < -floor
    # numerators lost in rounding count as zero
    with np.errstate(invalid="ignore"):
        q = np.where(neg, num, np.maximum(num, 0.0)) / (r ** (1.0 + s))[None, :, None]
    tail = q[:, -DIVERGENCE_LEVELS:, :]
    growing = np.all(neg[:, -DIVERGENCE_LEVELS:, :], axis=1) & np.all(
        tail[:, 1:, :] <= DIVERGENCE_GROWTH * tail[:, :-1, :], axis=1)
    below_cap = np.all(tail < -sigma_cap, axis=1) & np.all(tail[:, 1:, :] <= tail[:, :-1, :], axis=1)
    diverges = growing | below_cap
    finite_q = np.where(np.isfinite(q), q, np.inf)
    worst = finite_q.min(axis=(1, 2))
    code = np.where(diverges.any(axis=1), 1, np.where(worst >= -sigma_cap, 0, 2))
    wit = np.argmin(np.where(diverges, finite_q[:, -1, :], np.inf), axis=1)
    return code, worst, wit, q


def holder_many(probe, C, s, sigma_cap=DEFAULT_SIGMA_CAP):
    C = np.atleast_2d(np.asarray(C, dtype=float))
    code, worst, wit, q = _holder_verdicts(probe, C, s, sigma_cap)
    out = []
    for k in range(len(C)):
        w = _witness(probe, -1, wit[k], q[k, -1, wit[k]]) if code[k] == 1 else None
        out.append(MembershipResult(_CODES[code[k]], w, float(worst[k])))
    return out


def holder_test(g, xbar, xstar, s, plan=None, sigma_cap=DEFAULT_SIGMA_CAP, probe=None):
    """s-Holder membership: is the (1+s)-power quotient bounded below as x -> xbar?

    NonMember when along some direction the quotient, over the last four
    levels, comes from numerators clear of rounding and grows in magnitude
    level by level (power-law divergence), or falls monotonically below
    -sigma_cap.
    """
    if not s > 0:
        raise InputError("s must be positive")
    if not sigma_cap > 0:
        raise InputError("sigma_cap must be positive")
    plan = plan or SamplingPlan()
    probe = probe or make_probe(g, xbar, plan)
    xstar = as_vector(xstar, probe.xbar.size, "covector")
    return holder_many(probe, xstar[None, :], s, sigma_cap)[0]


# --------------------------------------------------------------------------- exact predicates


def _witness_point(xbar, d, plan):
    r = (plan or SamplingPlan()).radii()[-1]
    return xbar + r * d


def tangent_cone_generators(A):
    """Unit generators of {d : A d <= 0}: every direction is a nonnegative combination of them.

    The lineality space contributes both signs of an orthonormal basis; the
    pointed remainder contributes its extreme rays.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    if A.shape[0] == 0:
        E = np.eye(n)
        return np.vstack([E, -E])
    _, sv, Vt = np.linalg.svd(A)
    rank = int(np.sum(sv > 1e-12 * sv[0]))
    L, W = Vt[rank:], Vt[:rank]
    gens = [L, -L]
    # the pointed cone {z : (A W^T) z <= 0} in the row space
    B = A @ W.T
    scale = 1e-10 * (1.0 + np.abs(B).max())
    if rank == 1:
        cand = [np.array([1.0]), np.array([-1.0])]
    else:
        cand = []
        for S in combinations(range(B.shape[0]), rank - 1):
            _, s2, V2 = np.linalg.svd(B[list(S)])
            if np.sum(s2 > 1e-12 * s2[0]) < rank - 1:
                continue
            cand.extend([V2[-1], -V2[-1]])
    rays = [z for z in cand if np.all(B @ z <= scale)]
    if rays:
        R = np.array(rays) @ W
        R /= np.linalg.norm(R, axis=1, keepdims=True)
        gens.append(np.unique(np.round(R, 14), axis=0))
    return np.vstack(gens)


def _halfspace_generators(part, xbar):
    return tangent_cone_generators(part.A[part.active_rows(xbar, ACTIVE_TOL)])


def _halfspace_normal_many(gens, C, tol):
    # x* is normal iff <x*, d> <= 0 on every unit generator d
    if len(gens) == 0:
        return np.ones(len(C), dtype=bool), np.zeros(len(C)), np.zeros(len(C), dtype=int)
    V = C @ gens.T
    i = np.argmax(V, axis=1)
    top = V[np.arange(len(C)), i]
    return top <= tol, top, i


def _halfspace_normal(part, xbar, xstar, tol, plan):
    gens = _halfspace_generators(part, xbar)
    ok, top, i = _halfspace_normal_many(gens, xstar[None, :], tol)
    if ok[0]:
        return MembershipResult(Member, None, -max(float(top[0]), 0.0))
    d = gens[i[0]]
    return MembershipResult(NonMember, (_witness_point(xbar, d, plan), -float(top[0])), -float(top[0]))


def _vpolytope_normal(part, xbar, xstar, tol, plan):
    E = part.vertices - xbar
    norms = np.linalg.norm(E, axis=1)
    keep = norms > 0
    if not keep.any():
        return MembershipResult(Member, None, 0.0)
    ratios = (E[keep] @ xstar) / norms[keep]
    i = int(np.argmax(ratios))
    if ratios[i] <= tol:
        return MembershipResult(Member, None, -max(float(ratios[i]), 0.0))
    d = E[keep][i] / norms[keep][i]
    return MembershipResult(NonMember, (_witness_point(xbar, d, plan), -float(ratios[i])), -float(ratios[i]))


def normal_cone_contains(Omega, xbar, xstar, plan=None, tol=DEFAULT_TOL):
    """Exact membership in the Frechet normal cone of a structured region at xbar.

    Also the Holder normal cone for every s: the regions in scope coincide
    near xbar with a finite union of polyhedral cones.
    """
    xbar = as_vector(xbar, Omega.dim, "xbar")
    xstar = as_vector(xstar, Omega.dim, "covector")
    parts = [p for p in Omega.parts() if p.contains(xbar, DEFAULT_TOL)]
    if not parts:
        raise PreconditionError(f"xbar={xbar.tolist()} is not in the region")
    worst = 0.0
    for part in parts:
        if isinstance(part, PointCloud):
            res = MembershipResult(Member, None, 0.0)
        elif isinstance(part, HalfspaceIntersection):
            res = _halfspace_normal(part, xbar, xstar, tol, plan)
        elif isinstance(part, VPolytopeRegion):
            res = _vpolytope_normal(part, xbar, xstar, tol, plan)
        else:
            raise InputError(f"no exact normal cone for {part!r}")
        if res.verdict is NonMember:
            return res
        worst = min(worst, res.worst_quotient)
    return MembershipResult(Member, None, worst)


def _phi_polar(phi):
    """Callable C -> support of the unit body of phi at each row, or None if phi is not a gauge/norm."""
    if isinstance(phi, GaugeField):
        return lambda C: support_many(phi.gauge.body, C)
    if isinstance(phi, NormField) and not np.any(phi.center) and phi.weight > 0:
        q = dual_norm_exponent(phi.p)
        return lambda C: np.linalg.norm(C, ord=q, axis=1) / phi.weight
    return None


def polar_verdicts(phi, C, tol):
    """Exact -x* in d(phi)(0) per row x* of C, or None when phi is not a gauge/norm."""
    sup = _phi_polar(phi)
    if sup is None:
        return None
    C = np.atleast_2d(np.asarray(C, dtype=float))
    return sup(-C) <= 1.0 + tol


def _combine(a, b):
    if a.verdict is NonMember:
        return a
    if b.verdict is NonMember:
        return b
    worst = min(a.worst_quotient, b.worst_quotient)
    if a.verdict is Member and b.verdict is Member:
        return MembershipResult(Member, None, worst)
    return MembershipResult(Undetermined, None, worst)


def critical_plan(T, xbar, plan):
    """plan extended with the directions where the quotients of T, f and phi can be extremal."""
    dirs = []
    shape = _phi_shape(T.phi)
    if shape is not None and shape[0] == "poly":
        dirs.extend(np.atleast_2d(shape[1]))
    region = _indicator_region(T.f)
    if region is None and hasattr(T.f, "region"):
        region = T.f.region
    if region is not None:
        dirs.extend(critical_directions(region, np.asarray(xbar, dtype=float), ACTIVE_TOL))
    return plan.with_directions(dirs) if dirs else plan


def _check_s0(T, xbar):
    xbar = as_vector(xbar, T.dim, "xbar")
    if not is_in_S0(T, xbar, S0_TOL):
        raise PreconditionError(f"xbar={xbar.tolist()} is not in S0")
    return xbar


def _rhs_f_side(T, xbar, xstar, plan, exact_tol, exact, numeric):
    if finite_support(T.f) is not None:
        # every point of a finite domain is isolated
        return MembershipResult(Member, None, 0.0)
    region = _indicator_region(T.f)
    if region is not None and exact:
        return normal_cone_contains(region, xbar, xstar, plan, exact_tol)
    return numeric(T.f, xbar, xstar)


def _rhs_phi_side(T, xstar, exact_tol, exact, numeric):
    if exact:
        ok = polar_verdicts(T.phi, xstar, exact_tol)
        if ok is not None:
            return MembershipResult(Member if ok[0] else NonMember, None, math.nan)
    return numeric(T.phi, np.zeros(T.dim), -xstar)


def rhs_frechet(T, xbar, xstar, epsilon, plan=None):
    """Membership of xstar in the epsilon-Frechet subdifferential of f at xbar intersected with -(that of phi at 0)."""
    if not epsilon >= 0:
        raise InputError("epsilon must be nonnegative")
    plan = critical_plan(T, xbar, plan or SamplingPlan())
    xbar = _check_s0(T, xbar)
    xstar = as_vector(xstar, T.dim, "covector")
    qtol = plan.quotient_tolerance

    def numeric(g, x0, c):
        return frechet_test(g, x0, c, epsilon, plan)

    a = _rhs_f_side(T, xbar, xstar, plan, qtol, epsilon == 0, numeric)
    b = _rhs_phi_side(T, xstar, qtol, epsilon == 0, numeric)
    return _combine(a, b)


def rhs_holder(T, xbar, xstar, s, plan=None, sigma_cap=DEFAULT_SIGMA_CAP):
    """Holder analogue of ``rhs_frechet``; exact sides stay exact for every s."""
    if not s > 0:
        raise InputError("s must be positive")
    plan = critical_plan(T, xbar, plan or SamplingPlan())
    xbar = _check_s0(T, xbar)
    xstar = as_vector(xstar, T.dim, "covector")

    def numeric(g, x0, c):
        return holder_test(g, x0, c, s, plan, sigma_cap)

    a = _rhs_f_side(T, xbar, xstar, plan, HOLDER_POLAR_TOL, True, numeric)
    b = _rhs_phi_side(T, xstar, HOLDER_POLAR_TOL, True, numeric)
    return _combine(a, b)


# --------------------------------------------------------------------------- misc


def alpha_factor(norm_xstar, m, ell):
    """Inflation factor 2(|x*| + m)/(m - ell) + 1 of the epsilon-level inclusion."""
    if not (m > 0 and norm_xstar >= 0 and ell >= 0):
        raise PreconditionError("alpha_factor needs m > 0, ell >= 0, norm_xstar >= 0")
    if ell >= m:
        raise PreconditionError(f"alpha_factor needs ell < m, got ell={ell}, m={m}")
    return 2.0 * (norm_xstar + m) / (m - ell) + 1.0


def _as_member(v):
    if isinstance(v, MembershipResult):
        return v.verdict is Member
    if isinstance(v, Verdict):
        return v is Member
    return bool(v)


def _bisect(test, U, lo, hi, width):
    """Shrink [lo, hi] per row of U until hi - lo <= width; lo stays a member radius."""
    open_ = hi - lo > width
    while open_.any():
        idx = np.flatnonzero(open_)
        mid = 0.5 * (lo[idx] + hi[idx])
        ok = test(U[idx] * mid[:, None])
        lo[idx[ok]] = mid[ok]
        hi[idx[~ok]] = mid[~ok]
        open_ = hi - lo > width
    return lo


def boundary_polygon_2d(predicate, resolution=720, radius_cap=3.0, iterations=40, vectorized=False):
    """Largest member radius along ``resolution`` equally spaced angles.

    ``predicate`` maps a covector to a bool/Verdict/MembershipResult, or with
    ``vectorized=True`` maps a (K, 2) array to a boolean array. Radii come
    from bisection on [0, radius_cap] to width radius_cap / 2**iterations.
    A predicate with a ``radial_hint`` method may propose boundary radii;
    a hint is used only as a bracket the predicate itself confirms.
    """
    if resolution < 1 or not radius_cap > 0:
        raise InputError("resolution must be positive and radius_cap > 0")
    angles = 2 * math.pi * np.arange(resolution) / resolution
    U = np.column_stack([np.cos(angles), np.sin(angles)])

    if vectorized or getattr(predicate, "vectorized", False):
        test = lambda C: np.asarray(predicate(C), dtype=bool)
    else:
        test = lambda C: np.array([_as_member(predicate(c)) for c in C], dtype=bool)

    if not test(np.zeros((1, 2)))[0]:
        return [(float(a), 0.0) for a in angles]
    width = radius_cap / 2.0 ** iterations
    lo = np.zeros(resolution)
    hi = np.full(resolution, float(radius_cap))
    full = test(U * radius_cap)
    lo[full] = radius_cap
    hint = getattr(predicate, "radial_hint", None)
    if hint is not None:
        h = np.asarray(hint(U), dtype=float)
        h = np.where(np.isfinite(h), h, radius_cap)
        pad = np.maximum(4 * width, 1e-12 * (1.0 + h))
        a = np.clip(h - pad, 0.0, radius_cap)
        b = np.clip(h + pad, 0.0, radius_cap)
        cand = ~full & (b > a)
        ok_a = np.zeros(resolution, dtype=bool)
        ok_b = np.ones(resolution, dtype=bool)
        if cand.any():
            ok_a[cand] = test(U[cand] * a[cand, None])
            ok_b[cand] = test(U[cand] * b[cand, None])
        good = cand & ok_a & ~ok_b
        lo[good], hi[good] = a[good], b[good]
    lo[~full] = _bisect(test, U[~full], lo[~full], hi[~full], width)
    return [(float(a), float(r)) for a, r in zip(angles, lo)]


class RadialPredicate:
    """Vectorized Member test for covectors against T at xbar, with closed-form boundary hints."""

    vectorized = True

    def __init__(self, probe, kind, qtol, sigma_cap):
        self.probe, self.kind, self.qtol, self.sigma_cap = probe, kind, qtol, sigma_cap

    def __call__(self, C):
        C = np.atleast_2d(C)
        if isinstance(self.kind, Frechet):
            return _frechet_verdicts(self.probe, C, self.kind.epsilon, self.qtol)[0] == 0
        return _holder_verdicts(self.probe, C, self.kind.s, self.sigma_cap)[0] == 0

    def radial_hint(self, U):
        """Radius t at which t*u stops being Member, from the linear-in-t conditions per sample point."""
        pr = self.probe
        a = U @ pr.D.T  # (A, N)
        pos = a > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            if isinstance(self.kind, Frechet):
                r = pr.radii[-1]
                t = np.where(pos, (pr.diff[-1] / r + self.kind.epsilon + self.qtol) / a, np.inf)
                return np.nanmin(np.where(np.isnan(t), np.inf, t), axis=1)
            s, r = self.kind.s, pr.radii
            # the rounding floor of _holder_verdicts is f0 + t * f1 along the ray t*u
            f0 = ROUNDING_FLOOR * (1.0 + abs(pr.gbar))
            f1 = ROUNDING_FLOOR * (np.abs(U @ pr.xbar) + np.linalg.norm(pr.xbar))  # (A,)
            cap_slack = self.sigma_cap * r ** (1.0 + s)
            # quotient below -sigma_cap at some (level, direction)
            tb = (pr.diff + cap_slack[:, None])[None, :, :] / (r[None, :, None] * a[:, None, :])
            tb = np.where(pos[:, None, :], tb, np.inf).min(axis=(1, 2))
            # divergence: negative numerators and growth over the last levels
            L = DIVERGENCE_LEVELS
            rt, dt = r[-L:], pr.diff[-L:]
            den = rt[None, :, None] * a[:, None, :] - f1[:, None, None]
            need = np.where(den > 0, (dt + f0)[None, :, :] / den, np.inf)
            tdiv = need.max(axis=1)
            for j in range(L - 1):
                theta = rt[j + 1] / rt[j]
                kappa = DIVERGENCE_GROWTH * theta ** (1.0 + s)
                if theta <= kappa:
                    tdiv = np.full_like(tdiv, np.inf)
                    break
                g = (dt[j + 1] - kappa * dt[j])[None, :] / (a * rt[j] * (theta - kappa))
                tdiv = np.maximum(tdiv, g)
            tdiv = np.where(pos, tdiv, np.inf)
            tdiv = np.where(np.isnan(tdiv), np.inf, tdiv)
            return np.minimum(tb, tdiv.min(axis=1))


def lhs_predicate(T, xbar, kind, plan=None, sigma_cap=DEFAULT_SIGMA_CAP):
    """Vectorized Member test for covectors against T at xbar (for polygons and batch checks)."""
    plan = critical_plan(T, xbar, plan or SamplingPlan())
    return RadialPredicate(make_probe(T, xbar, plan), kind, plan.quotient_tolerance, sigma_cap)


def rhs_predicate(T, xbar, kind, plan=None, tol=None):
    """Vectorized Member test for the right-hand-side set (exact sides only).

    ``tol`` defaults to the tolerance of ``rhs_frechet``/``rhs_holder``.
    """
    plan = critical_plan(T, xbar, plan or SamplingPlan())
    xbar = _check_s0(T, xbar)
    holder = isinstance(kind, Holder)
    if tol is None:
        tol = HOLDER_POLAR_TOL if holder else plan.quotient_tolerance
    if not holder and kind.epsilon != 0:
        raise InputError("rhs_predicate is exact only at epsilon = 0")
    if polar_verdicts(T.phi, np.zeros((1, T.dim)), tol) is None:
        raise InputError("rhs_predicate needs phi to be a gauge or norm")
    finite = finite_support(T.f) is not None
    region = _indicator_region(T.f)
    if not finite and region is None:
        raise InputError("rhs_predicate needs f with finite support or an indicator of a structured region")

    parts = [] if finite else [q for q in region.parts() if q.contains(xbar, DEFAULT_TOL)]
    gens = [_halfspace_generators(q, xbar) if isinstance(q, HalfspaceIntersection) else None for q in parts]

    def pred(C):
        C = np.atleast_2d(C)
        ok = polar_verdicts(T.phi, C, tol)
        for q, G in zip(parts, gens):
            if G is not None:
                ok &= _halfspace_normal_many(G, C, tol)[0]
            elif isinstance(q, VPolytopeRegion):
                ok &= np.array([_vpolytope_normal(q, xbar, c, tol, plan).verdict is Member for c in C])
        return ok

    return pred
