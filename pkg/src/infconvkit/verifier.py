"""Falsifiable checks of the subdifferential formulas on fixture instances.

Each check returns a ``CheckRecord``; ``run_suite`` runs a configured set of
checks with per-check wall-clock budgets and collects a ``VerificationReport``.
Reports serialize to one JSON object per line with 17 significant digits,
byte-identical for identical configuration and seed.
"""
from dataclasses import dataclass, field
from enum import Enum
import json
import math
import time
import zlib

import numpy as np

from .convex_bodies import NormBall, Singleton, VPolytope, as_vector
from .errors import DomainEmptyError, InputError, PreconditionError
from .fields import (
    GaugeField, HalfspaceIntersection, Indicator, NormField, Perturbed, PointCloud, Table, Union,
    calm_constant, domain_sample,
)
from .gauge import Gauge, coercivity_constant, gauge_eval, gauge_eval_bisection, polar_contains
from .infconv import InfConvolution, infconv_eval, is_in_S0, minimal_time
from .subdiff import (
    Frechet, Holder, Member, NonMember, SamplingPlan, Undetermined, _frechet_verdicts, _holder_verdicts,
    alpha_factor, boundary_polygon_2d, critical_plan, lhs_predicate, make_probe,
    rhs_frechet, rhs_holder, rhs_predicate,
)

FIXTURE_S0_TOL = 1e-7
DEFAULT_BUDGET = 60.0
UNDETERMINED_CAP = 0.05
COVECTOR_RADII = np.round(np.arange(1, 21) * 0.1, 10)
MAX_COUNTEREXAMPLES = 10
PROPERTY_TOL = 1e-9
ORACLE_TOL = 1e-7
BOUNDARY_TOL = 1e-12

PASS, FAIL, SKIPPED = "pass", "fail", "skipped-hypothesis"


class BudgetExceeded(Exception):
    pass


# --------------------------------------------------------------------------- records


@dataclass
class CheckRecord:
    check_id: str
    fixture: str
    verdict: str
    trials: int = 0
    disagreements: int = 0
    undetermined: int = 0
    worst_gap: float = None
    counterexamples: list = field(default_factory=list)

    def as_dict(self):
        return {
            "check_id": self.check_id, "fixture": self.fixture, "verdict": self.verdict,
            "trials": self.trials, "disagreements": self.disagreements, "undetermined": self.undetermined,
            "worst_gap": self.worst_gap, "counterexamples": self.counterexamples,
        }


@dataclass
class VerificationReport:
    records: list

    @property
    def verdict(self):
        return FAIL if any(r.verdict == FAIL for r in self.records) else PASS

    def counts(self):
        out = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for r in self.records:
            out[r.verdict] += 1
        return out

    def to_lines(self):
        return "".join(dumps(r.as_dict()) + "\n" for r in self.records)


def format_number(v):
    """17 significant digits; infinities and NaN become the strings "+inf", "-inf", "nan"."""
    v = float(v)
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"+inf"' if v > 0 else '"-inf"'
    return "%.17g" % (v + 0.0)  # folds -0 into 0


def dumps(obj):
    """Deterministic JSON text with every float printed by ``format_number``."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, Enum):
        return json.dumps(obj.value)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_number(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# --------------------------------------------------------------------------- fixtures


@dataclass(frozen=True, eq=False)
class Fixture:
    """An instance of the standing hypotheses: phi, f, base points in S0 and optionally a known ell.

    ``phi_kind`` is "gauge" (phi = rho_F) or "distance" (phi = Euclidean norm, F the unit ball).
    """

    name: str
    F: object
    Omega: object
    J: object = None
    phi_kind: str = "gauge"
    base_points: tuple = ()
    known_ell: float = None

    def __post_init__(self):
        if self.phi_kind not in ("gauge", "distance"):
            raise InputError(f"fixture {self.name}: phi_kind must be 'gauge' or 'distance'")
        if self.F.dim != self.Omega.dim:
            raise InputError(f"fixture {self.name}: F and Omega dimensions differ")
        try:
            domain_sample(self.f, 1, 0)
        except DomainEmptyError as e:
            raise DomainEmptyError(f"fixture {self.name}: {e}") from None
        pts = tuple(as_vector(p, self.dim, "base point") for p in self.base_points)
        if not pts:
            raise InputError(f"fixture {self.name}: needs at least one base point")
        object.__setattr__(self, "base_points", pts)
        T = self.T
        for p in pts:
            if not is_in_S0(T, p, FIXTURE_S0_TOL):
                raise PreconditionError(f"fixture {self.name}: base point {p.tolist()} is not in S0")
        if self.known_ell is not None and not self.known_ell < self.m:
            raise PreconditionError(f"fixture {self.name}: known_ell={self.known_ell} is not below m={self.m}")

    @property
    def dim(self):
        return self.F.dim

    @property
    def f(self):
        return Indicator(self.Omega) if self.J is None else Perturbed(self.J, self.Omega)

    @property
    def phi(self):
        if self.phi_kind == "distance":
            return NormField(2, self.dim)
        return GaugeField(Gauge(self.F))

    @property
    def T(self):
        if "_T" not in self.__dict__:
            object.__setattr__(self, "_T", InfConvolution(self.phi, self.f))
        return self.__dict__["_T"]

    @property
    def m(self):
        if self.phi_kind == "distance":
            return 1.0
        return coercivity_constant(Gauge(self.F))

    def ell(self, xbar):
        if self.known_ell is not None:
            return self.known_ell
        return calm_constant(self.f, xbar).ell


def _square():
    return HalfspaceIntersection([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 0, 1, 0])


def _perturbed(name, ell, scale):
    pts = np.array([[0, 0], [1, 0.2], [-0.4, 1], [-0.8, -0.6], [0.5, -1]], dtype=float)
    J = Table(pts, 1.0 + ell * np.linalg.norm(pts, axis=1))
    T1 = np.array([[1, 0], [0, 1], [-0.6, -0.8]], dtype=float)
    return Fixture(name, VPolytope(scale * T1), PointCloud(pts), J, "gauge", ([0, 0], [-0.4, 1]), ell)


def bundled_fixtures():
    """The bundled fixture set, in suite order."""
    ball = NormBall(2, 1.0, 2)
    return [
        Fixture("two_points", ball, PointCloud([[3, 0], [0, 4]]), None, "distance", ([3, 0], [0, 4]), 0.0),
        Fixture("half_plane", ball, HalfspaceIntersection([[0, 1]], [0]), None, "distance",
                ([0, 0], [0, -1]), 0.0),
        Fixture("square_simplex", VPolytope([[1, 0], [0, 1], [-1, -1]]), _square(), None, "gauge",
                ([1, 1], [0, 0.5]), 0.0),
        Fixture("square_offset_simplex", VPolytope([[1, 0], [0, 1], [1, 1]]), _square(), None, "gauge",
                ([0, 0], [1, 1], [0.5, 1]), 0.0),
        _perturbed("perturbed_l0_m1", 0.0, 1.0),
        _perturbed("perturbed_l03_m05", 0.3, 2.0),
        _perturbed("perturbed_l03_m1", 0.3, 1.0),
        Fixture("half_line", VPolytope([[-1], [2]]), HalfspaceIntersection([[-1]], [0]), None, "gauge",
                ([0], [1]), 0.0),
        Fixture("steep_table", ball, PointCloud([[0, 0], [1, 0], [0, 1]]),
                Table([[0, 0], [1, 0], [0, 1]], [0, 2, 2]), "distance", ([0, 0],), None),
        Fixture("l_shape", ball, Union((_square(), HalfspaceIntersection(
            [[1, 0], [-1, 0], [0, 1], [0, -1]], [2, -1, 0.5, 0]))), None, "distance", ([1, 0.5], [2, 0]), 0.0),
    ]


def gauge_bodies():
    """Bodies for the gauge property check: name -> ConvexBody."""
    return {
        "simplex": VPolytope([[1, 0], [0, 1]]),
        "euclidean_ball": NormBall(2, 1.0, 2),
        "t_triangle": VPolytope([[1, 0], [0, 1], [-1, -1]]),
        "cube": NormBall("inf", 1.0, 2),
        "cross_polytope": NormBall(1, 1.0, 2),
        "segment_1d": VPolytope([[-1], [2]]),
        "singleton_ray": Singleton([1, 0]),
        "singleton_zero": Singleton([0, 0]),
    }


# --------------------------------------------------------------------------- helpers


def _rng(seed, *labels):
    return np.random.default_rng([int(seed)] + [zlib.crc32(str(x).encode()) for x in labels])


def sample_covectors(n, count, seed, *labels):
    """Seeded covectors: uniform directions times radii drawn from {0.1, ..., 2.0}."""
    rng = _rng(seed, "covectors", *labels)
    D = rng.normal(size=(count, n))
    D /= np.linalg.norm(D, axis=1, keepdims=True)
    return D * rng.choice(COVECTOR_RADII, size=count)[:, None]


def boundary_covectors(T, xbar, plan=None, angles=16):
    """0 and points on the boundary of the exact right-hand-side set, approached from inside."""
    out = [np.zeros(T.dim)]
    try:
        # strict tolerance so the points lie inside the set, not within tolerance outside it
        pred = rhs_predicate(T, xbar, Frechet(0.0), plan, tol=BOUNDARY_TOL)
    except InputError:
        return np.array(out)
    if T.dim == 2:
        for a, r in boundary_polygon_2d(pred, angles, 3.0, vectorized=True):
            if r > 0:
                out.append(r * np.array([math.cos(a), math.sin(a)]))
    elif T.dim == 1:
        for sgn in (1.0, -1.0):
            lo, hi = 0.0, 3.0
            if pred(np.array([[sgn * hi]]))[0]:
                lo = hi
            else:
                for _ in range(40):
                    mid = 0.5 * (lo + hi)
                    lo, hi = (mid, hi) if pred(np.array([[sgn * mid]]))[0] else (lo, mid)
            if lo > 0:
                out.append(np.array([sgn * lo]))
    return np.array(out)


def _tick(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetExceeded()


def _vlabel(code):
    return (Member, NonMember, Undetermined)[int(code)].value


def _finish(rec, decided_total=None):
    """Set the verdict from disagreements and the undetermined rate."""
    if rec.verdict == SKIPPED:
        return rec
    total = decided_total if decided_total is not None else rec.trials
    rate = rec.undetermined / total if total else 0.0
    if rec.disagreements:
        rec.verdict = FAIL
    elif rate > UNDETERMINED_CAP:
        rec.verdict = FAIL
        rec.counterexamples.append({"reason": "inconclusive", "undetermined_rate": rate})
    else:
        rec.verdict = PASS
    return rec


def _add_counterexample(rec, item):
    rec.disagreements += 1
    if len(rec.counterexamples) < MAX_COUNTEREXAMPLES:
        rec.counterexamples.append(item)


def _gate(fx, rec):
    for xbar in fx.base_points:
        ell = fx.ell(xbar)
        if not ell < fx.m:
            rec.verdict = SKIPPED
            rec.counterexamples.append({"reason": "hypothesis ell < m violated", "base_point": xbar,
                                        "ell": ell, "m": fx.m})
            return True
    return False


# --------------------------------------------------------------------------- gauge properties


def check_gauge_properties(F, trials=10_000, seed=0, name="body", gauge_fn=None, deadline=None):
    """rho(0) = 0, homogeneity, subadditivity, coercivity, LP vs bisection, polar vs subgradient inequality."""
    g = Gauge(F)
    rho = gauge_fn or (lambda x: gauge_eval(g, x))
    m = coercivity_constant(g)
    n = F.dim
    rng = _rng(seed, "gauge", name)
    rec = CheckRecord("gauge_properties", name, PASS)

    def fail(kind, **data):
        _add_counterexample(rec, {"property": kind, **data})

    def close(a, b, scale):
        if math.isinf(a) or math.isinf(b):
            return a == b
        return abs(a - b) <= PROPERTY_TOL * (1.0 + scale)

    zero = rho(np.zeros(n))
    rec.trials += 1
    if zero != 0.0:
        fail("rho(0) = 0", value=zero)

    X = rng.uniform(-2, 2, size=(trials, n))
    Y = rng.uniform(-2, 2, size=(trials, n))
    t = rng.uniform(0.0, 3.0, size=trials)
    # points of the cone of F so that the finite branch is exercised even for thin bodies
    G = F.generators()
    if G is not None:
        half = trials // 2
        W = rng.exponential(size=(half, len(G)))
        X[:half] = W @ G
        Y[:half] = rng.exponential(size=(half, len(G))) @ G
    for k in range(trials):
        if k % 256 == 0:
            _tick(deadline)
        x, y = X[k], Y[k]
        rx, ry, rtx, rxy = rho(x), rho(y), rho(t[k] * x), rho(x + y)
        rec.trials += 1
        if not close(rtx, t[k] * rx, t[k] * rx if math.isfinite(rx) else 0.0):
            fail("homogeneity", x=x, t=t[k], lhs=rtx, rhs=t[k] * rx)
        if math.isfinite(rx) and math.isfinite(ry) and rxy > rx + ry + PROPERTY_TOL * (1 + rx + ry):
            fail("subadditivity", x=x, y=y, lhs=rxy, rhs=rx + ry)
        if m * np.linalg.norm(x) > rx + PROPERTY_TOL * (1 + rx):
            fail("coercivity", x=x, lhs=m * np.linalg.norm(x), rhs=rx)

    # LP value against the bisection oracle
    for k in range(min(trials, 200)):
        _tick(deadline)
        x = X[k]
        a, b = rho(x), gauge_eval_bisection(g, x)
        rec.trials += 1
        if math.isinf(a) != math.isinf(b) or (math.isfinite(a) and abs(a - b) > ORACLE_TOL * (1 + abs(b))):
            fail("lp_vs_bisection", x=x, lp=a, bisection=b)

    # polar predicate against the subgradient inequality <x*, u> <= rho(u) on test points
    U = list(rng.normal(size=(720, n)))
    if G is not None:
        U.extend(G)
    C = sample_covectors(n, 500, seed, "polar", name)
    rho_U = np.array([rho(u) for u in U])
    for c in C:
        _tick(deadline)
        tests = U + [c / np.linalg.norm(c)]
        vals = np.append(rho_U, rho(tests[-1]))
        ineq = bool(np.all(np.array(tests) @ c <= vals + PROPERTY_TOL * (1 + np.abs(np.where(np.isfinite(vals), vals, 0)))))
        rec.trials += 1
        if ineq != polar_contains(g, c):
            fail("polar_consistency", covector=c, polar=polar_contains(g, c), inequality=ineq)
    return _finish(rec)


# --------------------------------------------------------------------------- theorem checks


def _lhs_codes(probe, C, kind, plan, sigma_cap=1e6):
    if isinstance(kind, Frechet):
        return _frechet_verdicts(probe, C, kind.epsilon, plan.quotient_tolerance)[0]
    return _holder_verdicts(probe, C, kind.s, sigma_cap)[0]


def _covectors_for(fx, xbar, trials, seed, plan, label):
    C = sample_covectors(fx.dim, trials, seed, fx.name, tuple(xbar.tolist()), label)
    return np.vstack([boundary_covectors(fx.T, xbar, plan), C])


def check_upper_estimate(fx, epsilon, trials=500, seed=0, plan=None, deadline=None):
    """No covector is Member for T at level epsilon while the right-hand side says NonMember."""
    rec = CheckRecord(f"upper_estimate[eps={epsilon:g}]", fx.name, PASS)
    base = plan or SamplingPlan()
    T = fx.T
    for xbar in fx.base_points:
        _tick(deadline)
        P = critical_plan(T, xbar, base)
        probe = make_probe(T, xbar, P)
        C = _covectors_for(fx, xbar, trials, seed, P, "upper")
        codes = _lhs_codes(probe, C, Frechet(epsilon), P)
        for c, code in zip(C, codes):
            rec.trials += 1
            if code == 2:
                rec.undetermined += 1
            if code != 0:
                continue
            _tick(deadline)
            rhs = rhs_frechet(T, xbar, c, epsilon, base)
            if rhs.verdict is NonMember:
                _add_counterexample(rec, {"base_point": xbar, "covector": c, "lhs": "Member", "rhs": "NonMember"})
    return _finish(rec)


def _rhs_codes(fx, xbar, C, kind, base, rhs_override):
    """0 Member / 1 NonMember / 2 Undetermined for the right-hand side of each covector."""
    if rhs_override is not None:
        ok = np.asarray(rhs_override(fx.T, xbar, kind, base)(C), dtype=bool)
        return np.where(ok, 0, 1)
    try:
        ok = rhs_predicate(fx.T, xbar, kind, base)(C)
        return np.where(ok, 0, 1)
    except InputError:
        pass
    fn = (lambda c: rhs_frechet(fx.T, xbar, c, kind.epsilon, base)) if isinstance(kind, Frechet) else \
        (lambda c: rhs_holder(fx.T, xbar, c, kind.s, base))
    return np.array([(Member, NonMember, Undetermined).index(fn(c).verdict) for c in C])


def _equality_core(fx, kinds, label, trials, seed, hausdorff_tol, resolution, plan, deadline, rhs_override,
                   cross_s=False):
    rec = CheckRecord(label, fx.name, PASS, worst_gap=0.0 if fx.dim == 2 else None)
    if _gate(fx, rec):
        return rec
    base = plan or SamplingPlan()
    T = fx.T
    inconclusive = False
    for xbar in fx.base_points:
        _tick(deadline)
        P = critical_plan(T, xbar, base)
        probe = make_probe(T, xbar, P)
        C = _covectors_for(fx, xbar, trials, seed, P, "equality")
        decided_by_kind = []
        undetermined_here = 0
        for kind in kinds:
            _tick(deadline)
            lhs = _lhs_codes(probe, C, kind, P)
            rhs = _rhs_codes(fx, xbar, C, kind, base, rhs_override)
            tag = {"epsilon": kind.epsilon} if isinstance(kind, Frechet) else {"s": kind.s}
            for c, a, b in zip(C, lhs, rhs):
                rec.trials += 1
                if a == 2 or b == 2:
                    rec.undetermined += 1
                    undetermined_here += 1
                elif a != b:
                    _add_counterexample(rec, {"base_point": xbar, "covector": c, **tag,
                                              "lhs": _vlabel(a), "rhs": _vlabel(b)})
            decided_by_kind.append(np.where((lhs == 2) | (rhs == 2), 2, lhs))
            if fx.dim == 2:
                _tick(deadline)
                if rhs_override is not None:
                    rp = rhs_override(T, xbar, kind, base)
                else:
                    rp = rhs_predicate(T, xbar, kind, base)
                lp_ = boundary_polygon_2d(lhs_predicate(T, xbar, kind, base), resolution, 3.0, vectorized=True)
                rp_ = boundary_polygon_2d(rp, resolution, 3.0, vectorized=True)
                gaps = [abs(a[1] - b[1]) for a, b in zip(lp_, rp_)]
                k = int(np.argmax(gaps))
                rec.worst_gap = max(rec.worst_gap, gaps[k])
                if gaps[k] > hausdorff_tol:
                    _add_counterexample(rec, {"base_point": xbar, **tag, "angle": lp_[k][0],
                                              "lhs_radius": lp_[k][1], "rhs_radius": rp_[k][1]})
        if cross_s and len(decided_by_kind) > 1:
            D = np.array(decided_by_kind)
            for j, c in enumerate(C):
                col = D[:, j]
                dec = col[col != 2]
                if dec.size and np.any(dec != dec[0]):
                    _add_counterexample(rec, {"base_point": xbar, "covector": c, "reason": "cross-s",
                                              "verdicts": [_vlabel(v) for v in col]})
        per_point = len(C) * len(kinds)
        if undetermined_here / per_point > UNDETERMINED_CAP:
            inconclusive = True
    _finish(rec)
    if inconclusive and rec.verdict == PASS:
        rec.verdict = FAIL
        rec.counterexamples.append({"reason": "inconclusive"})
    return rec


def check_frechet_equality(fx, trials=500, seed=0, hausdorff_tol=0.05, resolution=720, plan=None,
                           deadline=None, rhs_override=None):
    """Pointwise and polygonal agreement of the Frechet subdifferential of T with f-side and phi-side sets."""
    return _equality_core(fx, [Frechet(0.0)], "frechet_equality", trials, seed, hausdorff_tol, resolution,
                          plan, deadline, rhs_override)


def check_holder_equality(fx, s_values=(0.5, 1.0, 2.0), trials=500, seed=0, hausdorff_tol=0.05, resolution=720,
                          plan=None, deadline=None, rhs_override=None):
    """Holder version for each s, plus agreement of the decided sets across the s values."""
    return _equality_core(fx, [Holder(float(s)) for s in s_values], "holder_equality", trials, seed,
                          hausdorff_tol, resolution, plan, deadline, rhs_override, cross_s=True)


def check_alpha_inflation(fx, epsilon=0.1, trials=200, seed=0, plan=None, deadline=None, max_candidates=20_000):
    """Covectors in both epsilon-level right-hand sides are never rejected at level alpha*epsilon."""
    rec = CheckRecord(f"alpha_inflation[eps={epsilon:g}]", fx.name, PASS)
    if _gate(fx, rec):
        return rec
    base = plan or SamplingPlan()
    T = fx.T
    for xbar in fx.base_points:
        ell = fx.ell(xbar)
        P = critical_plan(T, xbar, base)
        probe = make_probe(T, xbar, P)
        accepted, drawn, batch = 0, 0, 0
        while accepted < trials and drawn < max_candidates:
            _tick(deadline)
            C = sample_covectors(fx.dim, 500, seed, fx.name, tuple(xbar.tolist()), "alpha", batch) * 0.5
            batch += 1
            for c in C:
                drawn += 1
                if rhs_frechet(T, xbar, c, epsilon, base).verdict is not Member:
                    continue
                accepted += 1
                rec.trials += 1
                alpha = alpha_factor(float(np.linalg.norm(c)), fx.m, ell)
                code = _frechet_verdicts(probe, c[None, :], alpha * epsilon, P.quotient_tolerance)[0][0]
                if code == 2:
                    rec.undetermined += 1
                elif code == 1:
                    _add_counterexample(rec, {"base_point": xbar, "covector": c, "alpha": alpha,
                                              "lhs": "NonMember"})
                if accepted >= trials:
                    break
        if accepted < trials:
            rec.counterexamples.append({"reason": "too few right-hand-side members", "base_point": xbar,
                                        "accepted": accepted})
            rec.verdict = FAIL
            return rec
    return _finish(rec)


def check_degenerate_branches(seed=0, deadline=None):
    """Zero body, infeasible cones, empty regions and out-of-hypothesis parameters."""
    rec = CheckRecord("degenerate_branches", "degenerate", PASS)

    def case(label, fn):
        _tick(deadline)
        rec.trials += 1
        try:
            ok = fn()
        except Exception as e:  # a crash is a failed case, not a suite abort
            ok = False
            label = f"{label}: {type(e).__name__}: {e}"
        if not ok:
            _add_counterexample(rec, {"case": label})

    zero = Gauge(Singleton([0, 0]), zero_body_constant=2.0)
    case("zero body gauge at 0", lambda: gauge_eval(zero, [0, 0]) == 0.0)
    case("zero body gauge off 0", lambda: gauge_eval(zero, [1e-3, 0]) == math.inf)
    case("zero body coercivity constant", lambda: coercivity_constant(zero) == 2.0)
    case("zero body polar is everything", lambda: polar_contains(zero, [5.0, -7.0]))
    simplex = Gauge(VPolytope([[1, 0], [0, 1]]))
    case("gauge outside the cone", lambda: gauge_eval(simplex, [-1, 0]) == math.inf)
    case("bisection outside the cone", lambda: gauge_eval_bisection(simplex, [-1, 0]) == math.inf)
    case("minimal time along a ray", lambda: minimal_time(Singleton([1, 0]), PointCloud([[2, 0]]), [0, 0]).value == 2.0)
    case("minimal time unreachable",
         lambda: minimal_time(Singleton([1, 0]), PointCloud([[2, 0]]), [3, 0]).value == math.inf)
    case("unreachable square",
         lambda: infconv_eval(InfConvolution(GaugeField(simplex), Indicator(_square())), [2, 0.5]).value == math.inf)

    def empty_region():
        try:
            domain_sample(Indicator(HalfspaceIntersection([[1, 0], [-1, 0]], [0, -1])), 5, seed)
        except DomainEmptyError:
            return True
        return False

    case("empty region sampling", empty_region)

    def empty_fixture():
        try:
            Fixture("empty", NormBall(2, 1.0, 2), HalfspaceIntersection([[1, 0], [-1, 0]], [0, -1]),
                    None, "distance", ([0, 0],))
        except DomainEmptyError as e:
            return "empty" in str(e)
        return False

    case("empty fixture names itself", empty_fixture)

    def alpha_gate():
        try:
            alpha_factor(1.0, 1.0, 1.0)
        except PreconditionError:
            return True
        return False

    case("alpha needs ell < m", alpha_gate)

    def gating():
        steep = [f for f in bundled_fixtures() if f.name == "steep_table"][0]
        return check_frechet_equality(steep, trials=5, seed=seed, resolution=8).verdict == SKIPPED

    case("ell >= m is skipped", gating)
    return _finish(rec)


# --------------------------------------------------------------------------- suite


CHECKS = ("gauge_properties", "upper_estimate", "frechet_equality", "holder_equality", "alpha_inflation",
          "degenerate_branches")
FAULTS = ("gauge_off_by_one", "rhs_dilated")

_CONFIG_KEYS = {
    "fixtures", "checks", "seed", "budget_seconds", "gauge_trials", "covector_trials", "alpha_trials",
    "epsilons", "s_values", "resolution", "hausdorff_tol", "fault",
}


@dataclass
class SuiteConfig:
    fixtures: list
    checks: tuple = CHECKS
    seed: int = 0
    budget_seconds: float = DEFAULT_BUDGET
    gauge_trials: int = 10_000
    covector_trials: int = 500
    alpha_trials: int = 200
    epsilons: tuple = (0.0, 0.25)
    s_values: tuple = (0.5, 1.0, 2.0)
    resolution: int = 720
    hausdorff_tol: float = 0.05
    fault: str = None


def parse_config(config):
    """Validate a config mapping; raises InputError naming the offending key."""
    if not isinstance(config, dict):
        raise InputError("config must be an object")
    for k in config:
        if k not in _CONFIG_KEYS:
            raise InputError(f"config: unknown key {k!r}")
    fx_spec = config.get("fixtures", "bundled")
    by_name = {f.name: f for f in bundled_fixtures()} if fx_spec is not None else {}
    if fx_spec == "bundled":
        fixtures = list(by_name.values())
    elif isinstance(fx_spec, list):
        fixtures = []
        for i, item in enumerate(fx_spec):
            if isinstance(item, str):
                if item not in by_name:
                    raise InputError(f"config: fixtures[{i}]: unknown fixture {item!r}")
                fixtures.append(by_name[item])
            elif isinstance(item, dict):
                fixtures.append(fixture_from_obj(item, f"fixtures[{i}]"))
            else:
                raise InputError(f"config: fixtures[{i}] must be a name or an object")
    else:
        raise InputError("config: fixtures must be \"bundled\" or a list")
    if not fixtures:
        raise InputError("config: fixtures is empty")
    checks = tuple(config.get("checks", CHECKS))
    for c in checks:
        if c not in CHECKS:
            raise InputError(f"config: checks: unknown check {c!r}")
    fault = config.get("fault")
    if fault is not None and fault not in FAULTS:
        raise InputError(f"config: fault must be one of {list(FAULTS)}")

    def num(key, default, kind=float, positive=True):
        v = config.get(key, default)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or (kind is int and not isinstance(v, int)):
            raise InputError(f"config: {key} must be a number")
        if positive and not v > 0:
            raise InputError(f"config: {key} must be positive")
        return kind(v)

    def numlist(key, default):
        v = config.get(key, default)
        if not isinstance(v, (list, tuple)) or not v or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) and x >= 0 for x in v):
            raise InputError(f"config: {key} must be a nonempty list of nonnegative numbers")
        return tuple(float(x) for x in v)

    seed = config.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise InputError("config: seed must be a nonnegative integer")
    s_values = numlist("s_values", (0.5, 1.0, 2.0))
    if not all(s > 0 for s in s_values):
        raise InputError("config: s_values must be positive")
    return SuiteConfig(
        fixtures, checks, seed, num("budget_seconds", DEFAULT_BUDGET), num("gauge_trials", 10_000, int),
        num("covector_trials", 500, int), num("alpha_trials", 200, int), numlist("epsilons", (0.0, 0.25)),
        s_values, num("resolution", 720, int), num("hausdorff_tol", 0.05), fault,
    )


def fixture_from_obj(obj, where="fixture"):
    from .scene import _SpecError, read_body, read_field, read_region

    try:
        if not isinstance(obj, dict):
            raise _SpecError([], "expected an object")
        allowed = {"name", "dimension", "F", "Omega", "J", "phi_kind", "base_points", "known_ell"}
        for k in obj:
            if k not in allowed:
                raise _SpecError([k], f"unknown key {k!r}")
        for k in ("name", "dimension", "F", "Omega", "base_points"):
            if k not in obj:
                raise _SpecError([], f"missing key {k!r}")
        dim = obj["dimension"]
        F = read_body(obj["F"], ["F"], dim)
        Omega = read_region(obj["Omega"], ["Omega"], dim)
        J = read_field(obj["J"], ["J"], dim) if "J" in obj else None
    except _SpecError as e:
        from .scene import format_path
        raise InputError(f"config: {where}.{format_path(e.path)}: {e.message}") from None
    return Fixture(str(obj["name"]), F, Omega, J, obj.get("phi_kind", "gauge"), tuple(obj["base_points"]),
                   obj.get("known_ell"))


def _dilated_rhs(T, xbar, kind, plan):
    # fault double: the exact right-hand side stretched by a factor 2
    pred = rhs_predicate(T, xbar, kind, plan)
    return lambda C: pred(0.5 * np.atleast_2d(C))


def _planned_checks(cfg):
    """(check_id, fixture name, thunk taking a deadline) in report order."""
    out = []
    seed = cfg.seed
    if "gauge_properties" in cfg.checks:
        for name, F in gauge_bodies().items():
            fn = None
            if cfg.fault == "gauge_off_by_one":
                fn = (lambda g: lambda x: 0.5 * gauge_eval(g, x))(Gauge(F))
            out.append(("gauge_properties", name, (lambda F=F, name=name, fn=fn: lambda d: check_gauge_properties(
                F, cfg.gauge_trials, seed, name, fn, d))()))
    override = _dilated_rhs if cfg.fault == "rhs_dilated" else None
    for fx in cfg.fixtures:
        if "upper_estimate" in cfg.checks:
            for eps in cfg.epsilons:
                out.append((f"upper_estimate[eps={eps:g}]", fx.name, (lambda fx=fx, eps=eps: lambda d: check_upper_estimate(
                    fx, eps, cfg.covector_trials, seed, deadline=d))()))
        if "frechet_equality" in cfg.checks:
            out.append(("frechet_equality", fx.name, (lambda fx=fx: lambda d: check_frechet_equality(
                fx, cfg.covector_trials, seed, cfg.hausdorff_tol, cfg.resolution, deadline=d,
                rhs_override=override))()))
        if "holder_equality" in cfg.checks:
            out.append(("holder_equality", fx.name, (lambda fx=fx: lambda d: check_holder_equality(
                fx, cfg.s_values, cfg.covector_trials, seed, cfg.hausdorff_tol, cfg.resolution, deadline=d,
                rhs_override=override))()))
        if "alpha_inflation" in cfg.checks and fx.J is not None:
            out.append(("alpha_inflation[eps=0.1]", fx.name, (lambda fx=fx: lambda d: check_alpha_inflation(
                fx, 0.1, cfg.alpha_trials, seed, deadline=d))()))
    if "degenerate_branches" in cfg.checks:
        out.append(("degenerate_branches", "degenerate", lambda d: check_degenerate_branches(seed, d)))
    return out


def run_suite(config=None, progress=None):
    """Run the configured checks; each gets ``budget_seconds`` of wall clock.

    ``progress(record, seconds)`` is called after each check; timings stay
    out of the report so that reports are reproducible.
    """
    cfg = config if isinstance(config, SuiteConfig) else parse_config(config or {})
    records = []
    for check_id, fixture, thunk in _planned_checks(cfg):
        start = time.monotonic()
        try:
            rec = thunk(start + cfg.budget_seconds)
        except BudgetExceeded:
            rec = CheckRecord(check_id, fixture, FAIL, counterexamples=[{"reason": "budget"}])
        records.append(rec)
        if progress is not None:
            progress(rec, time.monotonic() - start)
    return VerificationReport(records)
