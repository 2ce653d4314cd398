import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import linprog as scipy_linprog, minimize

from infconvkit.convex_bodies import NormBall, Singleton, VPolytope
from infconvkit.errors import InputError
from infconvkit.fields import (
    GaugeField, HalfspaceIntersection, Indicator, NormField, Perturbed, PointCloud, Table, Union,
    VPolytopeRegion, Zero,
)
from infconvkit.gauge import Gauge
from infconvkit.infconv import (
    ConvexProgram, DomainUnreachableWarning, ExactEnumeration, GridSearch, InfConvolution,
    distance_function, grid_levels, infconv_eval, is_in_S0, minimal_time, minimal_time_function,
    perturbed_distance,
)

TWO = PointCloud([[3, 0], [0, 4]])
EUCLID = NormField(2, 2)
coord = st.integers(-3000, 3000).map(lambda k: k * 1e-3)
pt = arrays(float, 2, elements=coord)


def random_halfspaces(rng):
    # polygon around a random centre, so it is nonempty and bounded
    k = int(rng.integers(3, 7))
    ang = 2 * np.pi * (np.arange(k) + rng.uniform(-0.3, 0.3, k)) / k
    A = np.c_[np.cos(ang), np.sin(ang)]
    c = rng.uniform(-1, 1, 2)
    return HalfspaceIntersection(A, A @ c + rng.uniform(0.3, 1.5, k))


def scipy_poly_value(G, region, x):
    # min t s.t. y - x = G^T mu, sum mu = t, y in region; variables (y, mu)
    k, n = G.shape
    c = np.r_[np.zeros(n), np.ones(k)]
    A_eq = np.hstack([np.eye(n), -G.T])
    if isinstance(region, HalfspaceIntersection):
        res = scipy_linprog(c, A_ub=np.hstack([region.A, np.zeros((len(region.A), k))]), b_ub=region.b,
                            A_eq=A_eq, b_eq=x, bounds=[(None, None)] * n + [(0, None)] * k, method="highs")
    else:
        W = region.vertices
        # y = W^T lam, sum lam = 1
        c = np.r_[np.zeros(len(W)), np.ones(k)]
        A_eq = np.vstack([np.hstack([W.T, -G.T]), np.r_[np.ones(len(W)), np.zeros(k)]])
        res = scipy_linprog(c, A_eq=A_eq, b_eq=np.r_[x, 1], bounds=[(0, None)] * (len(W) + k), method="highs")
    return res.fun if res.status == 0 else math.inf


def scipy_projection_distance(region, x):
    cons = [{"type": "ineq", "fun": lambda y: region.b - region.A @ y, "jac": lambda y: -region.A}]
    y0, _ = region.chebyshev_center()
    res = minimize(lambda y: 0.5 * np.sum((y - x) ** 2), y0, jac=lambda y: y - x, constraints=cons,
                   method="SLSQP", options={"ftol": 1e-14, "maxiter": 500})
    return float(np.linalg.norm(res.x - x))


# ---------------------------------------------------------------- examples


def test_infconv_examples():
    T = InfConvolution(EUCLID, Indicator(TWO))
    r = infconv_eval(T, [0, 0])
    assert r.value == 3
    assert [y.tolist() for y, _ in r.minimizers] == [[3, 0]]
    r = infconv_eval(T, [3, 0])
    assert r.value == 0 and [y.tolist() for y, _ in r.minimizers] == [[3, 0]]
    T = InfConvolution(EUCLID, Table([[3, 0], [0, 4]], [5.0, 0.0]))
    r = infconv_eval(T, [0, 0])
    assert r.value == 4 and [y.tolist() for y, _ in r.minimizers] == [[0, 4]]
    assert isinstance(T.strategy, ExactEnumeration) and not r.approximate


def test_minimal_time_examples():
    F, Om = Singleton([1, 0]), PointCloud([[2, 0]])
    assert minimal_time(F, Om, [0, 0]).value == pytest.approx(2)
    assert minimal_time(F, Om, [3, 0]).value == math.inf
    assert minimal_time(F, Om, [3, 0]).minimizers == []


def test_is_in_S0_examples():
    T = InfConvolution(EUCLID, Indicator(TWO))
    assert is_in_S0(T, [0, 4])
    assert not is_in_S0(T, [1, 1])
    f = Perturbed(Table([[0, 0], [3, 0]], [0.0, 10.0]), PointCloud([[0, 0], [3, 0]]))
    T = InfConvolution(EUCLID, f)
    assert not is_in_S0(T, [3, 0])
    assert infconv_eval(T, [3, 0]).value == 3
    assert is_in_S0(T, [0, 0])
    with pytest.raises(InputError):
        is_in_S0(T, [0, 0], tol=-1)


def test_ties_are_sorted_and_within_slack():
    T = InfConvolution(EUCLID, Indicator(PointCloud([[1, 0], [0, 1], [-1, 0], [0, -1], [2, 2]])))
    r = infconv_eval(T, [0, 0], slack=0.0)
    assert [y.tolist() for y, _ in r.minimizers] == [[-1, 0], [0, -1], [0, 1], [1, 0]]
    r = infconv_eval(T, [0, 0], slack=2.0)
    assert len(r.minimizers) == 5


def test_construction_errors():
    with pytest.raises(InputError):
        InfConvolution(NormField(2, 2, center=[1, 0]), Indicator(TWO))  # phi(0) != 0
    with pytest.raises(InputError):
        InfConvolution(NormField(2, 3), Indicator(TWO))
    with pytest.raises(InputError):
        InfConvolution(EUCLID, Perturbed(NormField(1, 2), VPolytopeRegion([[0, 0], [1, 0], [0, 1]])))
    with pytest.raises(InputError):
        InfConvolution(EUCLID, Indicator(VPolytopeRegion([[0, 0], [1, 0]])), ExactEnumeration())
    with pytest.raises(InputError):
        GridSearch([0, 0], [0, 1])
    with pytest.raises(InputError):
        infconv_eval(InfConvolution(EUCLID, Indicator(TWO)), [0, 0], slack=-1)


def test_grid_unreachable_warns():
    f = Perturbed(NormField(1, 2), VPolytopeRegion([[5, 5], [6, 5], [5, 6]]))
    T = InfConvolution(EUCLID, f, GridSearch([-1, -1], [1, 1], resolution=8))
    with pytest.warns(DomainUnreachableWarning):
        r = infconv_eval(T, [0, 0])
    assert r.value == math.inf and r.approximate


def test_grid_matches_exact_value():
    region = VPolytopeRegion([[1, 1], [2, 1], [1, 2]])
    T = InfConvolution(EUCLID, Perturbed(Zero(2), region), GridSearch([0, 0], [3, 3]))
    exact = distance_function(region)
    assert isinstance(exact.strategy, ConvexProgram)
    for x in ([0, 0], [3, 3], [1.5, 0]):
        g, e = infconv_eval(T, x).value, infconv_eval(exact, x).value
        assert e <= g <= e + 3 / 64 / 8  # one refined cell width


# ---------------------------------------------------------------- exact programs vs scipy


@pytest.mark.parametrize("seed", range(20))
def test_polyhedral_program_matches_highs(seed):
    rng = np.random.default_rng(seed)
    G = rng.uniform(-1, 1, size=(int(rng.integers(2, 6)), 2))
    region = random_halfspaces(rng) if seed % 2 else VPolytopeRegion(rng.uniform(-2, 2, size=(4, 2)))
    T = minimal_time_function(VPolytope(G), region)
    assert isinstance(T.strategy, ConvexProgram)
    X = rng.uniform(-3, 3, size=(15, 2))
    vals = T.values(X)
    for x, v in zip(X, vals):
        ref = scipy_poly_value(G, region, x)
        assert math.isinf(v) == math.isinf(ref)
        if math.isfinite(ref):
            assert v == pytest.approx(ref, rel=1e-8, abs=1e-9)
            assert infconv_eval(T, x).value == pytest.approx(v, abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_euclidean_projection_matches_slsqp(seed):
    rng = np.random.default_rng(seed)
    region = random_halfspaces(rng)
    T = distance_function(region)
    X = rng.uniform(-4, 4, size=(15, 2))
    for x, v in zip(X, T.values(X)):
        assert v == pytest.approx(scipy_projection_distance(region, x), abs=1e-6)


def test_union_takes_smallest_piece():
    U = Union((PointCloud([[5, 0]]), HalfspaceIntersection([[0, 1]], [-2.0]), VPolytopeRegion([[0, 3], [1, 3]])))
    T = distance_function(U)
    assert infconv_eval(T, [0, 0]).value == pytest.approx(2)
    assert infconv_eval(T, [4.5, 0]).value == pytest.approx(0.5)
    assert infconv_eval(T, [0.5, 3.2]).value == pytest.approx(0.2)


# ---------------------------------------------------------------- invariants


@given(pt, st.integers(0, 3))
def test_upper_bound_by_f(x, which):
    fs = [
        Indicator(TWO),
        Table([[0, 0], [1, 2], [-1, 1]], [0.5, 0.0, 2.0]),
        Indicator(HalfspaceIntersection([[1, 1]], [0.5])),
        Indicator(VPolytopeRegion([[0, 0], [1, 0], [0, 1]])),
    ]
    f = fs[which]
    T = InfConvolution(GaugeField(Gauge(VPolytope([[1, 0], [0, 1], [-1, -1]]))), f)
    fx = f(x)
    assert infconv_eval(T, x).value <= fx + 1e-9
    # the point itself is a candidate, so on dom f the bound is attained or beaten
    if math.isfinite(fx):
        assert T(x) <= fx + 1e-9


@given(arrays(float, (6, 2), elements=coord), pt)
def test_unit_ball_minimal_time_is_distance(cloud, x):
    v = minimal_time(NormBall(2, 1.0, 2), PointCloud(cloud), x).value
    assert v == pytest.approx(np.linalg.norm(cloud - x, axis=1).min(), abs=1e-9)


@given(pt, st.floats(0, 1))
def test_minimizers_respect_bound(x, slack):
    T = perturbed_distance(Table([[0, 0], [1, 0], [0, 1]], [0.3, 0.0, 0.1]), PointCloud([[0, 0], [1, 0], [0, 1]]))
    r = infconv_eval(T, x, slack)
    assert r.minimizers
    for y, obj in r.minimizers:
        assert obj <= r.value + slack + 1e-12
        assert obj == pytest.approx(np.linalg.norm(y - x) + T.f(y))


@given(pt)
def test_grid_levels_nonincreasing(x):
    f = Perturbed(NormField(1, 2, 0.3), VPolytopeRegion([[-1, -1], [1, -1], [0, 1]]))
    T = InfConvolution(EUCLID, f, GridSearch([-2, -2], [2, 2], resolution=16))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DomainUnreachableWarning)
        levels = grid_levels(T, x)
        assert len(levels) == 4
        assert all(b <= a for a, b in zip(levels, levels[1:]))
        assert infconv_eval(T, x).value == pytest.approx(levels[-1])
