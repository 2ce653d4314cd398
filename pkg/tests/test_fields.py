import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from infconvkit.convex_bodies import NormBall, VPolytope
from infconvkit.errors import DimensionError, DomainEmptyError, InputError, PreconditionError
from infconvkit.fields import (
    GaugeField, HalfspaceIntersection, Indicator, NormField, Perturbed, PointCloud, ShiftedArg, Sum, Table,
    Union, VPolytopeRegion, Zero, calm_constant, domain_sample, field_eval, field_eval_many,
)
from infconvkit.gauge import Gauge

TRIANGLE = VPolytopeRegion([[0, 0], [1, 0], [0, 1]])
SQUARE = HalfspaceIntersection([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 0, 1, 0])
EMPTY = HalfspaceIntersection([[1, 0], [-1, 0]], [-1, 0])


def disc_cloud(n=400, seed=3):
    rng = np.random.default_rng(seed)
    a, r = rng.uniform(0, 2 * np.pi, n), np.sqrt(rng.uniform(0, 1, n))
    return PointCloud(np.vstack([[0, 0], np.c_[r * np.cos(a), r * np.sin(a)]]))


def fields():
    return [
        Indicator(PointCloud([[3, 0], [0, 4]])),
        Indicator(TRIANGLE),
        Indicator(SQUARE),
        Indicator(Union((TRIANGLE, PointCloud([[5, 5]])))),
        Perturbed(NormField(2, 2, 0.5), TRIANGLE),
        Table([[0, 0], [1, 0]], [0.0, 10.0]),
        Sum((Table([[0, 0], [1, 1]], [1.0, 2.0]), NormField(1, 2))),
        ShiftedArg(Indicator(TRIANGLE), [2, 2]),
        GaugeField(Gauge(VPolytope([[1, 0], [0, 1]]))),
        Zero(2),
    ]


# ---------------------------------------------------------------- field_eval


def test_indicator_examples():
    f = Indicator(PointCloud([[3, 0], [0, 4]]))
    assert field_eval(f, [3, 0]) == 0
    assert field_eval(f, [1, 1]) == math.inf
    assert field_eval(Indicator(SQUARE), [1 + 5e-10, 0.5]) == 0  # membership tolerance 1e-9
    assert field_eval(Indicator(SQUARE), [1.1, 0.5]) == math.inf


def test_table_keys_match_exactly():
    t = Table.from_mapping({(0.0, 0.0): 0.0, (3.0, 0.0): 10.0})
    assert field_eval(t, [3, 0]) == 10
    assert field_eval(t, [3 + 1e-13, 0]) == 10
    assert field_eval(t, [3 + 1e-9, 0]) == math.inf


def test_perturbed_and_sum():
    f = Perturbed(NormField(2, 2, 0.5), TRIANGLE)
    assert field_eval(f, [0.6, 0.2]) == pytest.approx(0.5 * math.hypot(0.6, 0.2))
    assert field_eval(f, [1, 1]) == math.inf
    s = Sum((Indicator(TRIANGLE), NormField(1, 2)))
    assert field_eval(s, [0.25, 0.5]) == 0.75
    assert field_eval(s, [2, 2]) == math.inf


def test_dimension_errors():
    with pytest.raises(DimensionError):
        field_eval(Indicator(TRIANGLE), [1, 2, 3])
    with pytest.raises(DimensionError):
        field_eval_many(Zero(2), np.zeros((4, 3)))
    with pytest.raises(DimensionError):
        Perturbed(Zero(3), TRIANGLE)
    with pytest.raises(InputError):
        Table([[0, 0]], [math.inf])


@pytest.mark.parametrize("f", fields(), ids=repr)
def test_eval_many_matches_pointwise(f):
    X = np.random.default_rng(0).integers(-2, 4, size=(40, 2)).astype(float)
    X = np.vstack([X, domain_sample(f, 10, seed=1)])
    vals = field_eval_many(f, X)
    assert np.array_equal(vals, [field_eval(f, x) for x in X])
    assert not np.any(np.isnan(vals)) and not np.any(vals == -math.inf)


# ---------------------------------------------------------------- domain_sample


def test_domain_sample_examples():
    assert domain_sample(Indicator(PointCloud([[0, 0]])), 3).tolist() == [[0, 0]] * 3
    X = domain_sample(Indicator(TRIANGLE), 100, seed=7)
    assert X.shape == (100, 2)
    assert np.all(np.isfinite(field_eval_many(Indicator(TRIANGLE), X)))
    with pytest.raises(DomainEmptyError):
        domain_sample(Indicator(EMPTY), 5)
    with pytest.raises(InputError):
        domain_sample(Zero(2), 0)


def test_domain_sample_cycles_through_tables():
    t = Table([[0, 0], [1, 0], [2, 0]], [1.0, 2.0, 3.0])
    assert domain_sample(t, 5).tolist() == [[0, 0], [1, 0], [2, 0], [0, 0], [1, 0]]


def test_perturbed_empty_domain():
    with pytest.raises(DomainEmptyError):
        domain_sample(Perturbed(Table([[9, 9]], [0.0]), TRIANGLE), 4)


def test_unbounded_halfspace_samples_in_box():
    half = HalfspaceIntersection([[0, 1]], [0.0], box=3.0)
    X = domain_sample(Indicator(half), 500, seed=2)
    assert np.all(X[:, 1] <= 1e-12)
    assert np.all(np.abs(X) <= 3.0 + 1.0)  # box around the Chebyshev centre


@pytest.mark.parametrize("f", fields(), ids=repr)
@given(k=st.integers(1, 300), seed=st.integers(0, 2**20))
def test_samples_are_finite_and_deterministic(f, k, seed):
    X = domain_sample(f, k, seed)
    assert len(X) == k
    assert np.all(np.isfinite(field_eval_many(f, X)))
    assert np.array_equal(X, domain_sample(f, k, seed))


# ---------------------------------------------------------------- calm_constant


def test_calm_indicator_is_zero():
    for f, x in [(Indicator(TRIANGLE), [0.2, 0.2]), (Indicator(SQUARE), [1, 1]),
                 (Indicator(PointCloud([[3, 0], [0, 4]])), [3, 0])]:
        est = calm_constant(f, x, k=50)
        assert est.ell == 0 and not est.saturated


def test_calm_half_norm_on_disc():
    f = Perturbed(NormField(2, 2, 0.5), disc_cloud())
    est = calm_constant(f, [0, 0], k=10_000)
    assert est.ell == pytest.approx(0.5, abs=0.01)
    assert not est.saturated


def test_calm_saturates_at_cap():
    t = Table([[0, 0], [1, 0]], [0.0, 10.0])
    est = calm_constant(t, [0, 0], k=10, cap=5)
    assert est.ell == 5 and est.saturated


def test_calm_outside_domain():
    with pytest.raises(PreconditionError):
        calm_constant(Indicator(TRIANGLE), [3, 3])


@given(seed=st.integers(0, 2**20), k=st.integers(1, 200), extra=st.integers(1, 200))
def test_calm_monotone_in_k(seed, k, extra):
    f = Perturbed(NormField(1, 2, 1.5, center=[0.3, 0.3]), TRIANGLE)
    a = calm_constant(f, [0.3, 0.3], k=k, seed=seed).ell
    b = calm_constant(f, [0.3, 0.3], k=k + extra, seed=seed).ell
    assert a <= b
    assert b <= 1.5 * math.sqrt(2) + 1e-12  # l1 against l2 distance
