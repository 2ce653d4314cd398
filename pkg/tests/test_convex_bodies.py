import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import linprog as scipy_linprog

from infconvkit.convex_bodies import (
    NormBall, Singleton, VPolytope, body_norm, contains, support, support_many,
)
from infconvkit.errors import DimensionError, InputError

DIAMOND = VPolytope([[1, 0], [-1, 0], [0, 1], [0, -1]])
finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def polytopes(n=2):
    return st.integers(1, 7).flatmap(
        lambda k: arrays(float, (k, n), elements=finite)).map(VPolytope)


def bodies(n=2):
    return st.one_of(
        polytopes(n),
        st.builds(NormBall, st.sampled_from([1, 2, "inf"]), st.floats(0.1, 3), st.just(n)),
        arrays(float, n, elements=finite).map(Singleton),
    )


def covector(n=2):
    return arrays(float, n, elements=finite)


# ---------------------------------------------------------------- examples


def test_support_examples():
    assert support(VPolytope([[1, 0], [0, 1]]), [1, 1]) == 1  # [DERIVED] max over vertices
    assert support(NormBall(2, 1.0, 2), [3, 4]) == pytest.approx(5)  # [TRIVIAL] dual norm
    assert support(Singleton([0, 0]), [7, -2]) == 0  # [TRIVIAL]


def test_contains_examples():
    assert contains(DIAMOND, [0.5, 0.5])  # [DERIVED] boundary point
    assert not contains(DIAMOND, [0.6, 0.6])  # [DERIVED] 1-norm 1.2
    assert contains(VPolytope([[1, 0], [-1, 0]]), [0, 0])  # [TRIVIAL] midpoint


def test_body_norm_examples():
    assert body_norm(DIAMOND) == 1
    assert body_norm(NormBall("inf", 1.0, 2)) == pytest.approx(math.sqrt(2))
    assert body_norm(Singleton([0, 0])) == 0


@pytest.mark.parametrize("p, expected", [(1, 1.0), (2, 1.0), ("inf", math.sqrt(3))])
def test_body_norm_of_balls(p, expected):
    assert body_norm(NormBall(p, 2.0, 3)) == pytest.approx(2 * expected)


def test_errors():
    with pytest.raises(DimensionError):
        support(DIAMOND, [1, 2, 3])
    with pytest.raises(DimensionError):
        contains(DIAMOND, [1])
    with pytest.raises(InputError):
        VPolytope([[1, math.nan]])
    with pytest.raises(InputError):
        NormBall(3, 1.0, 2)
    with pytest.raises(InputError):
        NormBall(2, -1.0, 2)
    with pytest.raises(InputError):
        contains(DIAMOND, [0, 0], -1)


# ---------------------------------------------------------------- oracle: membership via HiGHS


@given(polytopes(), arrays(float, 2, elements=finite))
def test_membership_matches_highs(F, x):
    V = F.vertices
    k = len(V)
    A = np.vstack([V.T, np.ones(k)])
    ref = scipy_linprog(np.zeros(k), A_eq=A, b_eq=np.append(x, 1), bounds=[(0, None)] * k, method="highs")
    if ref.status == 0:
        assert contains(F, x, 1e-9)
    else:
        # distance to the hull: min ||V^T lam - x||_1 over the simplex
        m = len(x)
        c = np.concatenate([np.zeros(k), np.ones(2 * m)])
        Aeq = np.block([[V.T, -np.eye(m), np.eye(m)], [np.ones((1, k)), np.zeros((1, 2 * m))]])
        dist = scipy_linprog(c, A_eq=Aeq, b_eq=np.append(x, 1), bounds=[(0, None)] * (k + 2 * m),
                             method="highs").fun
        assume(dist > 1e-7)
        assert not contains(F, x, 1e-9)


# ---------------------------------------------------------------- invariants


@given(bodies(), covector(), st.floats(0.01, 100))
def test_support_positively_homogeneous(F, c, lam):
    a, b = support(F, lam * c), lam * support(F, c)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


@given(bodies(), covector(), covector())
def test_support_subadditive(F, c, d):
    assert support(F, c + d) <= support(F, c) + support(F, d) + 1e-12 * (1 + abs(support(F, c)) + abs(support(F, d)))


@given(bodies(), covector(), st.integers(0, 2**31))
def test_members_respect_support(F, c, seed):
    rng = np.random.default_rng(seed)
    U = rng.uniform(-3, 3, size=(40, 2))
    G = F.generators()
    if G is not None:
        W = rng.dirichlet(np.ones(len(G)), size=40)
        U = np.vstack([U, W @ G])
    s = support(F, c)
    for u in U:
        if contains(F, u, 0.0):
            assert float(c @ u) <= s + 1e-9


@given(polytopes())
def test_body_norm_dominates_sampled_support(F):
    a = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    C = np.column_stack([np.cos(a), np.sin(a)])
    sampled = support_many(F, C).max()
    exact = body_norm(F)
    assert sampled <= exact + 1e-12
    assert sampled >= 0.98 * exact - 1e-12


def test_support_many_matches_scalar():
    C = np.random.default_rng(0).normal(size=(30, 2))
    for F in (DIAMOND, NormBall(1, 2.0, 2), NormBall("inf", 0.5, 2), Singleton([1, -1])):
        assert np.allclose(support_many(F, C), [support(F, c) for c in C])
