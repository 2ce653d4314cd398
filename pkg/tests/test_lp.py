"""Simplex kernels: both backends against scipy's HiGHS and against each other."""
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog as scipy_linprog

from infconvkit import lp

BACKENDS = lp.available_backends()


def random_lp(seed, m, n):
    rng = np.random.default_rng(seed)
    A = rng.integers(-3, 4, size=(m, n)).astype(float)
    x0 = rng.uniform(0, 2, size=n) * (rng.random(n) < 0.7)
    b = A @ x0 if rng.random() < 0.8 else rng.uniform(-3, 3, size=m)
    c = rng.integers(-2, 5, size=n).astype(float)
    return c, A, b


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("seed", range(40))
def test_standard_form_matches_highs(backend, seed):
    c, A, b = random_lp(seed, 3 + seed % 3, 6 + seed % 4)
    ref = scipy_linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * len(c), method="highs")
    with lp.backend(backend):
        res = lp.solve_standard(c, A, b)
    expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert res.status == expected
    if expected == "optimal":
        assert res.fun == pytest.approx(ref.fun, abs=1e-8)
        assert np.allclose(A @ res.x, b, atol=1e-8)
        assert np.all(res.x >= 0)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
@given(st.integers(0, 10_000))
def test_backends_identical(seed):
    c, A, b = random_lp(seed, 4, 7)
    out = {}
    for name in BACKENDS:
        with lp.backend(name):
            out[name] = lp.solve_standard(c, A, b)
    a, b_ = out["compiled"], out["python"]
    assert a.status == b_.status
    assert a.pivots == b_.pivots
    if a.success:
        assert np.allclose(a.x, b_.x, atol=1e-12)


def test_general_linprog_with_bounds():
    # max x + y s.t. x + 2y <= 4, -1 <= x <= 2, y free -> x = 2, y = 1
    res = lp.linprog([-1, -1], A_ub=[[1, 2]], b_ub=[4], bounds=[(-1, 2), (None, None)])
    ref = scipy_linprog([-1, -1], A_ub=[[1, 2]], b_ub=[4], bounds=[(-1, 2), (None, None)], method="highs")
    assert res.status == "optimal"
    assert res.fun == pytest.approx(ref.fun, abs=1e-10)


def test_degenerate_problem_terminates():
    # Beale's cycling example; Bland's rule must terminate
    c = np.array([-0.75, 150, -0.02, 6, 0, 0, 0])
    A = np.array([[0.25, -60, -0.04, 9, 1, 0, 0], [0.5, -90, -0.02, 3, 0, 1, 0], [0, 0, 1, 0, 0, 0, 1]])
    b = np.array([0, 0, 1.0])
    for name in BACKENDS:
        with lp.backend(name):
            res = lp.solve_standard(c, A, b)
        assert res.status == "optimal"
        assert res.fun == pytest.approx(-0.05, abs=1e-12)


def test_pivot_budget_raises():
    c, A, b = random_lp(3, 4, 8)
    with pytest.raises(lp.LPCyclingError):
        lp.solve_standard(c, A, b, max_pivots=0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_extended_precision_inputs_stay_extended(backend):
    A = np.array([[1.0, 1.0]], dtype=np.longdouble)
    b = np.array([1.0], dtype=np.longdouble) / 3
    with lp.backend(backend):
        res = lp.solve_standard(np.array([1.0, 2.0], dtype=np.longdouble), A, b)
    assert res.x.dtype == np.longdouble
    assert abs(res.x[0] - np.longdouble(1) / 3) < 1e-18


@pytest.mark.parametrize("backend", BACKENDS)
def test_read_only_inputs(backend):
    A = np.array([[1.0, 2.0]])
    b = np.array([1.0])
    for arr in (A, b):
        arr.setflags(write=False)
    with lp.backend(backend):
        res = lp.solve_standard(np.ones(2), A, b)
    assert res.status == "optimal" and res.fun == pytest.approx(0.5)


def test_unknown_backend():
    with pytest.raises(ValueError):
        lp.set_backend("fortran")
