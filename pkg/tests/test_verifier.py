import json
import math

import numpy as np
import pytest

from infconvkit.convex_bodies import NormBall, VPolytope
from infconvkit.errors import DomainEmptyError, InputError, PreconditionError
from infconvkit.fields import HalfspaceIntersection, PointCloud
from infconvkit.gauge import Gauge, gauge_eval
from infconvkit.subdiff import Frechet, frechet_test, make_probe, rhs_predicate, SamplingPlan, critical_plan
from infconvkit.verifier import (
    CHECKS, FAIL, PASS, SKIPPED, CheckRecord, Fixture, VerificationReport, bundled_fixtures,
    check_alpha_inflation, check_degenerate_branches, check_frechet_equality, check_gauge_properties,
    check_holder_equality, check_upper_estimate, dumps, fixture_from_obj, format_number, parse_config, run_suite,
)

FIX = {f.name: f for f in bundled_fixtures()}
QUICK = {"resolution": 90, "covector_trials": 60}


def small_config(**kw):
    cfg = {"fixtures": ["half_plane", "steep_table"], "checks": ["upper_estimate", "frechet_equality"],
           "gauge_trials": 200, "covector_trials": 60, "resolution": 90, "seed": 3}
    cfg.update(kw)
    return cfg


# ---------------------------------------------------------------- serialization


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(4.0) == "4"
    assert format_number(-0.0) == "0"
    assert format_number(math.inf) == '"+inf"'
    assert format_number(-math.inf) == '"-inf"'
    assert format_number(math.nan) == '"nan"'


def test_dumps_round_trips_through_json():
    obj = {"a": [1, 2.5, np.float64(1 / 3)], "b": None, "c": True, "d": np.array([math.inf, 0.0]), "e": "x"}
    back = json.loads(dumps(obj))
    assert back["a"][2] == 1 / 3
    assert back["d"] == ["+inf", 0]
    assert back["b"] is None and back["c"] is True
    with pytest.raises(TypeError):
        dumps(object())


def test_report_counts_and_verdict():
    recs = [CheckRecord("a", "x", PASS), CheckRecord("b", "x", SKIPPED)]
    rep = VerificationReport(recs)
    assert rep.verdict == PASS and rep.counts() == {PASS: 1, FAIL: 0, SKIPPED: 1}
    rep.records.append(CheckRecord("c", "x", FAIL, counterexamples=[{}]))
    assert rep.verdict == FAIL
    keys = list(json.loads(rep.to_lines().splitlines()[0]))
    assert keys == ["check_id", "fixture", "verdict", "trials", "disagreements", "undetermined", "worst_gap",
                    "counterexamples"]


# ---------------------------------------------------------------- gauge properties


@pytest.mark.parametrize("name", ["simplex", "euclidean_ball", "singleton_zero", "segment_1d"])
def test_gauge_check_passes(name):
    from infconvkit.verifier import gauge_bodies

    rec = check_gauge_properties(gauge_bodies()[name], trials=500, seed=1, name=name)
    assert rec.verdict == PASS, rec.counterexamples
    assert rec.trials > 500


def test_ball_coercivity_is_tight():
    g = Gauge(NormBall(2, 1.0, 2))
    for x in np.random.default_rng(5).uniform(-2, 2, size=(1000, 2)):
        assert abs(gauge_eval(g, x) - np.linalg.norm(x)) <= 1e-9


def test_gauge_fault_is_caught():
    g = Gauge(VPolytope([[1, 0], [0, 1]]))
    rec = check_gauge_properties(g.body, trials=200, seed=0, name="faulty",
                                 gauge_fn=lambda x: gauge_eval(g, x) + (0.0 if not np.any(x) else 1.0))
    assert rec.verdict == FAIL
    props = {c["property"] for c in rec.counterexamples}
    assert "homogeneity" in props or "lp_vs_bisection" in props


# ---------------------------------------------------------------- theorem checks


@pytest.mark.parametrize("eps", [0.0, 0.25])
def test_upper_estimate_half_plane(eps):
    rec = check_upper_estimate(FIX["half_plane"], eps, trials=100)
    assert rec.verdict == PASS and rec.disagreements == 0


def test_fixture_base_point_outside_S0():
    with pytest.raises(PreconditionError):
        Fixture("bad", NormBall(2, 1.0, 2), PointCloud([[0, 0]]), None, "distance", ([1, 1],))
    with pytest.raises(DomainEmptyError, match="nowhere"):
        Fixture("nowhere", NormBall(2, 1.0, 2), HalfspaceIntersection([[1, 0], [-1, 0]], [0, -1]), None,
                "distance", ([0, 0],))
    with pytest.raises(PreconditionError):
        Fixture("steep", NormBall(2, 1.0, 2), PointCloud([[0, 0]]), None, "distance", ([0, 0],), known_ell=1.0)


def test_frechet_equality_half_plane_is_unit_segment():
    fx = FIX["half_plane"]
    rec = check_frechet_equality(fx, trials=200, resolution=180)
    assert rec.verdict == PASS and rec.worst_gap <= 0.05
    pred = rhs_predicate(fx.T, [0, 0], Frechet(0))
    assert pred(np.array([[0, 1], [0, 0.5], [0, 0]])).all()
    assert not pred(np.array([[0, 1.001], [0.01, 0.5], [0, -0.1]])).any()


def test_steep_table_is_skipped():
    rec = check_frechet_equality(FIX["steep_table"], trials=10, resolution=8)
    assert rec.verdict == SKIPPED
    assert "ell < m" in rec.counterexamples[0]["reason"]


def test_dilated_rhs_fault_fails_and_reproduces():
    from infconvkit.verifier import _dilated_rhs

    # a two-dimensional right-hand side, so random covectors land in the dilated band
    fx = FIX["square_simplex"]
    rec = check_frechet_equality(fx, trials=200, resolution=90, rhs_override=_dilated_rhs)
    assert rec.verdict == FAIL and rec.counterexamples
    # every pointwise counterexample reproduces in isolation
    plan = SamplingPlan()
    for ce in rec.counterexamples:
        if "covector" not in ce:
            continue
        xbar, c = np.asarray(ce["base_point"]), np.asarray(ce["covector"])
        lhs = frechet_test(fx.T, xbar, c, 0.0, critical_plan(fx.T, xbar, plan)).verdict.value
        rhs = bool(_dilated_rhs(fx.T, xbar, Frechet(0), plan)(c[None, :])[0])
        assert lhs == ce["lhs"] and (rhs == (ce["rhs"] == "Member"))


def test_holder_equality_square_simplex():
    rec = check_holder_equality(FIX["square_simplex"], trials=80, resolution=90)
    assert rec.verdict == PASS, rec.counterexamples[:3]


def test_alpha_inflation_perturbed():
    rec = check_alpha_inflation(FIX["perturbed_l03_m1"], 0.1, trials=50)
    assert rec.verdict == PASS and rec.trials == 100  # two base points


def test_degenerate_branches():
    rec = check_degenerate_branches()
    assert rec.verdict == PASS, rec.counterexamples


# ---------------------------------------------------------------- suite


@pytest.mark.parametrize("bad", [
    {"fixtures": []}, {"nonsense": 1}, {"checks": ["nope"]}, {"fault": "nope"}, {"seed": -1},
    {"seed": True}, {"fixtures": ["unknown"]}, {"s_values": [0]}, {"budget_seconds": 0}, {"fixtures": 3},
    {"fixtures": [{"name": "x", "dimension": 2, "F": {"kind": "ball"}, "Omega": {"kind": "blob"},
                   "base_points": [[0, 0]]}]},
])
def test_config_errors(bad):
    with pytest.raises(InputError):
        parse_config(bad)
    with pytest.raises(InputError):
        run_suite(bad)


def test_config_defaults():
    cfg = parse_config({})
    assert [f.name for f in cfg.fixtures] == list(FIX)
    assert cfg.checks == CHECKS and cfg.seed == 0


def test_fixture_from_obj():
    fx = fixture_from_obj({"name": "cloud", "dimension": 2, "F": {"kind": "ball"},
                           "Omega": {"kind": "points", "points": [[1, 0], [0, 2]]},
                           "phi_kind": "distance", "base_points": [[1, 0]]})
    assert fx.name == "cloud" and fx.m == 1.0
    with pytest.raises(InputError, match=r"fixtures\[2\]\.Omega\.points"):
        fixture_from_obj({"name": "c", "dimension": 2, "F": {"kind": "ball"},
                          "Omega": {"kind": "points", "points": "x"}, "base_points": [[0, 0]]}, "fixtures[2]")


def test_suite_is_deterministic_and_gated():
    a, b = run_suite(small_config()), run_suite(small_config())
    assert a.to_lines() == b.to_lines()
    assert a.verdict == PASS
    assert a.counts()[SKIPPED] == 1


def test_suite_fault_fails():
    rep = run_suite(small_config(fault="rhs_dilated", fixtures=["square_simplex"]))
    assert rep.verdict == FAIL
    assert all(r.counterexamples for r in rep.records if r.verdict == FAIL)


def test_suite_budget_overrun():
    seen = []
    rep = run_suite(small_config(budget_seconds=1e-6, checks=["gauge_properties"]),
                    progress=lambda r, t: seen.append(t))
    assert rep.verdict == FAIL
    assert all(r.counterexamples == [{"reason": "budget"}] for r in rep.records)
    assert len(seen) == len(rep.records)
