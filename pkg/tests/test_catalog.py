import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from bianchi_maxwell.catalog import (CASES, CaseEvaluator, SolutionCase, adjudicate_variants, evaluate_case,
                                     full_oracle_residual, registered_variants, residual_reduced, sample_times)
from bianchi_maxwell.errors import ConfigError, DomainError
from bianchi_maxwell.geometry import random_points
from bianchi_maxwell.tensor import sym3_det

from conftest import case_config

IDENTITY_FUNCS = {"eta11": "1", "eta12": "0", "eta13": "0", "eta22": "1", "eta23": "0", "eta33": "1"}
VII_CASES = [c for c in CASES if c.startswith("VII")]


def g1(beta=(1, 2, 3), funcs=IDENTITY_FUNCS, interval=(0, 3)):
    return SolutionCase("G1_16b", dict(zip(("beta1", "beta2", "beta3"), beta)), dict(funcs), None, interval)


def vii_422(omega="t", alpha3="0", **kw):
    funcs = {"omega": omega, "eta22": "1", "eta": "1", "eta23": "0", "alpha3": alpha3}
    return SolutionCase("VII_4_2_2", {"c": 1.0}, funcs, 1.0, (0.1, 1.5), **kw)


def test_g1_example():
    s = evaluate_case(g1(), 2.0)
    assert s.field.alpha == pytest.approx((2, 4, 6), abs=1e-12)
    assert s.eta.m11 == s.eta.m22 == s.eta.m33 == 1.0 and s.eta.m12 == 0.0


def test_g1_identity_residuals():
    res = residual_reduced(g1(), sample_times(g1(), 20))
    assert max(res["residuals"].values()) < 1e-12


def test_static_member():
    case = g1(beta=(0, 0, 0))
    ev = CaseEvaluator(case)
    assert ev.sample(0.3).field.alpha == ev.sample(2.7).field.alpha == (0, 0, 0)
    assert max(residual_reduced(case, sample_times(case, 5))["residuals"].values()) == 0.0


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3), st.floats(0.5, 2.0), st.floats(-0.3, 0.3))
def test_g1_random_constant_metrics(beta, d, off):
    funcs = {"eta11": repr(d), "eta12": repr(off), "eta13": "0", "eta22": "1.5", "eta23": repr(off / 2),
             "eta33": "1"}
    case = g1(beta=beta, funcs=funcs)
    assert max(residual_reduced(case, sample_times(case, 4))["residuals"].values()) < 1e-11


def test_vii_422_example_values():
    # omega = -t: alpha1 = -sin(t), beta1 = cos(t), eta12 = 0 for every variant
    for variant, sign in (({}, -1.0), ({"eta11": "printed"}, 1.0)):
        s = evaluate_case(vii_422("-t", variant=variant), 0.7)
        assert s.field.alpha[0] == pytest.approx(-math.sin(0.7), abs=1e-15)
        assert s.field.beta[0] == pytest.approx(math.cos(0.7), abs=1e-15)
        assert s.eta.m12 == 0.0
        assert s.eta.m11 == pytest.approx(sign, abs=1e-12)


def test_vii_422_residual_and_sign():
    case = vii_422("t")
    res = residual_reduced(case, sample_times(case, 50))
    assert max(v for k, v in res["residuals"].items() if k != "det_eta") < 1e-6
    assert res["admissible"]
    # with omega = -t the reduced equations force eta11 = -1: a solution, but not a Riemannian one
    neg = residual_reduced(vii_422("-t"), sample_times(case, 50))
    assert max(v for k, v in neg["residuals"].items() if k != "det_eta") < 1e-6
    assert not neg["admissible"]
    printed = residual_reduced(vii_422("-t", variant={"eta11": "printed"}), sample_times(case, 50))
    assert printed["residuals"]["E_beta1"] > 1e-3


def test_corrupted_eta11_detected():
    case = vii_422(perturb={"eta11": 1.1})
    res = residual_reduced(case, sample_times(case, 50))
    assert max(res["residuals"].values()) > 1e-3


def test_eta33_variant_breaks_determinant():
    case = vii_422(alpha3="0.3*t")
    rep = adjudicate_variants(case, times=sample_times(case, 20))
    by = {e["name"]: e for e in rep["variants"]}
    assert by["derived"]["det_identity"] < 1e-12
    assert by["eta33=printed"]["det_identity"] > 1e-3
    assert by["eta33=printed"]["status"] == "FAIL"


def test_single_variant_report():
    rep = adjudicate_variants(vii_422(), [("only", {})], sample_times(vii_422(), 5))
    assert len(rep["variants"]) == 1 and rep["compared"] is False and rep["passing"] == ["only"]


def test_registered_variants_cover_every_published_option():
    for cid, spec in CASES.items():
        names = {n for n, _ in registered_variants(SolutionCase.from_config(case_config(cid)))}
        expected = {"derived"} | {f"{a}={o}" for a, opts in spec.axes.items() for o in opts[1:]}
        assert names == expected


@pytest.mark.parametrize("cid", VII_CASES)
def test_adjudication_per_case(cid):
    case = SolutionCase.from_config(case_config(cid))
    rep = adjudicate_variants(case, times=sample_times(case, 30))
    by = {e["name"]: e for e in rep["variants"]}
    assert rep["passing"] == ["derived"]
    assert by["derived"]["det_identity"] < 1e-8
    assert by["derived"]["admissible"]


@pytest.mark.parametrize("cid", list(CASES))
def test_lifted_solutions_satisfy_full_equations(cid):
    case = SolutionCase.from_config(case_config(cid))
    pts = random_points(random.Random(17), 5, case.interval)
    assert full_oracle_residual(case, pts) < 1e-5


def test_radical_scope_variants():
    case = SolutionCase.from_config(case_config("VII_4_2_1"))
    rep = adjudicate_variants(case, times=sample_times(case, 20))
    by = {e["name"]: e["status"] for e in rep["variants"]}
    assert by == {"derived": "PASS", "alpha1=printed_4_2": "FAIL", "alpha1=printed_3": "FAIL",
                  "eta33=printed": "FAIL", "alpha3=printed": "FAIL"}


def test_parametrized_branch_identity():
    cfg = case_config("VII_4_1_2b")
    case = SolutionCase.from_config(cfg)
    c = case.constants["c"]
    omega = case.functions["omega"]
    for t in sample_times(case, 25):
        w = omega(t)
        wd = 0.06  # omega = 1 + 0.06 t
        a2, a2d = c * math.sin(w), c * math.cos(w) * wd
        b2, b2d = c * math.cos(w), -c * math.sin(w) * wd
        assert abs(a2 * a2d + b2 * b2d) < 1e-12
        s = evaluate_case(case, t)
        assert s.field.alpha[1] == pytest.approx(a2, abs=1e-15)
        assert s.field.beta[1] == pytest.approx(b2, abs=1e-15)


@pytest.mark.parametrize("cid", ["VII_4_1_1b", "VII_4_2_1", "VII_4_1_1a"])
def test_fixed_simpson_agrees_with_adaptive(cid):
    case = SolutionCase.from_config(case_config(cid))
    ada = CaseEvaluator(case, 1e-9)
    fine = CaseEvaluator(case, 1e-9, fixed_panels=2000)
    for t in (0.3, 0.8):
        a, b = ada.sample(t), fine.sample(t)
        for x, y in zip(a.field.alpha + _entries(a.eta), b.field.alpha + _entries(b.eta)):
            assert abs(x - y) < 1e-9


def _entries(m):
    return (m.m11, m.m12, m.m13, m.m22, m.m23, m.m33)


def test_determinant_identity_every_case():
    for cid in CASES:
        case = SolutionCase.from_config(case_config(cid))
        ev = CaseEvaluator(case)
        for t in sample_times(case, 6):
            s = ev.sample(t)
            assert abs(sym3_det(s.eta) - s.eta_scalar ** 2) <= 1e-8 * s.eta_scalar ** 2


def test_domain_error_reports_time_and_quantity():
    cfg = case_config("VII_4_2_1")
    cfg["functions"]["beta2"] = "0.5 - t"
    case = SolutionCase.from_config(cfg)
    with pytest.raises(DomainError) as info:
        residual_reduced(case, [0.5])
    assert info.value.u0 == 0.5 and info.value.quantity == "beta2"
    cfg = case_config("VII_4_1_1c")
    cfg["constants"]["c"] = -1.0
    with pytest.raises(DomainError) as info:
        evaluate_case(SolutionCase.from_config(cfg), 0.4)
    assert info.value.quantity == "rho" and info.value.value < 0


def test_domain_error_inside_adjudication_is_a_fail_entry():
    cfg = case_config("VII_4_2_1")
    cfg["functions"]["beta2"] = "0.5 - t"
    rep = adjudicate_variants(SolutionCase.from_config(cfg), times=[0.5])
    assert rep["passing"] == [] and all("error" in e for e in rep["variants"])


@pytest.mark.parametrize("mutate,field", [
    (lambda c: c["functions"].pop("eta"), "functions"),
    (lambda c: c["functions"].update(eta11="1"), "functions"),
    (lambda c: c["constants"].update(k=1.0), "constants"),
    (lambda c: c.update(case="VII_9"), "case"),
    (lambda c: c.update(variant={"nope": "x"}), "variant"),
    (lambda c: c.update(variant={"eta11": "x"}), "variant.eta11"),
    (lambda c: c.pop("alpha"), "alpha"),
    (lambda c: c.update(interval=[1, 1]), "interval"),
    (lambda c: c.update(perturb={"eta44": 2}), "perturb"),
    (lambda c: c["functions"].update(eta="1 +"), "functions.eta"),
])
def test_config_validation(mutate, field):
    cfg = case_config("VII_4_2_2")
    mutate(cfg)
    with pytest.raises(ConfigError) as info:
        SolutionCase.from_config(cfg)
    assert info.value.field == field


def test_config_round_trip():
    for cid in CASES:
        case = SolutionCase.from_config(case_config(cid))
        assert SolutionCase.from_config(case.to_config()) == case
