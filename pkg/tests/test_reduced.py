import math
import random

import numpy as np
import pytest

from bianchi_maxwell.errors import ConstraintViolation, NonRiemannianEta, StepUnderflow
from bianchi_maxwell.geometry import FieldState, SpatialMetricFn, maxwell_residual_full, random_points
from bianchi_maxwell.groups import BianchiGroup
from bianchi_maxwell.reduced import (ReducedState, compare_reduced_forms, constraint_check, integrate_reduced,
                                     reduced_aux, reduced_rhs)
from bianchi_maxwell.groups import structure_constants
from bianchi_maxwell.tensor import Sym3

from conftest import ALL_GROUPS, random_spd

IDENTITY = SpatialMetricFn.constant(Sym3.identity())
SMOOTH_ETA = SpatialMetricFn.from_config({"11": "1 + 0.1*sin(t)", "12": "0.05*cos(t)", "13": "0.02*t",
                                          "22": "1.2", "23": "-0.03", "33": "0.9 + 0.05*t"})


def state(t, alpha, beta):
    return ReducedState(t, FieldState(alpha, beta))


def on_shell_beta(g, rng):
    b = [rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)]
    if g.demands_beta3_zero:
        b[2] = 0.0
    return b


def test_rhs_group_i():
    e = Sym3(2, 0.5, 0, 1, 0, 1)
    eta = SpatialMetricFn.constant(e)
    ad, bd = reduced_rhs(BianchiGroup("I"), eta, state(0.0, (1, 2, 3), (1, 2, 3)))
    root = math.sqrt(1.75)
    assert bd == (0, 0, 0)
    assert ad == pytest.approx(tuple(x / root for x in e.matvec((1, 2, 3))), abs=1e-15)


def test_rhs_group_ii():
    _, bd = reduced_rhs(BianchiGroup("II"), IDENTITY, state(0, (1, 0, 0), (0, 0, 0)))
    assert bd == (-1, 0, 0)


def test_rhs_group_vi_corrected_values():
    # substituting eta = identity, alpha = (1, 2, 0) into the reduction from the structure constants
    _, bd = reduced_rhs(BianchiGroup("VI"), IDENTITY, state(0, (1, 2, 0), (0, 0, 0)))
    assert bd == (2, 4, 0)
    _, bd = reduced_rhs(BianchiGroup("VI"), IDENTITY, state(0, (1, 2, 0), (0, 0, 0)), form="generic")
    assert bd == pytest.approx((2, 4, 0), abs=1e-11)


def test_reduced_aux_sigma():
    C = structure_constants(BianchiGroup("VII", 1.0))
    aux = reduced_aux(C, Sym3.identity(), (0.3, 0.7, 0.0))
    assert aux.sigma[0] == pytest.approx(2 * 0.7 * math.cos(1.0) - 0.3, abs=1e-15)


@pytest.mark.parametrize("g", ALL_GROUPS, ids=str)
def test_generic_and_specialized_agree(g):
    rng = random.Random(21)
    samples = [(random_spd(rng), tuple(rng.uniform(-2, 2) for _ in range(3))) for _ in range(100)]
    rep = compare_reduced_forms(g, samples)
    assert rep["max_abs_diff_vs_generic"]["specialized"] < 1e-10
    assert rep["specialized_term_discrepancies"] == []


def test_printed_discrepancies_reported_per_term():
    rng = random.Random(2)
    samples = [(random_spd(rng), tuple(rng.uniform(-2, 2) for _ in range(3))) for _ in range(10)]
    clean = {"I", "II", "IV"}
    for kind in ("I", "II", "III", "IV", "V", "VI"):
        rep = compare_reduced_forms(BianchiGroup(kind), samples)
        if kind in clean:
            assert rep["printed_term_discrepancies"] == []
        else:
            assert rep["printed_term_discrepancies"]
    terms = compare_reduced_forms(BianchiGroup("III"), samples)["printed_term_discrepancies"]
    assert {(d["component"], d["term"]) for d in terms} == {("beta1", "alpha1*eta22"), ("beta2", "alpha1*eta12")}


def test_gamma_literal_reading_differs_when_sigma3_nonzero():
    rng = random.Random(4)
    samples = [(random_spd(rng), tuple(rng.uniform(-2, 2) for _ in range(3))) for _ in range(5)]
    rep = compare_reduced_forms(BianchiGroup("VI"), samples)
    assert rep["gamma_literal_term_discrepancies"]


def test_constraint_examples():
    assert constraint_check(BianchiGroup("I"), state(0, (0, 0, 0), (1, 2, 3)))["omega_beta"] == 0.0
    c = constraint_check(BianchiGroup("V"), state(0, (0, 0, 0), (0.4, -1.0, 0.0)))
    assert c["beta3"] == 0.0 and c["omega_beta"] == 0.0
    assert constraint_check(BianchiGroup("VII", 1.0), state(0, (0, 0, 0), (0, 0, 0.1)))["beta3"] == 0.1
    assert constraint_check(BianchiGroup("II"), state(0, (0, 0, 0), (0, 0, 0.1)))["beta3"] is None


def test_integrate_group_i_exact():
    traj = integrate_reduced(BianchiGroup("I"), IDENTITY, state(0, (0, 0, 0), (1, 2, 3)), 1.0)
    assert traj.outputs[-1].alpha == pytest.approx((1, 2, 3), abs=1e-12)
    assert traj.outputs[-1].beta == (1, 2, 3)


def test_integrate_group_ii_oscillator():
    traj = integrate_reduced(BianchiGroup("II"), IDENTITY, state(0, (1, 0, 0), (0, 0, 0)), 1.0)
    assert traj.outputs[-1].alpha[0] == pytest.approx(math.cos(1.0), abs=1e-7)
    assert traj.outputs[-1].beta[0] == pytest.approx(-math.sin(1.0), abs=1e-7)


def test_zero_data_stays_zero():
    traj = integrate_reduced(BianchiGroup("VII", 1.0), SMOOTH_ETA, state(0, (0, 0, 0), (0, 0, 0)), 1.0)
    assert all(x == 0.0 for s in traj.outputs for x in s.alpha + s.beta)


def test_off_shell_rejected():
    with pytest.raises(ConstraintViolation):
        integrate_reduced(BianchiGroup("V"), IDENTITY, state(0, (0, 0, 0), (0, 0, 1.0)), 1.0)


def test_non_riemannian_mid_interval():
    eta = SpatialMetricFn.from_config({"11": "1 - t"})
    with pytest.raises(NonRiemannianEta):
        integrate_reduced(BianchiGroup("II"), eta, state(0, (1, 0, 0), (0, 0, 0)), 2.0)


def test_step_underflow():
    with pytest.raises(StepUnderflow):
        integrate_reduced(BianchiGroup("II"), IDENTITY, state(0, (1, 0, 0), (0, 0, 0)), 1.0,
                          adaptive=True, tol=1e-30, step=1e-3)


def test_adaptive_matches_closed_form():
    traj = integrate_reduced(BianchiGroup("II"), IDENTITY, state(0, (1, 0, 0), (0, 0, 0)), 2.0,
                             adaptive=True, tol=1e-11, step=0.1)
    assert traj.outputs[-1].alpha[0] == pytest.approx(math.cos(2.0), abs=1e-8)


def test_rk4_fourth_order():
    errs = []
    for step in (0.1, 0.05, 0.025):
        traj = integrate_reduced(BianchiGroup("II"), IDENTITY, state(0, (1, 0, 0), (0, 0, 0)), 1.0, step=step)
        errs.append(abs(traj.outputs[-1].alpha[0] - math.cos(1.0)))
    for a, b in zip(errs, errs[1:]):
        assert 12 < a / b < 20


@pytest.mark.parametrize("g", ALL_GROUPS, ids=str)
def test_constraint_drift(g):
    b = on_shell_beta(g, random.Random(8))
    if g.kind != "I" and g.kind != "II":
        b[2] = 0.0
    traj = integrate_reduced(g, SMOOTH_ETA, state(0, (0.3, -0.4, 0.2), b), 3.0,
                             output_times=[0.5 * i for i in range(7)])
    drift = traj.constraint_drift()
    assert drift["omega_beta"] < 1e-8
    assert (drift["beta3"] or 0.0) < 1e-8


def test_csv_header_and_rows():
    traj = integrate_reduced(BianchiGroup("IV"), SMOOTH_ETA, state(0, (0.1, 0.2, 0.3), (0.5, -0.5, 0)), 1.0,
                             output_times=[0.0, 0.5, 1.0])
    lines = traj.to_csv().splitlines()
    assert lines[0] == "u0,alpha_1,alpha_2,alpha_3,beta_1,beta_2,beta_3,constraint_omega,constraint_beta3"
    assert len(lines) == 4


def _oracle(g, form, n=6, seed=1):
    b = on_shell_beta(g, random.Random(3))
    traj = integrate_reduced(g, SMOOTH_ETA, state(0, (0.3, -0.2, 0.1), b), 2.0, form=form)
    pot = traj.potential()
    pts = random_points(random.Random(seed), n, (0.1, 1.9))
    return max(float(np.abs(maxwell_residual_full(g, SMOOTH_ETA, pot, p, 1e-4)).max()) for p in pts)


@pytest.mark.parametrize("g", ALL_GROUPS, ids=str)
def test_trajectory_satisfies_full_equations(g):
    assert _oracle(g, "specialized") < 1e-5


@pytest.mark.parametrize("kind", ["III", "V", "VI"])
def test_published_forms_fail_full_equations(kind):
    assert _oracle(BianchiGroup(kind), "printed") > 1e-2
