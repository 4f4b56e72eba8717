# tests/test_rgflow.py

import math

import pytest

from curvebound.errors import DomainError, FlowSingularityError, SchemeError
from curvebound.rgflow import (
    beta_function,
    flow_constant,
    flow_coupling,
    flow_coupling_ode,
    flow_inverse_coupling,
    flow_ode_residual,
    flow_table,
    max_discrepancy,
    mu_invariance,
    rg_state,
    scaling_grid,
    scaling_law_check,
    tau_pole,
)


@pytest.mark.parametrize("length, mu", [(2 * math.pi, 1.0), (1.0, 1e-3), (3.0, 40.0), (0.5, 7.0)])
def test_flow_constant_equals_length(length, mu):
    constant = flow_constant(length, mu)
    assert constant.value == pytest.approx(length, rel=1e-11)
    assert constant.error < 1e-9 * length


def test_flow_constant_rejects_bad_input():
    with pytest.raises(DomainError):
        flow_constant(0.0, 1.0)
    with pytest.raises(DomainError):
        flow_constant(1.0, -1.0)


def test_beta_function_sign_and_scaling(unit_circle):
    beta = beta_function(unit_circle, 2.0, 1.0)
    assert beta == pytest.approx(-4.0 / (2 * math.pi), rel=1e-10)
    assert beta_function(unit_circle, -2.0, 1.0) == pytest.approx(beta, rel=1e-12)
    assert beta_function(unit_circle, 4.0, 1.0) == pytest.approx(4.0 * beta, rel=1e-12)
    assert beta_function(unit_circle, 0.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        beta_function(unit_circle, math.inf, 1.0)


def test_flow_identity_and_inverse_coupling():
    state = rg_state(2 * math.pi, 2.0, 1.0)
    assert flow_coupling(state, 1.0) == 2.0
    for tau in (0.25, 3.0, 50.0):
        inverse = flow_inverse_coupling(state, 0.5, tau)
        assert inverse == pytest.approx(0.5 + math.log(tau) / (2 * math.pi), rel=1e-12)
        assert flow_coupling(state, tau) == pytest.approx(1.0 / inverse, rel=1e-12)


def test_flow_semigroup():
    state = rg_state(3.0, 1.5, 2.0)
    for t1, t2 in ((2.0, 3.0), (0.5, 4.0), (7.0, 0.3)):
        once = flow_coupling(state, t1 * t2)
        intermediate = rg_state(3.0, flow_coupling(state, t1), 2.0 * t1)
        assert flow_coupling(intermediate, t2) == pytest.approx(once, rel=1e-12)


@pytest.mark.parametrize("lambda_R", [2.0, -1.0, 0.3])
@pytest.mark.parametrize("tau", [0.1, 0.5, 2.0, 10.0])
def test_ode_matches_closed_form(lambda_R, tau):
    state = rg_state(2 * math.pi, lambda_R, 1.0)
    assert flow_coupling_ode(state, tau) == pytest.approx(flow_coupling(state, tau), rel=1e-8)


def test_closed_form_solves_flow_equation():
    state = rg_state(2 * math.pi, 2.0, 1.0)
    assert flow_ode_residual(state, [0.1, 0.5, 1.0, 2.0, 10.0]) < 1e-6


def test_pole_of_the_flow():
    state = rg_state(2 * math.pi, 2.0, 1.0)
    pole = tau_pole(state)
    assert pole == pytest.approx(math.exp(-math.pi), rel=1e-12)
    with pytest.raises(FlowSingularityError) as info:
        flow_coupling(state, 0.5 * pole)
    assert info.value.tau_pole == pytest.approx(pole)
    with pytest.raises(FlowSingularityError):
        flow_coupling_ode(state, 0.5 * pole)
    assert tau_pole(rg_state(1.0, 0.0, 1.0)) == math.inf


def test_flow_table_marks_pole_crossings():
    state = rg_state(2 * math.pi, 2.0, 1.0)
    rows = flow_table(state, [0.01, 1.0, 2.0])
    assert math.isnan(rows[0]["lambda_R"]) and math.isnan(rows[0]["lambda_R_ode"])
    assert rows[1]["lambda_R"] == 2.0
    assert rows[2]["mu"] == 2.0
    assert rows[2]["lambda_R_ode"] == pytest.approx(rows[2]["lambda_R"], rel=1e-8)


def test_nonpositive_tau():
    state = rg_state(1.0, 1.0, 1.0)
    for call in (flow_coupling, flow_coupling_ode):
        with pytest.raises(DomainError):
            call(state, 0.0)


# Scaling law of the renormalized diagonal


@pytest.mark.parametrize("tau", [0.5, 2.0, 4.0])
@pytest.mark.parametrize("E", [-0.5, -2.0])
def test_scaling_law(unit_circle, tau, E):
    report = scaling_law_check(unit_circle, 2.0, 1.0, E, tau)
    assert report.discrepancy < 1e-9 * max(1.0, abs(report.rhs))
    assert report.flowed_coupling == pytest.approx(1.0 / (0.5 + math.log(tau) / (2 * math.pi)), rel=1e-10)


def test_scaling_law_on_shell_coupling(unit_circle):
    report = scaling_law_check(unit_circle, math.inf, 1.0, -1.0, 2.0)
    assert report.discrepancy < 1e-9
    assert report.flowed_coupling == pytest.approx(2 * math.pi / math.log(2.0), rel=1e-10)


def test_scaling_grid(unit_circle):
    reports = scaling_grid(unit_circle, 2.0, 1.0, [1.0, 2.0], [-1.0])
    assert len(reports) == 2
    assert reports[0].lhs == reports[0].rhs
    assert max_discrepancy(reports) < 1e-9
    assert max_discrepancy([]) == 0.0


def test_mu_invariance(unit_circle):
    for E in (-0.5, -3.0):
        assert abs(mu_invariance(unit_circle, 2.0, 1.0, E)) < 1e-7


def test_scaling_needs_flat_space(planar_circle):
    with pytest.raises(SchemeError):
        scaling_law_check(planar_circle, 1.0, 1.0, -1.0, 2.0)
    with pytest.raises(SchemeError):
        mu_invariance(planar_circle, 1.0, 1.0, -1.0)


def test_mu_factor_must_move(unit_circle):
    with pytest.raises(DomainError):
        mu_invariance(unit_circle, 1.0, 1.0, -1.0, factor=1.0)
