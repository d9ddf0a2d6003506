"""Deformation and rate measures: worked example, invariance, derivative identities.

The finite-difference oracles run on the homogeneous-stretch motion, whose
closed-form trajectory lets every field be sampled at arbitrary events.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relkin.kinematics import (
    cg_invariants,
    invariant_derivative,
    jacobian,
    left_cauchy_green,
    particle_conservation_residual,
    rate_tensors,
    right_cauchy_green,
    spatial_part,
)
from relkin.minkowski import (
    TOL_ALG,
    apply_boost_tensor,
    boost_from_beta,
    metric,
    projector,
    world_velocity,
)
from relkin.worldline import eval_kinematics, uniform_stretch

betas = st.floats(min_value=-0.9, max_value=0.9)
entries = st.floats(min_value=-1.5, max_value=1.5)


def _observer_and_gradient(beta, f_entries, dim=2):
    """Space-like deformation gradient Fs = S F for observer beta."""
    u = world_velocity(beta)
    S = projector(u)
    F = np.array(f_entries, dtype=float).reshape(dim, dim - 1) + np.eye(dim, dim - 1)
    return u, S, S.s @ F


# ---------------------------------------------------------------------------
# worked example: unit bar seen by a beta = 0.6 observer
# ---------------------------------------------------------------------------


def test_worked_example_pipeline():
    u = world_velocity(0.6)
    S = projector(u)
    F = np.array([[1.0], [0.0]])
    Fs = spatial_part(F, S.s)
    np.testing.assert_allclose(Fs[:, 0], [1.5625, 0.9375], atol=1e-13)
    C = right_cauchy_green(Fs)
    B = left_cauchy_green(Fs)
    assert C[0, 0] == pytest.approx(1.5625, abs=1e-12)
    i1, i2 = cg_invariants(C, B)
    assert i1 == pytest.approx(1.5625, abs=1e-12)
    assert i2 == pytest.approx(2.44140625, abs=1e-12)
    assert jacobian(Fs, u) == pytest.approx(1.25, abs=1e-12)


def test_right_cg_rejects_timelike_column():
    # a time-like column makes C negative definite
    with pytest.raises(ValueError):
        right_cauchy_green(np.array([[0.0], [1.0]]))


def test_invariant_route_mismatch_detected():
    u, S, Fs = _observer_and_gradient(0.4, [0.2, -0.1])
    C = right_cauchy_green(Fs)
    B = left_cauchy_green(Fs)
    with pytest.raises(ValueError):
        cg_invariants(2.0 * C, B)


# ---------------------------------------------------------------------------
# invariance / objectivity
# ---------------------------------------------------------------------------


@given(beta=betas, boost_beta=betas, f=st.tuples(entries, entries))
@settings(deadline=None)
def test_right_cg_boost_invariant(beta, boost_beta, f):
    u, S, Fs = _observer_and_gradient(beta, f)
    b = boost_from_beta(boost_beta)
    C = right_cauchy_green(Fs)
    C_star = right_cauchy_green(b.lam @ Fs)
    scale = max(1.0, float(np.max(np.abs(C))))
    assert np.max(np.abs(C_star - C)) <= TOL_ALG * scale


@given(beta=betas, boost_beta=betas, f=st.tuples(entries, entries))
@settings(deadline=None)
def test_left_cg_boost_objective(beta, boost_beta, f):
    u, S, Fs = _observer_and_gradient(beta, f)
    b = boost_from_beta(boost_beta)
    B_star = left_cauchy_green(b.lam @ Fs)
    pushed = apply_boost_tensor(b, left_cauchy_green(Fs), "contra")
    scale = max(1.0, float(np.max(np.abs(B_star))))
    assert np.max(np.abs(B_star - pushed)) <= TOL_ALG * scale


@given(beta=betas, f=st.tuples(entries, entries))
@settings(deadline=None)
def test_invariants_agree_between_routes(beta, f):
    u, S, Fs = _observer_and_gradient(beta, f)
    eta = metric(2)
    C = right_cauchy_green(Fs)
    B = left_cauchy_green(Fs)
    i1, i2 = cg_invariants(C, B, eta)
    assert i1 == pytest.approx(float(np.trace(B @ eta)), rel=1e-10, abs=1e-10)
    assert i2 == pytest.approx(float(np.trace(B @ eta @ B @ eta)), rel=1e-10, abs=1e-10)


# ---------------------------------------------------------------------------
# rate tensors
# ---------------------------------------------------------------------------


@given(beta=betas, g=st.tuples(entries, entries, entries, entries))
@settings(deadline=None)
def test_rate_split_is_exact(beta, g):
    u = world_velocity(beta)
    S = projector(u)
    grad_u = np.array(g).reshape(2, 2)
    rates = rate_tensors(grad_u, S.s)
    assert np.max(np.abs(rates.Ls_eta - rates.Ds_eta - rates.Ws_eta)) <= 1e-13
    assert np.max(np.abs(rates.Ds_eta - rates.Ds_eta.T)) <= 1e-13
    assert np.max(np.abs(rates.Ws_eta + rates.Ws_eta.T)) <= 1e-13
    assert rates.div_u == pytest.approx(float(np.trace(grad_u)), abs=1e-13)
    eta = metric(2)
    np.testing.assert_allclose(eta @ rates.Ds_eta, rates.Ds, atol=1e-14)


def test_uniform_stretch_divergence_closed_form():
    """div(u) = gamma^3 (b1 + beta b2) = gamma b1 for the stretch motion."""
    motion = uniform_stretch(0.3)
    for X, t in ((0.5, 0.4), (1.0, 1.5), (0.2, 0.0)):
        state = eval_kinematics(motion, X, t)
        b1, b2 = motion.beta_partials(*state.event)
        gamma = state.gamma
        expect = gamma**3 * (b1 + state.beta * b2)
        assert state.rates.div_u == pytest.approx(expect, rel=1e-12)
        assert state.rates.div_u == pytest.approx(gamma * b1, rel=1e-12)


# ---------------------------------------------------------------------------
# world-line derivative and its identities
# ---------------------------------------------------------------------------


def test_invariant_derivative_uses_analytic_partials_when_present():
    u = world_velocity(0.6)

    def field(x):
        return x[0] ** 2 + 3.0 * x[1]

    field.partials = lambda x: np.array([2.0 * x[0], 3.0])
    x = np.array([0.7, 1.1])
    got = invariant_derivative(field, u, x)
    assert float(got) == pytest.approx(2.0 * 0.7 * u.u[0] + 3.0 * u.u[1], abs=1e-14)


def test_invariant_derivative_finite_difference_path():
    u = world_velocity(-0.4)

    def field(x):
        return np.sin(x[0]) * np.cosh(x[1])

    x = np.array([0.3, 0.8])
    grad = np.array([np.cos(x[0]) * np.cosh(x[1]), np.sin(x[0]) * np.sinh(x[1])])
    got = invariant_derivative(field, u, x, h=1e-6)
    assert float(got) == pytest.approx(float(grad @ u.u), abs=1e-8)
    with pytest.raises(ValueError):
        invariant_derivative(field, u, x, h=0.0)


def _event_samplers(motion, quantity):
    def sample(x):
        X = motion.label_of_event(x[0], x[1])
        return getattr(eval_kinematics(motion, X, x[1] / motion.c), quantity)

    return sample


@pytest.mark.parametrize("X,t", [(0.5, 0.4), (0.9, 1.1)])
def test_cg_rate_identity(X, t):
    """D(C) = 2 Fs^T Ds_eta Fs along the stretch world lines."""
    motion = uniform_stretch(0.3)
    state = eval_kinematics(motion, X, t)
    dC = invariant_derivative(_event_samplers(motion, "C"), state.u, state.event, h=1e-4)
    rhs = 2.0 * state.Fs.T @ state.rates.Ds_eta @ state.Fs
    assert np.max(np.abs(dC - rhs)) <= 1e-7 * max(1.0, float(np.max(np.abs(rhs))))


@pytest.mark.parametrize("X,t", [(0.5, 0.4), (0.9, 1.1)])
def test_jacobian_rate_identity(X, t):
    """D(j) = j tr(Ls) along the stretch world lines."""
    motion = uniform_stretch(0.3)
    state = eval_kinematics(motion, X, t)
    dj = invariant_derivative(_event_samplers(motion, "j"), state.u, state.event, h=1e-4)
    rhs = state.j * float(np.trace(state.rates.Ls))
    assert float(dj) == pytest.approx(rhs, rel=1e-7, abs=1e-7)


def test_gradient_transport_identity():
    """S D(Fs) = L Fs: transport of the space-like gradient."""
    motion = uniform_stretch(0.3)
    state = eval_kinematics(motion, 0.7, 0.9)
    dFs = invariant_derivative(_event_samplers(motion, "Fs"), state.u, state.event, h=1e-4)
    lhs = state.S.s @ dFs
    rhs = state.rates.L @ state.Fs
    assert np.max(np.abs(lhs - rhs)) <= 1e-7 * max(1.0, float(np.max(np.abs(rhs))))


# ---------------------------------------------------------------------------
# particle conservation
# ---------------------------------------------------------------------------


def _stretch_u_field(motion):
    def u_field(x):
        X = motion.label_of_event(x[0], x[1])
        return eval_kinematics(motion, X, x[1] / motion.c).u.u

    return u_field


def test_particle_conservation_manufactured_field():
    """m0 = c / (c + rate x2) balances the dilation of the stretch motion."""
    rate = 0.3
    motion = uniform_stretch(rate)
    u_field = _stretch_u_field(motion)

    def m0(x):
        return motion.c / (motion.c + rate * x[1])

    for X, t in ((0.4, 0.3), (0.8, 1.2)):
        x = np.array([motion.position(X, t), motion.c * t])
        resid = particle_conservation_residual(m0, u_field, x, h=1e-4)
        assert abs(resid) <= 1e-7


def test_particle_conservation_detects_violation():
    """A constant rest density under expansion does not conserve particles."""
    motion = uniform_stretch(0.3)
    u_field = _stretch_u_field(motion)
    x = np.array([motion.position(0.8, 0.5), 0.5])
    resid = particle_conservation_residual(lambda x: 1.0, u_field, x, h=1e-4)
    state = eval_kinematics(motion, 0.8, 0.5)
    assert resid == pytest.approx(state.rates.div_u, rel=1e-6)
    assert abs(resid) > 1e-2
