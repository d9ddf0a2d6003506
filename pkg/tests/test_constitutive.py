"""Constitutive layer: stress, effective stress, flow, consistency solve.

The uniaxial bar family is closed under the model: Fs = gamma^2 a (1, beta),
ts = t11 [[1, beta], [beta, beta^2]], with

    I1_e = gamma^2 (a / F_p)^2,
    t11  = 2 m0 c1 (I1_e - 1) I1_e gamma^2,
    sigma_bar = |t11| (1 - beta^2) = 2 m0 c1 I1_e |I1_e - 1|.

Those closed forms are the oracles here; in particular the plastic
multiplier of a tensile on-surface state under stretching k = b1 + beta b2 is

    lambda = drive * gamma^3 k / (H + drive),   drive = 4 m0 c1 I1_e (2 I1_e - 1),

derived independently of the implementation by differentiating sigma_bar
along the world line.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from relkin.constitutive import (
    ApexSingularity,
    ConsistencySnapshot,
    InternalState,
    Loading,
    MaterialParams,
    NegativeRadicand,
    NoConvergence,
    WEIGHT_PRESETS,
    consistency_lhs,
    consistency_rhs_coefficient,
    dissipation,
    effective_stress,
    elastic_cg,
    elastic_remainder,
    elastic_split,
    energy_momentum,
    flow_direction,
    flow_stress,
    free_energy,
    loading_check,
    plastic_cg,
    plastic_multiplier,
    plastic_rate_tensors,
    rate_conversion,
    signature_weights,
    spacelike_frame,
    stress,
    update_internal,
)
from relkin.kinematics import rate_tensors
from relkin.minkowski import (
    BetaSuperluminal,
    apply_boost_tensor,
    boost_from_beta,
    metric,
    projector,
    world_velocity,
)

UNIT = MaterialParams(rest_density=1.0, stiffness=1.0, yield_stress=1.0, hardening=0.5)

betas = st.floats(min_value=-0.8, max_value=0.8)
stretches = st.floats(min_value=1.05, max_value=1.6)


def family_state(beta, a, fp, params=UNIT):
    """Uniaxial bar state: observer, projector, gradients and trial stress."""
    u = world_velocity(beta)
    S = projector(u)
    Fs = S.s @ np.array([[a], [0.0]])
    Fse = elastic_split(Fs, fp)
    Ce, Be = elastic_cg(Fse)
    ts = stress(Fse, Ce, params)
    return u, S, Fs, Fse, Ce, ts


def stretching_snapshot(beta, a, fp, k_grad, params):
    """On-surface snapshot of a family state under uniform stretching."""
    u, S, Fs, Fse, Ce, ts = family_state(beta, a, fp, params)
    gamma = u.gamma
    grad_u = gamma**3 * np.array([[k_grad, 0.0], [beta * k_grad, 0.0]])
    rates = rate_tensors(grad_u, S.s)
    sig = effective_stress(ts, params.yield_weights)
    snap = ConsistencySnapshot(
        ts=ts,
        df=flow_direction(ts, params.yield_weights),
        flow_dir=flow_direction(ts, params.potential_weights),
        Ls=rates.Ls,
        Ds_eta=rates.Ds_eta,
        div_u=rates.div_u,
        flow_stress=sig,
        Fse=Fse,
    )
    return snap, sig, u, Ce


# ---------------------------------------------------------------------------
# weights, energy, stress
# ---------------------------------------------------------------------------


def test_signature_weights_values():
    np.testing.assert_array_equal(signature_weights(2), [[1.0, -1.0], [-1.0, 1.0]])
    w4 = signature_weights(4)
    assert w4.shape == (4, 4)
    assert w4[3, 3] == 1.0 and w4[0, 3] == -1.0 and w4[0, 1] == 1.0
    assert WEIGHT_PRESETS["metric-signature"] is signature_weights


def test_free_energy_frozen_value():
    params = MaterialParams(rest_density=1.0, stiffness=2.0, yield_stress=1.0)
    psi, h = free_energy(np.array([[1.5625]]), params)
    assert psi == pytest.approx(0.31640625, abs=1e-15)
    assert h == 0.0


def test_stress_frozen_value():
    """Rest-frame bar stretched to a = 1.2: t11 = 2 (1.44 - 1) 1.44 = 1.2672."""
    u, S, Fs, Fse, Ce, ts = family_state(0.0, 1.2, 1.0)
    assert ts[0, 0] == pytest.approx(1.2672, abs=1e-14)
    assert abs(ts[0, 1]) <= 1e-15 and abs(ts[1, 1]) <= 1e-15
    assert effective_stress(ts, UNIT.yield_weights) == pytest.approx(1.2672, abs=1e-13)


@given(beta=betas, a=stretches, fp=st.floats(0.9, 1.2))
@settings(deadline=None)
def test_family_stress_structure(beta, a, fp):
    """ts = t11 [[1, b], [b, b^2]] and sigma_bar = |t11| (1 - b^2)."""
    u, S, Fs, Fse, Ce, ts = family_state(beta, a, fp)
    t11 = ts[0, 0]
    scale = max(1.0, abs(t11))
    assert abs(ts[0, 1] - beta * t11) <= 1e-12 * scale
    assert abs(ts[1, 0] - beta * t11) <= 1e-12 * scale
    assert abs(ts[1, 1] - beta**2 * t11) <= 1e-12 * scale
    sig = effective_stress(ts, UNIT.yield_weights)
    assert sig == pytest.approx(abs(t11) * (1.0 - beta**2), rel=1e-12, abs=1e-12)
    # closed form through the elastic invariant
    i1e = float(np.trace(Ce))
    assert sig == pytest.approx(2.0 * i1e * abs(i1e - 1.0), rel=1e-10, abs=1e-12)


@given(beta=betas, a=stretches, boost_beta=betas)
@settings(deadline=None)
def test_effective_stress_boost_invariant(beta, a, boost_beta):
    u, S, Fs, Fse, Ce, ts = family_state(beta, a, 1.0)
    w = UNIT.yield_weights
    sig = effective_stress(ts, w)
    b = boost_from_beta(boost_beta)
    sig_star = effective_stress(apply_boost_tensor(b, ts, "contra"), w)
    assert sig_star == pytest.approx(sig, rel=1e-10, abs=1e-10)


def test_effective_stress_negative_radicand():
    with pytest.raises(NegativeRadicand):
        effective_stress(np.array([[0.0, 1.0], [1.0, 0.0]]), signature_weights(2))


def test_effective_stress_fourth_order_weights():
    """A 4th-order diagonal weight array reproduces the 2nd-order form."""
    w = signature_weights(2)
    w4 = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            w4[a, b, a, b] = w[a, b]
    _, _, _, _, _, ts = family_state(0.5, 1.3, 1.0)
    assert effective_stress(ts, w4) == pytest.approx(effective_stress(ts, w), rel=1e-14)
    np.testing.assert_allclose(flow_direction(ts, w4), flow_direction(ts, w), atol=1e-14)


# ---------------------------------------------------------------------------
# flow direction
# ---------------------------------------------------------------------------


@given(beta=betas, a=stretches)
@settings(deadline=None)
def test_flow_direction_is_potential_gradient(beta, a):
    u, S, Fs, Fse, Ce, ts = family_state(beta, a, 1.0)
    w = UNIT.yield_weights
    direction = flow_direction(ts, w)
    step = 1e-6 * max(1.0, float(np.linalg.norm(ts)))
    fd = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            dts = np.zeros((2, 2))
            dts[i, j] = step
            fd[i, j] = (effective_stress(ts + dts, w)
                        - effective_stress(ts - dts, w)) / (2.0 * step)
    assert np.max(np.abs(direction - fd)) <= 1e-6 * max(1.0, float(np.max(np.abs(direction))))


@given(beta=betas, a=stretches, boost_beta=betas)
@settings(deadline=None, max_examples=60)
def test_flow_direction_boost_objective(beta, a, boost_beta):
    """Directions carry metric-lowered indices: dir* = Lam' dir Lam'^T."""
    u, S, Fs, Fse, Ce, ts = family_state(beta, a, 1.0)
    w = UNIT.yield_weights
    b = boost_from_beta(boost_beta)
    dir_star = flow_direction(apply_boost_tensor(b, ts, "contra"), w)
    pushed = apply_boost_tensor(b, flow_direction(ts, w), "cov")
    assert np.max(np.abs(dir_star - pushed)) <= 1e-10 * max(1.0, float(np.max(np.abs(dir_star))))


def test_flow_direction_euler_identity():
    """Degree-one potential: ts : dir = sigma_bar exactly."""
    u, S, Fs, Fse, Ce, ts = family_state(0.45, 1.35, 1.05)
    w = UNIT.yield_weights
    sig = effective_stress(ts, w)
    assert float(np.sum(ts * flow_direction(ts, w))) == pytest.approx(sig, rel=1e-12)


def test_flow_direction_apex_singularity():
    with pytest.raises(ApexSingularity):
        flow_direction(np.zeros((2, 2)), signature_weights(2))
    # sigma_bar = 0 on the light cone of the weights, not just at ts = 0
    with pytest.raises(ApexSingularity):
        flow_direction(np.array([[1.0, 1.0], [1.0, 1.0]]), signature_weights(2))


# ---------------------------------------------------------------------------
# loading check, flow stress
# ---------------------------------------------------------------------------


def test_loading_check_branches():
    params = UNIT
    ty = flow_stress(params, 0.2)
    assert ty == pytest.approx(1.1)
    assert loading_check(ty + 0.1, 0.2, params) is Loading.PLASTIC
    assert loading_check(ty - 0.5 * params.tol_consistency, 0.2, params) is Loading.PLASTIC
    assert loading_check(ty - 10.0 * params.tol_consistency, 0.2, params) is Loading.ELASTIC


# ---------------------------------------------------------------------------
# consistency condition and plastic multiplier
# ---------------------------------------------------------------------------


@given(beta=betas, a=stretches, fp=st.floats(0.9, 1.1),
       k_grad=st.floats(0.01, 0.5), hard=st.floats(0.0, 2.0))
@settings(deadline=None, max_examples=80)
def test_plastic_multiplier_matches_closed_form(beta, a, fp, k_grad, hard):
    gamma = 1.0 / math.sqrt(1.0 - beta**2)
    i1e = gamma**2 * (a / fp) ** 2
    assume(i1e > 1.02)  # tensile states: stretching loads the surface
    sig_guess = 2.0 * i1e * (i1e - 1.0)
    params = MaterialParams(rest_density=1.0, stiffness=1.0,
                            yield_stress=sig_guess, hardening=hard)
    snap, sig, u, Ce = stretching_snapshot(beta, a, fp, k_grad, params)
    lam = plastic_multiplier(snap, params)
    drive = 4.0 * i1e * (2.0 * i1e - 1.0)
    expected = drive * gamma**3 * k_grad / (hard + drive)
    assert lam == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_consistency_coefficient_closed_form():
    """g2 = H + 2 sigma_bar + 4 m0 c1 I1_e^2 on the family."""
    beta, a, fp = 0.35, 1.3, 1.02
    params = MaterialParams(rest_density=1.0, stiffness=1.0,
                            yield_stress=1.0, hardening=0.7)
    snap, sig, u, Ce = stretching_snapshot(beta, a, fp, 0.2, params)
    i1e = float(np.trace(Ce))
    g2 = consistency_rhs_coefficient(snap, params)
    assert g2 == pytest.approx(params.hardening + 2.0 * sig + 4.0 * i1e**2, rel=1e-12)
    assert g2 == pytest.approx(params.hardening + 4.0 * i1e * (2.0 * i1e - 1.0), rel=1e-10)
    g1 = consistency_lhs(snap, params)
    drive = 4.0 * i1e * (2.0 * i1e - 1.0)
    assert g1 == pytest.approx(drive * u.gamma**3 * 0.2, rel=1e-10)


def test_plastic_multiplier_residual_is_tight():
    params = MaterialParams(rest_density=1.0, stiffness=1.0,
                            yield_stress=1.0, hardening=0.5)
    snap, sig, u, Ce = stretching_snapshot(0.5, 1.4, 1.0, 0.3,
                                           MaterialParams(rest_density=1.0, stiffness=1.0,
                                                          yield_stress=1.0, hardening=0.5))
    lam = plastic_multiplier(snap, params)
    g1 = consistency_lhs(snap, params)
    g2 = consistency_rhs_coefficient(snap, params)
    assert abs(g1 - g2 * lam) <= params.tol_newton * abs(g2 * lam) + 1e-14


def test_plastic_multiplier_negative_root_unloads():
    """A compressed state (I1_e < 1) unloads under stretching: lambda = 0."""
    beta, a, fp = 0.0, 0.9, 1.0
    i1e = a**2
    assert i1e < 1.0
    sig = 2.0 * i1e * abs(i1e - 1.0)
    params = MaterialParams(rest_density=1.0, stiffness=1.0,
                            yield_stress=sig, hardening=0.5)
    snap, _, _, _ = stretching_snapshot(beta, a, fp, 0.2, params)
    assert plastic_multiplier(snap, params) == 0.0


def test_plastic_multiplier_rejects_nonpositive_coefficient():
    """Flipping the flow potential makes g2 < 0; the solver refuses."""
    params = MaterialParams(rest_density=1.0, stiffness=1.0,
                            yield_stress=1.0, hardening=0.5)
    snap, sig, u, Ce = stretching_snapshot(0.0, 1.3, 1.0, 0.2, params)
    bad = ConsistencySnapshot(ts=snap.ts, df=snap.df, flow_dir=-snap.flow_dir,
                              Ls=snap.Ls, Ds_eta=snap.Ds_eta, div_u=snap.div_u,
                              flow_stress=snap.flow_stress, Fse=snap.Fse)
    with pytest.raises(NoConvergence):
        plastic_multiplier(bad, params)


# ---------------------------------------------------------------------------
# internal-state update, rates, dissipation
# ---------------------------------------------------------------------------


def test_update_internal_exponential_law():
    state = InternalState()
    out = update_internal(state, gamma_dot=0.5, dt=0.2)
    assert out.hardening_var == pytest.approx(0.1)
    assert out.plastic_stretch == pytest.approx(math.exp(0.1), rel=1e-15)
    # two half steps compose exactly like one full step
    twice = update_internal(update_internal(state, 0.5, 0.1), 0.5, 0.1)
    assert twice.plastic_stretch == pytest.approx(out.plastic_stretch, rel=1e-15)
    assert update_internal(state, 0.0, 0.1) is state
    with pytest.raises(ValueError):
        update_internal(state, -0.1, 0.1)
    with pytest.raises(ValueError):
        update_internal(state, 0.1, 0.0)


def test_internal_state_validation():
    with pytest.raises(ValueError):
        InternalState(plastic_stretch=0.0)
    with pytest.raises(ValueError):
        InternalState(hardening_var=-1e-3)


def test_rate_conversion():
    assert rate_conversion(2.0, 0.6) == pytest.approx(1.6, rel=1e-15)
    assert rate_conversion(1.0, 0.0) == 1.0
    with pytest.raises(BetaSuperluminal):
        rate_conversion(1.0, 1.0 - 1e-12)


@given(beta=betas, a=stretches, lam=st.floats(0.0, 2.0))
@settings(deadline=None)
def test_dissipation_equals_effective_stress_times_rate(beta, a, lam):
    u, S, Fs, Fse, Ce, ts = family_state(beta, a, 1.0)
    w = UNIT.yield_weights
    sig = effective_stress(ts, w)
    assume(sig > 1e-6)
    dp, lp = plastic_rate_tensors(flow_direction(ts, w), lam)
    np.testing.assert_array_equal(dp, lp)
    xi = dissipation(ts, dp)
    assert xi == pytest.approx(sig * lam, rel=1e-12, abs=1e-12)
    assert xi >= -1e-12


def test_elastic_remainder_subtracts_plastic_rates():
    u = world_velocity(0.3)
    S = projector(u)
    rates = rate_tensors(np.array([[0.2, 0.1], [0.0, -0.1]]), S.s)
    dp = np.full((2, 2), 0.05)
    de, le = elastic_remainder(rates, dp, dp)
    np.testing.assert_allclose(de, rates.Ds_eta - dp, atol=1e-15)
    np.testing.assert_allclose(le, rates.Ls_eta - dp, atol=1e-15)


# ---------------------------------------------------------------------------
# frames, plastic tensors, energy-momentum
# ---------------------------------------------------------------------------


def test_spacelike_frame_orthonormal():
    for arg in (0.6, np.array([0.3, -0.2, 0.5])):
        u = world_velocity(arg)
        E = spacelike_frame(u)
        eta = metric(u.dim)
        np.testing.assert_allclose(E.T @ eta @ E, np.eye(u.dim - 1), atol=1e-12)
        np.testing.assert_allclose(u.u @ eta @ E, 0.0, atol=1e-12)


def test_spacelike_frame_frozen_d2():
    E = spacelike_frame(world_velocity(0.6))
    np.testing.assert_allclose(E[:, 0], [1.25, 0.75], atol=1e-13)


def test_plastic_cg_scalar_and_pushforward():
    Cp, Bp_rest = plastic_cg(1.2)
    assert Cp[0, 0] == pytest.approx(1.44)
    assert Bp_rest[0, 0] == pytest.approx(1.44)
    u = world_velocity(0.6)
    Cp, Bp = plastic_cg(1.2, u)
    eta = metric(2)
    # push-forward keeps the invariant trace: tr(Bp eta) = tr(Cp)
    assert float(np.trace(Bp @ eta)) == pytest.approx(1.44, rel=1e-12)
    assert np.max(np.abs(Bp - Bp.T)) <= 1e-12


@given(beta=betas, a=stretches, w=st.floats(0.5, 2.0))
@settings(deadline=None)
def test_energy_momentum_round_trip(beta, a, w):
    u, S, Fs, Fse, Ce, ts = family_state(beta, a, 1.0)
    tem = energy_momentum(w, u, ts)
    back = -S.s @ tem @ S.s.T
    scale = max(1.0, float(np.max(np.abs(ts))))
    assert np.max(np.abs(back - ts)) <= 1e-10 * scale


# ---------------------------------------------------------------------------
# parameter validation
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("kwargs", [
    {"rest_density": 0.0},
    {"stiffness": -1.0},
    {"yield_stress": 0.0},
    {"hardening": -0.1},
    {"beta_max": 1.5},
])
def test_material_params_validation(kwargs):
    with pytest.raises(ValueError):
        MaterialParams(**kwargs)


def test_material_params_default_weights_associated():
    params = MaterialParams()
    np.testing.assert_array_equal(params.yield_weights, signature_weights(2))
    assert params.potential_weights is params.yield_weights
    assert not params.yield_weights.flags.writeable
