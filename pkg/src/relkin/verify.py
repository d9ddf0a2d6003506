"""Seeded property suites behind the `relkin verify` command.

Each suite draws randomized trials, evaluates the residual of an exact
identity (or a convergence ratio), and reports one pass/fail line per check.
Tolerances can be scaled globally through the RELKIN_TOL_OVERRIDE environment
variable (a float multiplier, meant for CI experimentation).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import numpy as np

from . import constitutive as con
from . import kinematics as kin
from . import minkowski as mink
from . import worldline as wl


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float


def _tol_scale() -> float:
    raw = os.environ.get("RELKIN_TOL_OVERRIDE")
    if raw is None:
        return 1.0
    try:
        scale = float(raw)
    except ValueError as exc:
        raise ValueError(f"RELKIN_TOL_OVERRIDE must be a float, got {raw!r}") from exc
    if scale <= 0.0:
        raise ValueError("RELKIN_TOL_OVERRIDE must be positive")
    return scale


def _result(name: str, residual: float, tol: float) -> CheckResult:
    tol = tol * _tol_scale()
    return CheckResult(name=name, passed=residual <= tol, residual=residual, tolerance=tol)


def _random_beta(rng: np.random.Generator, dim: int, cap: float = 0.99):
    if dim == 2:
        return float(rng.uniform(-cap, cap))
    v = rng.uniform(-1.0, 1.0, size=3)
    n = np.linalg.norm(v)
    return v / n * rng.uniform(0.0, cap) if n > 0 else v


def _random_spacelike_gradient(rng: np.random.Generator, dim: int):
    """A (u, S, Fs) triple with Fs = S F for a random observer and gradient."""
    beta = _random_beta(rng, dim, cap=0.9)
    bvec = np.atleast_1d(beta)
    u = mink.world_velocity(bvec)
    S = mink.projector(u)
    F = rng.uniform(-1.5, 1.5, size=(dim, dim - 1)) + np.eye(dim, dim - 1)
    return u, S, S.s @ F


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------


def suite_algebra(rng: np.random.Generator, trials: int) -> list[CheckResult]:
    worst_group = 0.0
    worst_norm = 0.0
    worst_uu = 0.0
    worst_split = 0.0
    worst_proj = 0.0
    for k in range(trials):
        dim = 2 if k % 2 == 0 else 4
        eta = mink.metric(dim)
        boost = mink.boost_from_beta(_random_beta(rng, dim))
        lam, dual = boost.lam, boost.dual
        eye = np.eye(dim)
        worst_group = max(
            worst_group,
            float(np.max(np.abs(lam.T @ eta @ lam - eta))),
            float(np.max(np.abs(lam @ dual.T - eye))),
            float(np.max(np.abs(dual.T @ lam - eye))),
            float(np.max(np.abs(lam @ eta @ lam.T - eta))),
            abs(abs(float(np.linalg.det(lam))) - 1.0),
        )
        x = rng.uniform(-2.0, 2.0, size=dim)
        worst_norm = max(worst_norm, abs(mink.norm_sq(mink.apply_boost_vector(boost, x))
                                         - mink.norm_sq(x)))
        u = mink.world_velocity(np.atleast_1d(_random_beta(rng, dim)))
        worst_uu = max(worst_uu, abs(mink.norm_sq(u.u) + 1.0))
        f = rng.uniform(-2.0, 2.0, size=dim)
        f_t, f_s = mink.split(f, u)
        s = mink.projector(u)
        worst_split = max(
            worst_split,
            float(np.max(np.abs(f_t + f_s - f))),
            float(np.max(np.abs(s.s @ f_s - f_s))),
            abs(float(f_t @ eta @ f_s)),
        )
        # boosted projector equals the projector of the boosted observer
        s_star = mink.apply_boost_tensor(boost, s.s, mode="mixed")
        u_star_vec = mink.apply_boost_vector(boost, u.u)
        worst_proj = max(
            worst_proj,
            float(np.max(np.abs(s_star @ u_star_vec))),
            float(np.max(np.abs(s_star @ s_star - s_star))),
        )
    return [
        _result("boost group identities", worst_group, mink.TOL_ALG),
        _result("norm preserved under boost", worst_norm, mink.TOL_ALG),
        _result("world velocity unit time-like", worst_uu, mink.TOL_ALG),
        _result("time/space split partition", worst_split, mink.TOL_ALG),
        _result("projector transforms Lam S Lam'^T", worst_proj, mink.TOL_ALG),
    ]


# ---------------------------------------------------------------------------
# kinematics
# ---------------------------------------------------------------------------


def _sample_motions():
    return [
        wl.rigid_boost(0.6),
        wl.uniform_stretch(0.3),
        wl.boosted_stretch(0.25, 0.4),
    ]


def _field_samplers(motion: wl.Motion, quantity: str):
    """Event-space sampler of a kinematic quantity of a preset motion."""

    def sample(x):
        X = motion.label_of_event(x[0], x[1])
        t = x[1] / motion.c
        state = wl.eval_kinematics(motion, X, t)
        return getattr(state, quantity)

    return sample


def suite_kinematics(rng: np.random.Generator, trials: int) -> list[CheckResult]:
    worst_c_inv = 0.0
    worst_b_obj = 0.0
    worst_routes = 0.0
    worst_splitr = 0.0
    for k in range(trials):
        dim = 2 if k % 2 == 0 else 4
        u, S, Fs = _random_spacelike_gradient(rng, dim)
        eta = mink.metric(dim)
        boost = mink.boost_from_beta(_random_beta(rng, dim, cap=0.9))
        C = kin.right_cauchy_green(Fs, eta)
        B = kin.left_cauchy_green(Fs)
        C_star = kin.right_cauchy_green(boost.lam @ Fs, eta)
        scale = max(1.0, float(np.max(np.abs(C))))
        worst_c_inv = max(worst_c_inv, float(np.max(np.abs(C_star - C))) / scale)
        B_star = kin.left_cauchy_green(boost.lam @ Fs)
        scale_b = max(1.0, float(np.max(np.abs(B_star))))
        worst_b_obj = max(worst_b_obj, float(np.max(np.abs(
            B_star - mink.apply_boost_tensor(boost, B, "contra")))) / scale_b)
        i1c, i2c = kin.cg_invariants(C, B, eta)
        worst_routes = max(worst_routes,
                           abs(i1c - float(np.trace(B @ eta))) / max(1.0, abs(i1c)),
                           abs(i2c - float(np.trace(B @ eta @ B @ eta))) / max(1.0, abs(i2c)))
        grad_u = rng.uniform(-1.0, 1.0, size=(dim, dim))
        rates = kin.rate_tensors(grad_u, S.s, eta)
        worst_splitr = max(
            worst_splitr,
            float(np.max(np.abs(rates.Ls_eta - rates.Ds_eta - rates.Ws_eta))),
            float(np.max(np.abs(rates.Ds_eta - rates.Ds_eta.T))),
            float(np.max(np.abs(rates.Ws_eta + rates.Ws_eta.T))),
        )

    worst_motion = max(
        wl.validate_motion(motion, np.linspace(0.2, 1.0, 3), np.linspace(0.0, 1.5, 4))
        for motion in _sample_motions()
    )

    # world-line derivative identities, finite differences at h and h/2
    worst_dc = 0.0
    worst_dj = 0.0
    worst_transport = 0.0
    h = 1e-4
    for motion in _sample_motions()[1:]:
        for X, t in ((0.5, 0.4), (0.9, 1.1)):
            state = wl.eval_kinematics(motion, X, t)
            c_func = _field_samplers(motion, "C")
            dC = kin.invariant_derivative(c_func, state.u, state.event, h=h)
            rhs = 2.0 * state.Fs.T @ state.rates.Ds_eta @ state.Fs
            worst_dc = max(worst_dc, float(np.max(np.abs(dC - rhs))) / max(1.0, float(np.abs(rhs).max())))
            j_func = _field_samplers(motion, "j")
            dj = kin.invariant_derivative(j_func, state.u, state.event, h=h)
            rhs_j = state.j * float(np.trace(state.rates.Ls))
            worst_dj = max(worst_dj, abs(float(dj) - rhs_j) / max(1.0, abs(rhs_j)))
            fs_func = _field_samplers(motion, "Fs")
            dFs = kin.invariant_derivative(fs_func, state.u, state.event, h=h)
            lhs = state.S.s @ dFs
            rhs_t = state.rates.L @ state.Fs
            worst_transport = max(worst_transport,
                                  float(np.max(np.abs(lhs - rhs_t))) / max(1.0, float(np.abs(rhs_t).max())))

    # particle conservation on a manufactured rest-density field
    motion = wl.uniform_stretch(0.3)

    def u_field(x):
        X = motion.label_of_event(x[0], x[1])
        t = x[1] / motion.c
        return wl.eval_kinematics(motion, X, t).u.u

    def m0_conserving(x):
        return motion.c / (motion.c + 0.3 * x[1])

    worst_cons = 0.0
    for X, t in ((0.4, 0.3), (0.8, 1.2)):
        x = np.array([motion.position(X, t), motion.c * t])
        worst_cons = max(worst_cons,
                         abs(kin.particle_conservation_residual(m0_conserving, u_field, x, h=1e-4)))

    return [
        _result("right CG boost-invariant", worst_c_inv, mink.TOL_ALG),
        _result("left CG boost-objective", worst_b_obj, mink.TOL_ALG),
        _result("invariant routes C vs B", worst_routes, mink.TOL_ALG),
        _result("rate split exact", worst_splitr, 1e-13),
        _result("motion partials vs finite differences", worst_motion, 1e-6),
        _result("D(C) = 2 Fs^T Ds_eta Fs", worst_dc, 1e-6),
        _result("D(j) = j tr(Ls)", worst_dj, 1e-6),
        _result("transport S D(Fs) = L Fs", worst_transport, 1e-6),
        _result("particle conservation residual", worst_cons, 1e-6),
    ]


# ---------------------------------------------------------------------------
# constitutive
# ---------------------------------------------------------------------------


def _family_state(rng: np.random.Generator, params: con.MaterialParams):
    """Stress state of a random uniaxial space-like deformation (d = 2)."""
    beta = float(rng.uniform(-0.9, 0.9))
    a = float(rng.uniform(1.05, 1.6))
    fp = float(rng.uniform(0.9, 1.2))
    u = mink.world_velocity(beta)
    S = mink.projector(u)
    F = np.array([[a], [0.0]])
    Fs = S.s @ F
    Fse = con.elastic_split(Fs, fp)
    Ce, _ = con.elastic_cg(Fse)
    ts = con.stress(Fse, Ce, params)
    return u, S, Fs, Fse, ts, beta, a, fp


def suite_constitutive(rng: np.random.Generator, trials: int) -> list[CheckResult]:
    params = con.MaterialParams(rest_density=1.0, stiffness=1.0, yield_stress=1.0, hardening=0.5)
    w = params.yield_weights

    worst_grad = 0.0
    worst_sig_inv = 0.0
    worst_dir_obj = 0.0
    worst_ratio = 0.0
    worst_round = 0.0
    for _ in range(trials):
        u, S, Fs, Fse, ts, beta, a, fp = _family_state(rng, params)
        sig = con.effective_stress(ts, w)
        if sig < 1e-6:
            continue
        # flow direction against central differences of the potential
        direction = con.flow_direction(ts, w)
        step = 1e-6 * max(1.0, float(np.linalg.norm(ts)))
        fd = np.zeros_like(ts)
        for i in range(2):
            for jdx in range(2):
                dt = np.zeros_like(ts)
                dt[i, jdx] = step
                fd[i, jdx] = (con.effective_stress(ts + dt, w)
                              - con.effective_stress(ts - dt, w)) / (2 * step)
        worst_grad = max(worst_grad, float(np.max(np.abs(direction - fd)))
                         / max(1.0, float(np.max(np.abs(direction)))))
        # boost invariance / objectivity
        boost = mink.boost_from_beta(float(rng.uniform(-0.9, 0.9)))
        ts_star = mink.apply_boost_tensor(boost, ts, "contra")
        worst_sig_inv = max(worst_sig_inv,
                            abs(con.effective_stress(ts_star, w) - sig) / max(1.0, sig))
        dir_star = con.flow_direction(ts_star, w)
        worst_dir_obj = max(worst_dir_obj, float(np.max(np.abs(
            dir_star - mink.apply_boost_tensor(boost, direction, "cov"))))
            / max(1.0, float(np.max(np.abs(dir_star)))))
        # uniaxial component structure t12 = beta t11, t22 = beta^2 t11
        t11 = ts[0, 0]
        worst_ratio = max(worst_ratio,
                          abs(ts[0, 1] - beta * t11) / max(1.0, abs(t11)),
                          abs(ts[1, 1] - beta**2 * t11) / max(1.0, abs(t11)),
                          abs(sig - abs(t11) * (1.0 - beta**2)) / max(1.0, sig))
        # energy-momentum round trip
        tem = con.energy_momentum(float(rng.uniform(0.5, 2.0)), u, ts)
        back = -S.s @ tem @ S.s.T
        worst_round = max(worst_round, float(np.max(np.abs(back - ts)))
                          / max(1.0, float(np.max(np.abs(ts)))))

    # consistency solve residual and non-negative dissipation on loading states
    worst_resid = 0.0
    worst_xi = 0.0
    for _ in range(max(10, trials // 10)):
        u, S, Fs, Fse, ts, beta, a, fp = _family_state(rng, params)
        sig = con.effective_stress(ts, w)
        if sig < 1e-3 or ts[0, 0] < 0.0:
            continue  # keep tensile loading states; compression unloads here
        gamma = u.gamma
        k_grad = float(rng.uniform(0.0, 0.5))
        grad_u = gamma**3 * np.array([[k_grad, 0.0], [beta * k_grad, 0.0]])
        rates = kin.rate_tensors(grad_u, S.s)
        mat = replace(params, yield_stress=sig)  # on the surface now
        snap = con.ConsistencySnapshot(
            ts=ts, df=con.flow_direction(ts, w), flow_dir=con.flow_direction(ts, w),
            Ls=rates.Ls, Ds_eta=rates.Ds_eta, div_u=rates.div_u,
            flow_stress=sig, Fse=Fse)
        lam = con.plastic_multiplier(snap, mat)
        g1 = con.consistency_lhs(snap, mat)
        g2 = con.consistency_rhs_coefficient(snap, mat)
        worst_resid = max(worst_resid, abs(g1 - g2 * lam) / max(abs(g2 * lam), 1e-14))
        dp, _ = con.plastic_rate_tensors(snap.flow_dir, lam)
        xi = con.dissipation(ts, dp)
        worst_xi = max(worst_xi, abs(xi - sig * lam) / max(1.0, abs(xi)))
        if xi < -1e-12:
            worst_xi = float("inf")

    return [
        _result("flow direction vs finite differences", worst_grad, 1e-6),
        _result("effective stress boost-invariant", worst_sig_inv, mink.TOL_ALG),
        _result("flow direction boost-objective", worst_dir_obj, mink.TOL_ALG),
        _result("uniaxial stress component structure", worst_ratio, 1e-12),
        _result("energy-momentum round trip", worst_round, mink.TOL_ALG),
        _result("consistency Newton residual", worst_resid, 1e-12),
        _result("dissipation equals sigma_bar D(Gamma_p)", worst_xi, 1e-12),
    ]


# ---------------------------------------------------------------------------
# classical limit
# ---------------------------------------------------------------------------


def _limit_scenarios():
    mat = con.MaterialParams(rest_density=1.0, stiffness=1.0, yield_stress=0.35,
                             hardening=0.6)
    base = dict(material=mat, L0=1.0, X_count=1, t_start=0.0, t_end=1.5, dt=5e-3)
    nr = wl.BarScenario(motion=wl.uniform_stretch(0.4, c=1.0), mode="nonrelativistic",
                        c=1.0, **base)
    runs = {}
    for s in (1e-2, 1e-3):
        c = 1.0 / s
        runs[s] = wl.BarScenario(motion=wl.uniform_stretch(0.4, c=c), mode="relativistic",
                                 c=c, **base)
    return nr, runs


def suite_limit(rng: np.random.Generator, trials: int) -> list[CheckResult]:
    nr, runs = _limit_scenarios()
    recs_nr = wl.nonrelativistic_run(nr)
    worst_nr = 0.0
    for r in recs_nr:
        worst_nr = max(worst_nr, abs(r.T), abs(r.L - r.L_prime),
                       abs(r.beta))
    devs = {}
    for s, sc in runs.items():
        recs = wl.simulate(sc)
        devs[s] = max(abs(a.Gamma_p - b.Gamma_p) for a, b in zip(recs[-10:], recs_nr[-10:]))
    ratio = devs[1e-2] / devs[1e-3] if devs[1e-3] > 0 else float("inf")
    # quadratic convergence in beta: one decade in s moves deviations by ~100
    ratio_resid = abs(math.log2(ratio / 100.0)) if ratio > 0 else float("inf")

    worst_mult = 0.0
    params = con.MaterialParams(rest_density=1.0, stiffness=1.0, yield_stress=1.0,
                                hardening=0.5)
    for _ in range(max(5, trials // 40)):
        a = float(rng.uniform(1.1, 1.5))
        k_grad = float(rng.uniform(0.05, 0.4))
        beta = 1e-4
        u = mink.world_velocity(beta)
        S = mink.projector(u)
        Fs = S.s @ np.array([[a], [0.0]])
        Fse = con.elastic_split(Fs, 1.0)
        Ce, _ = con.elastic_cg(Fse)
        ts = con.stress(Fse, Ce, params)
        sig = con.effective_stress(ts, params.yield_weights)
        gamma = u.gamma
        grad_u = gamma**3 * np.array([[k_grad, 0.0], [beta * k_grad, 0.0]])
        rates = kin.rate_tensors(grad_u, S.s)
        mat = replace(params, yield_stress=sig)
        snap = con.ConsistencySnapshot(
            ts=ts, df=con.flow_direction(ts, mat.yield_weights),
            flow_dir=con.flow_direction(ts, mat.yield_weights),
            Ls=rates.Ls, Ds_eta=rates.Ds_eta, div_u=rates.div_u,
            flow_stress=sig, Fse=Fse)
        lam = con.plastic_multiplier(snap, mat)
        i1e = float(np.trace(Ce))
        drive = 4.0 * i1e * (2.0 * i1e - 1.0)
        classical = drive * k_grad / (mat.hardening + drive)
        worst_mult = max(worst_mult, abs(lam - classical) / max(1e-14, classical))

    return [
        _result("nonrelativistic run: T = 0, L = L'", worst_nr, 1e-14),
        CheckResult(name="beta-scaling deviation ratio in [50, 200]",
                    passed=(50.0 <= ratio <= 200.0) if math.isfinite(ratio) else False,
                    residual=ratio, tolerance=200.0),
        _result("multiplier matches classical at beta -> 0", worst_mult, 1e-6),
    ]


SUITES = {
    "algebra": suite_algebra,
    "kinematics": suite_kinematics,
    "constitutive": suite_constitutive,
    "limit": suite_limit,
}


def run_suites(names, seed: int = 0, trials: int = 200) -> list[tuple[str, list[CheckResult]]]:
    """Run the requested suites with a fresh seeded generator per suite."""
    out = []
    for name in names:
        rng = np.random.default_rng(seed)
        out.append((name, SUITES[name](rng, trials)))
    return out
