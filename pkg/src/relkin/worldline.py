"""World-line simulator for a 1+1D bar under prescribed motion.

A motion preset supplies the trajectory x1(X, t) of each particle label X
together with analytic partial derivatives and the velocity-ratio field
beta(x1, x2) over events (x2 = c t).  Each step evaluates the kinematics at
the new time, runs an elastic predictor, and on plastic loading solves the
rate-form consistency condition followed by a discrete on-surface correction
(return mapping) before updating the internal state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .constitutive import (
    ConsistencySnapshot,
    InternalState,
    Loading,
    MaterialParams,
    NoConvergence,
    dissipation,
    effective_stress,
    elastic_split,
    flow_direction,
    flow_stress,
    loading_check,
    plastic_multiplier,
    plastic_rate_tensors,
    rate_conversion,
    stress,
    update_internal,
)
from .kinematics import (
    RateTensors,
    cg_invariants,
    jacobian,
    left_cauchy_green,
    rate_tensors,
    right_cauchy_green,
    spatial_part,
)
from .minkowski import Projector, WorldVelocity, projector, world_velocity

# Relative tolerance on the record-level identities (length split, stretch
# factorization) checked at every emitted step.
TOL_OBS = 1e-10


@dataclass(frozen=True)
class Motion:
    """Prescribed bar motion with analytic derivatives.

    position(X, t)        event coordinate x1 of particle X at time t;
    velocity(X, t)        d x1 / d t at fixed X;
    dx1_dX(X, t)          reference gradient of x1 (labels on the t = 0 slice);
    dx2_dX(X, t)          reference gradient of x2 (zero on constant-t slices);
    beta(x1, x2)          velocity-ratio field over events;
    beta_partials(x1, x2) (d beta/d x1, d beta/d x2), analytic;
    label_of_event(x1,x2) inverse map X(x), for sampling fields over events.
    """

    name: str
    params: dict
    c: float
    position: Callable[[float, float], float]
    velocity: Callable[[float, float], float]
    dx1_dX: Callable[[float, float], float]
    dx2_dX: Callable[[float, float], float]
    beta: Callable[[float, float], float]
    beta_partials: Callable[[float, float], tuple[float, float]]
    label_of_event: Callable[[float, float], float]


def rigid_boost(v0: float, c: float = 1.0) -> Motion:
    """Rigid translation x1 = X + v0 t: constant beta field, zero rates."""
    b0 = v0 / c
    return Motion(
        name="rigid_boost",
        params={"v0": v0},
        c=c,
        position=lambda X, t: X + v0 * t,
        velocity=lambda X, t: v0,
        dx1_dX=lambda X, t: 1.0,
        dx2_dX=lambda X, t: 0.0,
        beta=lambda x1, x2: b0,
        beta_partials=lambda x1, x2: (0.0, 0.0),
        label_of_event=lambda x1, x2: x1 - b0 * x2,
    )


def uniform_stretch(rate: float, c: float = 1.0) -> Motion:
    """Homogeneous stretch x1 = (1 + rate t) X: each particle moves at rate X."""

    def beta(x1, x2):
        return rate * x1 / (c + rate * x2)

    def beta_partials(x1, x2):
        b1 = rate / (c + rate * x2)
        return b1, -b1 * beta(x1, x2)

    return Motion(
        name="uniform_stretch",
        params={"rate": rate},
        c=c,
        position=lambda X, t: (1.0 + rate * t) * X,
        velocity=lambda X, t: rate * X,
        dx1_dX=lambda X, t: 1.0 + rate * t,
        dx2_dX=lambda X, t: 0.0,
        beta=beta,
        beta_partials=beta_partials,
        label_of_event=lambda x1, x2: c * x1 / (c + rate * x2),
    )


def boosted_stretch(rate: float, v0: float, c: float = 1.0) -> Motion:
    """Stretch superposed on a drift, x1 = (1 + rate t) X + v0 t."""

    def beta(x1, x2):
        return (rate * x1 + v0) / (c + rate * x2)

    def beta_partials(x1, x2):
        b1 = rate / (c + rate * x2)
        return b1, -b1 * beta(x1, x2)

    return Motion(
        name="boosted_stretch",
        params={"rate": rate, "v0": v0},
        c=c,
        position=lambda X, t: (1.0 + rate * t) * X + v0 * t,
        velocity=lambda X, t: rate * X + v0,
        dx1_dX=lambda X, t: 1.0 + rate * t,
        dx2_dX=lambda X, t: 0.0,
        beta=beta,
        beta_partials=beta_partials,
        label_of_event=lambda x1, x2: (c * x1 - v0 * x2) / (c + rate * x2),
    )


# preset name -> (factory, required parameter names)
MOTION_PRESETS: dict[str, tuple[Callable[..., Motion], tuple[str, ...]]] = {
    "rigid_boost": (rigid_boost, ("v0",)),
    "uniform_stretch": (uniform_stretch, ("rate",)),
    "boosted_stretch": (boosted_stretch, ("rate", "v0")),
}


def validate_motion(motion: Motion, labels, times, h: float = 1e-5) -> float:
    """Cross-check the analytic derivatives of a motion by central differences.

    Returns the largest relative mismatch over the sampled (X, t) grid among
    velocity, dx1_dX and the beta-field partials.  Used in validation mode;
    callers compare against a 1e-6 gate.
    """
    worst = 0.0
    for X in np.atleast_1d(labels):
        for t in np.atleast_1d(times):
            x1 = motion.position(X, t)
            x2 = motion.c * t
            fd_v = (motion.position(X, t + h) - motion.position(X, t - h)) / (2 * h)
            fd_g = (motion.position(X + h, t) - motion.position(X - h, t)) / (2 * h)
            fd_b1 = (motion.beta(x1 + h, x2) - motion.beta(x1 - h, x2)) / (2 * h)
            fd_b2 = (motion.beta(x1, x2 + h) - motion.beta(x1, x2 - h)) / (2 * h)
            b1, b2 = motion.beta_partials(x1, x2)
            for got, ref in ((motion.velocity(X, t), fd_v), (motion.dx1_dX(X, t), fd_g),
                             (b1, fd_b1), (b2, fd_b2)):
                worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
    return worst


# ---------------------------------------------------------------------------
# scenario and records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BarScenario:
    """Complete description of one bar run."""

    motion: Motion
    material: MaterialParams
    L0: float = 1.0
    X_count: int = 1
    t_start: float = 0.0
    t_end: float = 1.0
    dt: float = 1e-3
    mode: str = "relativistic"
    c: float = 1.0
    obs_tol: float = TOL_OBS

    def __post_init__(self):
        if self.L0 <= 0.0:
            raise ValueError("L0 must be positive")
        if self.X_count < 1:
            raise ValueError("X_count must be at least 1")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end <= self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.mode not in ("relativistic", "nonrelativistic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.c <= 0.0:
            raise ValueError("c must be positive")

    @property
    def labels(self) -> np.ndarray:
        """Particle labels X on the t = 0 slice."""
        if self.X_count == 1:
            return np.array([self.L0])
        return np.linspace(0.0, self.L0, self.X_count)

    @property
    def times(self) -> np.ndarray:
        n = int(round((self.t_end - self.t_start) / self.dt))
        n = max(n, 1)
        return self.t_start + self.dt * np.arange(n + 1)


@dataclass(frozen=True)
class TimeSeriesRecord:
    """One output row of the simulator (field order = CSV column order)."""

    t: float
    X: float
    beta: float
    C_hat: float
    j: float
    L: float
    L_prime: float
    T: float
    lambda_e: float
    lambda_p: float
    Gamma_p: float
    sigma_bar: float
    t_y: float
    xi: float
    loading: Loading


@dataclass(frozen=True)
class KinematicState:
    """All kinematic quantities of one particle at one time."""

    X: float
    t: float
    event: np.ndarray
    beta: float
    gamma: float
    u: WorldVelocity
    S: Projector
    F: np.ndarray
    Fs: np.ndarray
    C: np.ndarray
    B: np.ndarray
    I1: float
    I2: float
    j: float
    rates: RateTensors

    @property
    def div_u(self) -> float:
        return self.rates.div_u


def eval_kinematics(motion: Motion, X: float, t: float, c: float | None = None,
                    relativistic: bool = True,
                    beta_max: float | None = None) -> KinematicState:
    """Evaluate the full kinematic state of particle X at time t.

    All quantities are assembled from the preset's analytic partials through
    the algebra/kinematics operations (projector, spatial part, Cauchy-Green
    pair, Jacobian, rate tensors).  In nonrelativistic mode the velocity
    ratio is forced to zero while the velocity-gradient field is kept, which
    collapses every formula to its classical counterpart.
    """
    c = motion.c if c is None else c
    x1 = motion.position(X, t)
    x2 = c * t
    v = motion.velocity(X, t)
    beta = v / c if relativistic else 0.0
    kw = {} if beta_max is None else {"beta_max": beta_max}
    u = world_velocity(beta * c, c, **kw)
    S = projector(u)
    gamma = u.gamma
    F = np.array([[motion.dx1_dX(X, t)], [motion.dx2_dX(X, t)]])
    Fs = spatial_part(F, S.s)
    C = right_cauchy_green(Fs)
    B = left_cauchy_green(Fs)
    I1, I2 = cg_invariants(C, B)
    j = jacobian(Fs, u)
    b1, b2 = motion.beta_partials(x1, x2)
    g3 = gamma**3
    grad_u = np.array([[g3 * b1, g3 * b2],
                       [g3 * beta * b1, g3 * beta * b2]])
    rates = rate_tensors(grad_u, S.s)
    return KinematicState(X=X, t=t, event=np.array([x1, x2]), beta=beta, gamma=gamma,
                          u=u, S=S, F=F, Fs=Fs, C=C, B=B, I1=I1, I2=I2, j=j, rates=rates)


def observables(Fs, C, B, L0: float, tol: float = TOL_OBS) -> tuple[float, float, float]:
    """Observer-frame lengths of the bar: (L, L_prime, T).

    L = L0 Fs[0,0] (space span), L_prime = L0 sqrt(C) (invariant length),
    T = L0 Fs[1,0] (time span).  The left-tensor routes sqrt(B[0,0]) and
    sqrt(B[1,1]) are cross-asserted against |L| and |T|.
    """
    Fs = np.asarray(Fs, dtype=float)
    C = np.atleast_2d(np.asarray(C, dtype=float))
    B = np.asarray(B, dtype=float)
    L = L0 * Fs[0, 0]
    Lp = L0 * math.sqrt(C[0, 0])
    T = L0 * Fs[1, 0]
    for direct, viaB in ((L, L0 * math.sqrt(max(B[0, 0], 0.0))),
                         (T, L0 * math.sqrt(max(B[1, 1], 0.0)))):
        if abs(abs(direct) - viaB) > tol * max(1.0, abs(direct)):
            raise RuntimeError(f"observable route mismatch: {direct} vs {viaB}")
    return L, Lp, T


def _elastic_trial(kin: KinematicState, internal: InternalState, mat: MaterialParams):
    """Trial stress with the plastic variables frozen."""
    Fse = elastic_split(kin.Fs, internal.plastic_stretch)
    Ce = right_cauchy_green(Fse)
    ts = stress(Fse, Ce, mat)
    sig = effective_stress(ts, mat.yield_weights)
    return Fse, Ce, ts, sig


def _consistency_increment(kin: KinematicState, internal: InternalState,
                           mat: MaterialParams, guess: float) -> float:
    """Increment of Gamma_p restoring sigma_bar = t_y at the end of the step.

    Solves the scalar on-surface condition by Newton iteration safeguarded
    with bisection on the bracket [0, hi]; the trial state enters beyond the
    surface, and growing the plastic stretch relaxes the effective stress
    while hardening raises the threshold, so the residual crosses zero.
    """

    def residual(inc: float) -> float:
        fp = internal.plastic_stretch * math.exp(inc)
        _, _, _, sig = _elastic_trial(kin, replace(internal, plastic_stretch=fp), mat)
        return sig - flow_stress(mat, internal.hardening_var + inc)

    tol = max(mat.tol_newton * mat.yield_stress, 1e-14)
    lo, r_lo = 0.0, residual(0.0)
    if r_lo <= tol:
        return 0.0
    hi = max(guess, 1e-4)
    r_hi = residual(hi)
    grow = 0
    while r_hi > 0.0:
        hi *= 2.0
        r_hi = residual(hi)
        grow += 1
        if grow > 60:
            raise NoConvergence("could not bracket the consistency correction")
    inc = min(max(guess, lo), hi)
    r = residual(inc)
    for _ in range(mat.max_iter):
        if abs(r) <= tol:
            return inc
        if r > 0.0:
            lo = inc
        else:
            hi = inc
        step = max(abs(inc), 1e-6) * 1e-6
        drdi = (residual(inc + step) - residual(inc - step)) / (2.0 * step)
        nxt = inc - r / drdi if drdi != 0.0 else 0.5 * (lo + hi)
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        inc, r = nxt, residual(nxt)
    raise NoConvergence(f"consistency correction stalled at residual {r:.3e}")


def _emit(kin: KinematicState, internal: InternalState, mat: MaterialParams,
          L0: float, xi: float, obs_tol: float) -> TimeSeriesRecord:
    """Assemble the output record and enforce its identities."""
    Fse, Ce, ts, sig = _elastic_trial(kin, internal, mat)
    ty = flow_stress(mat, internal.hardening_var)
    L, Lp, T = observables(kin.Fs, kin.C, kin.B, L0, tol=obs_tol)
    lam_e = math.sqrt(float(np.trace(Ce)))
    lam_p = internal.plastic_stretch
    if abs(L * L - T * T - Lp * Lp) > obs_tol * max(1.0, Lp * Lp):
        raise RuntimeError("length identity L^2 - T^2 = L'^2 violated")
    if abs(Lp - L0 * lam_e * lam_p) > obs_tol * max(1.0, abs(Lp)):
        raise RuntimeError("stretch factorization L' = L0 lambda_e lambda_p violated")
    return TimeSeriesRecord(t=kin.t, X=kin.X, beta=kin.beta, C_hat=float(kin.C[0, 0]),
                            j=kin.j, L=L, L_prime=Lp, T=T, lambda_e=lam_e, lambda_p=lam_p,
                            Gamma_p=internal.hardening_var, sigma_bar=sig, t_y=ty,
                            xi=xi, loading=internal.loading)


def step(scenario: BarScenario, X: float, t: float, dt: float,
         internal: InternalState) -> tuple[InternalState, TimeSeriesRecord]:
    """Advance particle X from t to t + dt and emit the record at t + dt.

    Elastic predictor: kinematics at t + dt with frozen plastic variables.
    If the trial state loads beyond the surface, the rate-form consistency
    condition yields the multiplier, converted to the observer clock for the
    predictor increment, and the discrete on-surface correction fixes the
    increment so the step ends with sigma_bar = t_y to solver precision.
    """
    mat = scenario.material
    kin = eval_kinematics(scenario.motion, X, t + dt, scenario.c,
                          relativistic=(scenario.mode == "relativistic"),
                          beta_max=mat.beta_max)
    Fse, Ce, ts, sig = _elastic_trial(kin, internal, mat)
    branch = loading_check(sig, internal.hardening_var, mat)
    if branch is Loading.ELASTIC:
        new_internal = replace(internal, loading=Loading.ELASTIC)
        return new_internal, _emit(kin, new_internal, mat, scenario.L0, 0.0, scenario.obs_tol)

    # rate-form consistency solve at the trial state
    ty = flow_stress(mat, internal.hardening_var)
    snap = ConsistencySnapshot(ts=ts, df=flow_direction(ts, mat.yield_weights),
                               flow_dir=flow_direction(ts, mat.potential_weights),
                               Ls=kin.rates.Ls, Ds_eta=kin.rates.Ds_eta,
                               div_u=kin.div_u, flow_stress=ty, Fse=Fse)
    lam_rate = plastic_multiplier(snap, mat)
    # rate_conversion is per unit x2 = c t, the scenario clock ticks in t
    guess = rate_conversion(lam_rate, kin.beta, mat.beta_max) * scenario.c * dt
    inc = _consistency_increment(kin, internal, mat, guess)
    new_internal = replace(update_internal(internal, inc / dt, dt), loading=Loading.PLASTIC)

    Fse_f, Ce_f, ts_f, sig_f = _elastic_trial(kin, new_internal, mat)
    d_gamma_eff = kin.gamma * inc / (scenario.c * dt)  # D(Gamma_p) over the step
    if inc > 0.0:
        dp, _ = plastic_rate_tensors(flow_direction(ts_f, mat.potential_weights), d_gamma_eff)
        xi = dissipation(ts_f, dp)
    else:
        xi = 0.0
    if xi < -1e-12 * max(1.0, sig_f):
        raise RuntimeError(f"negative plastic dissipation xi = {xi:.3e}")
    return new_internal, _emit(kin, new_internal, mat, scenario.L0, xi, scenario.obs_tol)


def simulate(scenario: BarScenario) -> list[TimeSeriesRecord]:
    """Run every particle over the time grid; rows ordered by (X, then t)."""
    records: list[TimeSeriesRecord] = []
    times = scenario.times
    for X in scenario.labels:
        internal = InternalState()
        kin0 = eval_kinematics(scenario.motion, float(X), float(times[0]), scenario.c,
                               relativistic=(scenario.mode == "relativistic"),
                               beta_max=scenario.material.beta_max)
        _, _, _, sig0 = _elastic_trial(kin0, internal, scenario.material)
        internal = replace(internal, loading=loading_check(sig0, 0.0, scenario.material))
        records.append(_emit(kin0, internal, scenario.material, scenario.L0, 0.0, scenario.obs_tol))
        for i in range(1, times.size):
            internal, rec = step(scenario, float(X), float(times[i - 1]),
                                 float(times[i] - times[i - 1]), internal)
            records.append(rec)
    return records


def nonrelativistic_run(scenario: BarScenario) -> list[TimeSeriesRecord]:
    """Classical-limit run: beta is forced to zero in every formula.

    The scenario must carry mode = "nonrelativistic".  Surviving components:
    Fs = (dx1_dX; 0), T = 0, L = L_prime, and the stress has a single
    space-space component.
    """
    if scenario.mode != "nonrelativistic":
        raise ValueError('nonrelativistic_run requires mode = "nonrelativistic"')
    return simulate(scenario)
