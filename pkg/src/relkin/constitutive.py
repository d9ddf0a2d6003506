"""Elastic-plastic constitutive update driven by a consistency condition.

The space-like deformation gradient splits multiplicatively, Fs = Fs_e F_p,
with the plastic part F_p living in the instantaneous rest frame.  Stress
follows from a quadratic free energy in the first elastic invariant,

    psi = (c1 / 2) (I1_e - 1)^2,    ts = 2 m0 Fs_e (d psi / d C_e) Fs_e^T,

and plastic flow is governed by an effective stress built from a signed
quadratic form of the stress components.  During plastic loading the
multiplier solves the consistency condition D(F) = 0 written as
g1(lambda) = g2 lambda, by safeguarded Newton iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .kinematics import RateTensors, left_cauchy_green, right_cauchy_green
from .minkowski import DEFAULT_BETA_MAX, TOL_ALG, BetaSuperluminal, WorldVelocity, metric

# Relative floor under which the flow direction is considered undefined.
TOL_DIV = 1e-14


class NegativeRadicand(ValueError):
    """Signed quadratic form of the stress came out negative beyond round-off."""


class ApexSingularity(ValueError):
    """Flow direction requested at (numerically) zero effective stress."""


class NoConvergence(RuntimeError):
    """Iterative solve failed to meet its residual tolerance."""


class Loading(Enum):
    ELASTIC = "elastic"
    PLASTIC = "plastic"


def signature_weights(dim: int) -> np.ndarray:
    """Component weights w_ab = sign(eta_aa) sign(eta_bb).

    The induced quadratic form sum w_ab t_ab^2 equals tr((t eta)^2) for
    symmetric t, which is invariant under t -> Lam t Lam^T for any Lorentz
    transformation.  For dim = 2 this is [[1, -1], [-1, 1]]: the effective
    stress of a uniaxial space-like stress state reduces to |t11| (1 - beta^2).
    """
    sign = np.diagonal(metric(dim)).copy()
    return np.outer(sign, sign)


WEIGHT_PRESETS = {"metric-signature": signature_weights}


@dataclass(frozen=True)
class MaterialParams:
    """Material constants and solver tolerances.

    rest_density      m0, particle density in the rest frame (premultiplies
                      both the stress and, by convention, the flow stress);
    stiffness         c1, curvature of the free energy in I1_e;
    yield_stress      t0, initial flow stress (already m0-premultiplied);
    hardening         H, linear hardening slope d t_y / d Gamma_p;
    yield_weights     quadratic weights of the loading function (A1);
    potential_weights quadratic weights of the flow potential (A2); equal to
                      yield_weights by default (associated flow).
    """

    rest_density: float = 1.0
    stiffness: float = 1.0
    yield_stress: float = 1.0
    hardening: float = 0.0
    yield_weights: np.ndarray | None = None
    potential_weights: np.ndarray | None = None
    beta_max: float = DEFAULT_BETA_MAX
    tol_newton: float = 1e-12
    tol_consistency: float = 1e-10
    max_iter: int = 100

    def __post_init__(self):
        if self.rest_density <= 0.0:
            raise ValueError("rest_density must be positive")
        if self.stiffness <= 0.0:
            raise ValueError("stiffness must be positive")
        if self.yield_stress <= 0.0:
            raise ValueError("yield_stress must be positive")
        if self.hardening < 0.0:
            raise ValueError("hardening must be non-negative")
        if not (0.0 < self.beta_max < 1.0):
            raise ValueError("beta_max must lie in (0, 1)")
        yw = signature_weights(2) if self.yield_weights is None else np.array(self.yield_weights, float)
        pw = yw if self.potential_weights is None else np.array(self.potential_weights, float)
        yw.setflags(write=False)
        pw.setflags(write=False)
        object.__setattr__(self, "yield_weights", yw)
        object.__setattr__(self, "potential_weights", pw)


@dataclass(frozen=True)
class InternalState:
    """Plastic internal variables carried between steps.

    plastic_stretch  F_p (> 0), scalar in the 1+1D setting;
    hardening_var    Gamma_p (>= 0, non-decreasing);
    loading          branch taken on the step that produced this state.
    """

    plastic_stretch: float = 1.0
    hardening_var: float = 0.0
    loading: Loading = Loading.ELASTIC

    def __post_init__(self):
        if self.plastic_stretch <= 0.0:
            raise ValueError("plastic_stretch must be positive")
        if self.hardening_var < 0.0:
            raise ValueError("hardening_var must be non-negative")


@dataclass(frozen=True)
class StressState:
    """Stress point evaluated from an elastic state.

    ts             space-like stress tensor (d x d, symmetric);
    effective      scalar effective stress from the yield weights;
    flow_stress    current yield threshold t0 + H Gamma_p;
    loading_value  effective - flow_stress (<= 0 on/inside the surface);
    free_energy    psi per unit rest density;
    entropy        isothermal contribution (identically zero here).
    """

    ts: np.ndarray
    effective: float
    flow_stress: float
    loading_value: float
    free_energy: float
    entropy: float


def elastic_split(Fs, plastic_stretch) -> np.ndarray:
    """Elastic part Fs_e = Fs F_p^{-1} of the space-like gradient."""
    Fs = np.asarray(Fs, dtype=float)
    if np.ndim(plastic_stretch) == 0:
        fp = float(plastic_stretch)
        if fp <= 0.0:
            raise ValueError("plastic stretch must be positive")
        return Fs / fp
    return Fs @ np.linalg.inv(np.asarray(plastic_stretch, dtype=float))


def elastic_cg(Fse, eta: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Elastic Cauchy-Green pair (C_e, B_e) from the elastic gradient."""
    return right_cauchy_green(Fse, eta), left_cauchy_green(Fse)


def spacelike_frame(u: WorldVelocity) -> np.ndarray:
    """d x (d-1) frame E with eta-orthonormal space-like columns orthogonal to u.

    Columns are built by projecting the spatial basis vectors with
    S = I + u (eta u)^T and Gram-Schmidt orthonormalizing in the Minkowski
    inner product (positive definite on the space-like subspace).
    """
    d = u.dim
    eta = metric(d)
    s = np.eye(d) + np.outer(u.u, eta @ u.u)
    cols: list[np.ndarray] = []
    for a in range(d - 1):
        e = s[:, a].copy()
        for q in cols:
            e -= (q @ eta @ e) * q
        n2 = float(e @ eta @ e)
        if n2 <= TOL_ALG:
            raise ValueError("degenerate space-like frame")
        cols.append(e / math.sqrt(n2))
    return np.column_stack(cols)


def plastic_cg(plastic_stretch, u: WorldVelocity | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Plastic Cauchy-Green pair (C_p, B_p).

    C_p = F_p^T F_p lives in the rest frame ((d-1) x (d-1); the scalar case
    gives F_p^2).  B_p is the space-time push-forward E F_p F_p^T E^T using
    the observer's space-like frame; when no observer is given the rest-frame
    tensor F_p F_p^T is returned instead.
    """
    fp = np.atleast_2d(np.asarray(plastic_stretch, dtype=float))
    Cp = fp.T @ fp
    Bp_rest = fp @ fp.T
    if u is None:
        return Cp, Bp_rest
    E = spacelike_frame(u)
    return Cp, E @ Bp_rest @ E.T


def free_energy(Ce, params: MaterialParams) -> tuple[float, float]:
    """Free energy and entropy densities (psi, h) of the elastic state.

    psi = (c1/2) (I1_e - 1)^2 and h = 0 (isothermal).
    """
    i1e = float(np.trace(np.atleast_2d(np.asarray(Ce, dtype=float))))
    psi = 0.5 * params.stiffness * (i1e - 1.0) ** 2
    return psi, 0.0


def stress(Fse, Ce, params: MaterialParams) -> np.ndarray:
    """Space-like stress ts = 2 m0 Fse (d psi / d C_e) Fse^T.

    For the quadratic free energy d psi / d C_e = c1 (I1_e - 1) I, so
    ts = 2 m0 c1 (I1_e - 1) B_e.  Symmetric d x d, boost-objective.
    """
    Fse = np.asarray(Fse, dtype=float)
    i1e = float(np.trace(np.atleast_2d(np.asarray(Ce, dtype=float))))
    return (2.0 * params.rest_density * params.stiffness * (i1e - 1.0)) * (Fse @ Fse.T)


def _quadratic_form(ts: np.ndarray, weights: np.ndarray) -> float:
    if weights.ndim == 2:
        return float(np.sum(weights * ts**2))
    if weights.ndim == 4:
        return float(np.einsum("ab,abcd,cd->", ts, weights, ts))
    raise ValueError("weights must be a 2nd- or 4th-order array")


def effective_stress(ts, weights) -> float:
    """Scalar effective stress sqrt(sum w_ab t_ab^2) (or t:W:t for 4th-order W).

    Radicands below -TOL_ALG (relative) raise NegativeRadicand: the stress
    lies outside the family the quadratic form is meant for.  Tiny negative
    round-off is clamped to zero.
    """
    ts = np.asarray(ts, dtype=float)
    weights = np.asarray(weights, dtype=float)
    rad = _quadratic_form(ts, weights)
    scale = max(1.0, float(np.sum(ts**2)))
    if rad < -TOL_ALG * scale:
        raise NegativeRadicand(f"effective stress radicand = {rad:.3e} < 0")
    return math.sqrt(max(rad, 0.0))


def flow_direction(ts, weights) -> np.ndarray:
    """Gradient of the effective-stress potential with respect to ts.

    For quadratic weights, d sqrt(sum w t^2) / d t_ab = w_ab t_ab / Q.
    Fourth-order weight arrays must have major symmetry.  Raises
    ApexSingularity when the potential vanishes (direction undefined).
    """
    ts = np.asarray(ts, dtype=float)
    weights = np.asarray(weights, dtype=float)
    q = effective_stress(ts, weights)
    scale = max(1.0, float(np.linalg.norm(ts)))
    if q <= TOL_DIV * scale:
        raise ApexSingularity("flow direction undefined at zero effective stress")
    if weights.ndim == 2:
        return weights * ts / q
    return np.einsum("abcd,cd->ab", weights, ts) / q


def flow_stress(params: MaterialParams, hardening_var: float) -> float:
    """Current yield threshold t_y = t0 + H Gamma_p."""
    return params.yield_stress + params.hardening * hardening_var


def loading_check(sigma_bar: float, hardening_var: float, params: MaterialParams) -> Loading:
    """Loading branch: PLASTIC iff sigma_bar - t_y >= -tol_consistency."""
    ty = flow_stress(params, hardening_var)
    if sigma_bar - ty >= -params.tol_consistency:
        return Loading.PLASTIC
    return Loading.ELASTIC


def stress_state(Fse, params: MaterialParams, hardening_var: float = 0.0,
                 eta: np.ndarray | None = None) -> StressState:
    """Evaluate the full stress point of an elastic state."""
    Ce, _ = elastic_cg(Fse, eta)
    psi, h = free_energy(Ce, params)
    ts = stress(Fse, Ce, params)
    sig = effective_stress(ts, params.yield_weights)
    ty = flow_stress(params, hardening_var)
    ts.setflags(write=False)
    return StressState(ts=ts, effective=sig, flow_stress=ty,
                       loading_value=sig - ty, free_energy=psi, entropy=h)


# ---------------------------------------------------------------------------
# consistency condition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConsistencySnapshot:
    """Everything the consistency condition needs at one event.

    ts           trial stress (on the yield surface up to drift);
    df           gradient of the loading function at ts (yield weights);
    flow_dir     gradient of the flow potential at ts (potential weights);
    Ls           total space-like velocity gradient L S;
    Ds_eta       total symmetric rate eta L S |_sym;
    div_u        divergence of the world velocity;
    flow_stress  current t_y;
    Fse          elastic gradient producing ts.
    """

    ts: np.ndarray
    df: np.ndarray
    flow_dir: np.ndarray
    Ls: np.ndarray
    Ds_eta: np.ndarray
    div_u: float
    flow_stress: float
    Fse: np.ndarray


def _contract(a: np.ndarray, b: np.ndarray) -> float:
    """A : B = tr(A B^T) = sum of element-wise products."""
    return float(np.sum(a * b))


def consistency_lhs(snap: ConsistencySnapshot, params: MaterialParams) -> float:
    """Driving side g1 of the consistency condition, from the total rates.

    g1 = df : [Ls ts + ts Ls^T - div(u) ts
               + 4 m0 Fse (psi'' : Fse^T Ds_eta Fse) Fse^T]
         + div(u) t_y,

    with psi'' : M = c1 tr(M) I for the quadratic free energy.  The
    divergence transport terms cancel on the yield surface and vanish for a
    constant rest density; observer-map gradient contributions vanish because
    frame changes are homogeneous here.
    """
    Fse = snap.Fse
    curv = float(np.trace(Fse.T @ snap.Ds_eta @ Fse))
    rate = (snap.Ls @ snap.ts + snap.ts @ snap.Ls.T
            - snap.div_u * snap.ts
            + (4.0 * params.rest_density * params.stiffness * curv) * (Fse @ Fse.T))
    return _contract(snap.df, rate) + snap.div_u * snap.flow_stress


def consistency_rhs_coefficient(snap: ConsistencySnapshot, params: MaterialParams) -> float:
    """Coefficient g2 multiplying the plastic rate in g1 = g2 lambda.

    Collects every lambda-coefficient of the stress rate under the plastic
    parts Lp_eta = Dp_eta = flow_dir lambda (zero plastic spin):

    g2 = H + df : [(eta flow_dir) ts + ts (eta flow_dir)^T]
           + 4 m0 df : Fse (psi'' : Fse^T flow_dir Fse) Fse^T.

    Positive for admissible parameters; with the signature weights it equals
    H + 4 m0 c1 I1_e (2 I1_e - 1) on the yield surface.
    """
    eta = metric(snap.ts.shape[0])
    Fse = snap.Fse
    lp = eta @ snap.flow_dir
    transport = _contract(snap.df, lp @ snap.ts + snap.ts @ lp.T)
    inner = float(np.trace(Fse.T @ snap.flow_dir @ Fse))
    Be = Fse @ Fse.T
    curv = 4.0 * params.rest_density * params.stiffness * inner * _contract(snap.df, Be)
    return params.hardening + transport + curv


def plastic_multiplier(snap: ConsistencySnapshot, params: MaterialParams) -> float:
    """Plastic rate multiplier lambda = D(Gamma_p) solving g1 = g2 lambda.

    Safeguarded Newton iteration starting from lambda0 = g1 / g2; the
    converged residual satisfies |g1 - g2 lambda| <= tol_newton |g2 lambda|
    (plus an absolute floor).  Roots below -tol_newton mean elastic unloading
    and return 0.  Raises NoConvergence after max_iter iterations.
    """
    g1 = consistency_lhs(snap, params)
    g2 = consistency_rhs_coefficient(snap, params)
    if not g2 > 0.0:
        raise NoConvergence(f"non-positive consistency coefficient g2 = {g2:.3e}")

    def residual(lam: float) -> float:
        return g1 - g2 * lam

    def converged(lam: float, r: float) -> bool:
        return abs(r) <= params.tol_newton * abs(g2 * lam) + 1e-14

    lam = g1 / g2
    lo, hi = None, None  # bracket around the sign change, once seen
    r = residual(lam)
    for _ in range(params.max_iter):
        if converged(lam, r):
            break
        if r > 0.0:
            lo = lam if lo is None else max(lo, lam)
        else:
            hi = lam if hi is None else min(hi, lam)
        step = max(abs(lam), 1.0) * 1e-7
        drdl = (residual(lam + step) - residual(lam - step)) / (2.0 * step)
        if drdl != 0.0:
            nxt = lam - r / drdl
        else:
            nxt = lam
        if lo is not None and hi is not None and not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)  # bisection fallback
        elif drdl == 0.0:
            raise NoConvergence("flat consistency residual without a bracket")
        lam, r = nxt, residual(nxt)
    else:
        raise NoConvergence(f"consistency solve stalled at residual {r:.3e}")
    if lam < -params.tol_newton:
        return 0.0  # negative root: elastic unloading
    return max(lam, 0.0)


# ---------------------------------------------------------------------------
# rates, update, dissipation
# ---------------------------------------------------------------------------


def rate_conversion(d_gamma: float, beta: float,
                    beta_max: float = DEFAULT_BETA_MAX) -> float:
    """Convert the invariant rate D(Gamma_p) to the observer clock.

    Gamma_p' = sqrt(1 - beta^2) D(Gamma_p), per unit of the time coordinate
    x[d-1] = c t.  Raises BetaSuperluminal for |beta| > beta_max.
    """
    if abs(beta) > beta_max:
        raise BetaSuperluminal(f"|beta| = {abs(beta)} exceeds beta_max = {beta_max}")
    return math.sqrt(1.0 - beta**2) * d_gamma


def update_internal(state: InternalState, gamma_dot: float, dt: float) -> InternalState:
    """Advance the internal variables over one step.

    Gamma_p grows by gamma_dot * dt and the plastic stretch multiplicatively,
    F_p <- F_p exp(gamma_dot dt), keeping F_p = exp(Gamma_p) when started from
    the virgin state.  gamma_dot must be non-negative (plastic monotonicity).
    """
    if dt <= 0.0:
        raise ValueError("time step must be positive")
    if gamma_dot < 0.0:
        raise ValueError("plastic rate must be non-negative")
    inc = gamma_dot * dt
    if inc == 0.0:
        return state
    return replace(state,
                   plastic_stretch=state.plastic_stretch * math.exp(inc),
                   hardening_var=state.hardening_var + inc)


def plastic_rate_tensors(direction, d_gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Plastic stretching and velocity gradient (metric-lowered).

    Zero plastic spin: both equal direction * D(Gamma_p).
    """
    dp = np.asarray(direction, dtype=float) * d_gamma
    return dp, dp.copy()


def elastic_remainder(rates: RateTensors, Dp_eta, Lp_eta) -> tuple[np.ndarray, np.ndarray]:
    """Elastic parts of the metric-lowered rates, total minus plastic."""
    return rates.Ds_eta - np.asarray(Dp_eta, float), rates.Ls_eta - np.asarray(Lp_eta, float)


def dissipation(ts, Dp_eta) -> float:
    """Plastic dissipation xi = ts : Dp_eta (= sigma_bar D(Gamma_p) for
    associated flow).  Non-negative during plastic loading."""
    return _contract(np.asarray(ts, dtype=float), np.asarray(Dp_eta, dtype=float))


def energy_momentum(energy_density: float, u: WorldVelocity, ts) -> np.ndarray:
    """Energy-momentum tensor T = w u x u - ts.

    The space-like stress is recovered by the round trip ts = -S T S^T.
    """
    ts = np.asarray(ts, dtype=float)
    return energy_density * np.outer(u.u, u.u) - ts
