"""Minkowski-space algebra: metric, four-vectors, boosts, world velocities.

Conventions used throughout the package:

* signature (+, ..., +, -), the time component is the LAST entry (x[d-1] = c*t);
* dimension-generic, d = 2 for the 1+1D bar and d = 4 for full space-time;
* the dual of a transformation M is M' = eta M eta.

All containers are immutable and validated at construction; every function is
pure, so the module is safe to use from multiple threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# Absolute tolerance on algebraic identity residuals.
TOL_ALG = 1e-10

# Hard kinematic bound: |v| <= DEFAULT_BETA_MAX * c, never clamped.
DEFAULT_BETA_MAX = 1.0 - 1e-9


class BetaSuperluminal(ValueError):
    """Spatial speed at or beyond the configured fraction of c."""


def _frozen(a) -> np.ndarray:
    """Copy to a float64 array and make it read-only."""
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


def metric(dim: int) -> np.ndarray:
    """Metric tensor diag(1, ..., 1, -1) with the time axis last."""
    if dim < 2:
        raise ValueError(f"metric requires dim >= 2, got {dim}")
    eta = np.eye(dim)
    eta[-1, -1] = -1.0
    return eta


def norm_sq(x, eta: np.ndarray | None = None) -> float:
    """Minkowski length squared x.eta.x (negative for time-like vectors)."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("four-vector components must be finite")
    if eta is None:
        eta = metric(x.shape[0])
    return float(x @ eta @ x)


class Causality(Enum):
    TIME_LIKE = "time-like"
    SPACE_LIKE = "space-like"
    NULL = "null"


def classify(x, eta: np.ndarray | None = None, tol: float = TOL_ALG) -> Causality:
    """Causal character of a four-vector, with a +-tol dead band around null."""
    n = norm_sq(x, eta)
    if n < -tol:
        return Causality.TIME_LIKE
    if n > tol:
        return Causality.SPACE_LIKE
    return Causality.NULL


# ---------------------------------------------------------------------------
# world velocity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WorldVelocity:
    """Unit time-like velocity u = (v gamma / c, gamma), normalized u.eta.u = -1."""

    u: np.ndarray
    v: np.ndarray
    beta: float
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "u", _frozen(self.u))
        object.__setattr__(self, "v", _frozen(np.atleast_1d(self.v)))
        if self.c <= 0.0:
            raise ValueError("speed of light must be positive")
        if not (0.0 <= self.beta < 1.0):
            raise BetaSuperluminal(f"beta = {self.beta} outside [0, 1)")
        resid = abs(norm_sq(self.u) + 1.0)
        if resid > TOL_ALG * max(1.0, self.gamma**2):
            raise ValueError(f"world velocity not normalized, |u.eta.u + 1| = {resid:.3e}")

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.beta**2)


def world_velocity(v, c: float = 1.0, beta_max: float = DEFAULT_BETA_MAX) -> WorldVelocity:
    """Build the world velocity for spatial velocity v (scalar or (d-1)-vector).

    Raises BetaSuperluminal when |v| > beta_max * c; no clamping is applied.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if c <= 0.0:
        raise ValueError("speed of light must be positive")
    beta = float(np.linalg.norm(v)) / c
    if beta > beta_max:
        raise BetaSuperluminal(f"|v|/c = {beta} exceeds beta_max = {beta_max}")
    gamma = 1.0 / math.sqrt(1.0 - beta**2)
    u = np.concatenate([v * (gamma / c), [gamma]])
    return WorldVelocity(u=u, v=v, beta=beta, c=c)


# ---------------------------------------------------------------------------
# boosts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LorentzBoost:
    """Transformation Lam preserving the metric, with dual Lam' = eta Lam eta.

    Construction validates the group identities
        Lam^T eta Lam = eta,   Lam Lam'^T = Lam'^T Lam = I,   |det Lam| = 1.
    The residual tolerance is scaled by |Lam|^2 so that legitimate boosts close
    to the light cone are not rejected by float round-off.
    """

    lam: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        if lam.ndim != 2 or lam.shape[0] != lam.shape[1] or lam.shape[0] < 2:
            raise ValueError(f"boost matrix must be square with dim >= 2, got {lam.shape}")
        if not np.all(np.isfinite(lam)):
            raise ValueError("boost matrix entries must be finite")
        object.__setattr__(self, "lam", _frozen(lam))
        eta = metric(lam.shape[0])
        dual = eta @ lam @ eta
        scale = max(1.0, float(np.linalg.norm(lam)) ** 2)
        checks = {
            "Lam^T eta Lam - eta": lam.T @ eta @ lam - eta,
            "Lam Lam'^T - I": lam @ dual.T - np.eye(lam.shape[0]),
            "Lam'^T Lam - I": dual.T @ lam - np.eye(lam.shape[0]),
            "Lam eta Lam^T - eta": lam @ eta @ lam.T - eta,
        }
        for name, resid in checks.items():
            r = float(np.max(np.abs(resid)))
            if r > TOL_ALG * scale:
                raise ValueError(f"not a Lorentz transformation: |{name}| = {r:.3e}")
        det = abs(float(np.linalg.det(lam)))
        if abs(det - 1.0) > TOL_ALG * scale:
            raise ValueError(f"not a Lorentz transformation: ||det| - 1| = {abs(det - 1.0):.3e}")

    @property
    def dim(self) -> int:
        return self.lam.shape[0]

    @property
    def dual(self) -> np.ndarray:
        """Lam' = eta Lam eta (transforms covariant-index objects)."""
        eta = metric(self.dim)
        return eta @ self.lam @ eta


def boost_from_beta(beta, beta_max: float = DEFAULT_BETA_MAX) -> LorentzBoost:
    """Pure boost for velocity ratio beta (scalar for d = 2, 3-vector for d = 4).

    Raises BetaSuperluminal when |beta| > beta_max.
    """
    b = np.atleast_1d(np.asarray(beta, dtype=float))
    bmag = float(np.linalg.norm(b))
    if bmag > beta_max:
        raise BetaSuperluminal(f"|beta| = {bmag} exceeds beta_max = {beta_max}")
    dim = b.size + 1
    gamma = 1.0 / math.sqrt(1.0 - bmag**2)
    lam = np.eye(dim)
    lam[-1, -1] = gamma
    if bmag > 0.0:
        lam[:-1, :-1] += (gamma - 1.0) * np.outer(b, b) / bmag**2
        lam[:-1, -1] = -gamma * b
        lam[-1, :-1] = -gamma * b
    return LorentzBoost(lam=lam)


def apply_boost_vector(boost: LorentzBoost, x) -> np.ndarray:
    """Transform a four-vector: x* = Lam x."""
    return boost.lam @ np.asarray(x, dtype=float)


def apply_boost_tensor(boost: LorentzBoost, a, mode: str = "contra") -> np.ndarray:
    """Transform a second-order tensor.

    mode = "contra": Lam A Lam^T   (both indices contravariant, e.g. left
                     Cauchy-Green, energy-momentum);
    mode = "cov":    Lam' A Lam'^T (both indices metric-lowered, e.g. the
                     eta-conjugated rate tensors);
    mode = "mixed":  Lam A Lam'^T  (one of each, e.g. the projector).
    """
    a = np.asarray(a, dtype=float)
    lam, dual = boost.lam, boost.dual
    if mode == "contra":
        return lam @ a @ lam.T
    if mode == "cov":
        return dual @ a @ dual.T
    if mode == "mixed":
        return lam @ a @ dual.T
    raise ValueError(f"unknown mode {mode!r}, expected 'contra', 'cov' or 'mixed'")


# ---------------------------------------------------------------------------
# projector onto the space-like subspace of an observer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Projector:
    """S = I + u (eta u)^T: annihilates u, acts as identity space-like to it."""

    s: np.ndarray
    u: WorldVelocity

    def __post_init__(self):
        object.__setattr__(self, "s", _frozen(self.s))
        scale = max(1.0, float(np.linalg.norm(self.s)) ** 2)
        r_null = float(np.max(np.abs(self.s @ self.u.u)))
        r_idem = float(np.max(np.abs(self.s @ self.s - self.s)))
        if r_null > TOL_ALG * scale:
            raise ValueError(f"projector does not annihilate u: |S u| = {r_null:.3e}")
        if r_idem > TOL_ALG * scale:
            raise ValueError(f"projector not idempotent: |S S - S| = {r_idem:.3e}")

    @property
    def dim(self) -> int:
        return self.s.shape[0]


def projector(u: WorldVelocity) -> Projector:
    """Space-like projector S = I + u (eta u)^T for observer u."""
    eta = metric(u.dim)
    s = np.eye(u.dim) + np.outer(u.u, eta @ u.u)
    return Projector(s=s, u=u)


def split(f, u: WorldVelocity) -> tuple[np.ndarray, np.ndarray]:
    """Split a four-vector into time-like and space-like parts for observer u.

    Returns (f_t, f_s) with f = f_t + f_s, f_s = S f and f_t.eta.f_s = 0.
    """
    f = np.asarray(f, dtype=float)
    s = projector(u)
    f_s = s.s @ f
    return f - f_s, f_s
