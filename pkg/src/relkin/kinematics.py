"""Deformation and rate measures along world lines.

The space-time deformation gradient F (d x (d-1)) maps reference labels to
events; its space-like part Fs = S F feeds the Cauchy-Green tensors
C = Fs^T eta Fs (boost-invariant) and B = Fs Fs^T (boost-objective).  Rates
come from the world-velocity gradient L = grad(u), and scalar/tensor fields
are differentiated along the world line through D(A) = grad(A) . u.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .minkowski import TOL_ALG, WorldVelocity, metric


class SamplerDomain(ValueError):
    """Raised when a field sampler is probed outside its domain."""


def spatial_part(F, S) -> np.ndarray:
    """Space-like part Fs = S F of the space-time deformation gradient."""
    return np.asarray(S, dtype=float) @ np.asarray(F, dtype=float)


def right_cauchy_green(Fs, eta: np.ndarray | None = None) -> np.ndarray:
    """C = Fs^T eta Fs, the boost-invariant (d-1) x (d-1) deformation tensor.

    C must be symmetric positive semi-definite; a negative eigenvalue means a
    time-like direction leaked into Fs and is reported as an error.
    """
    Fs = np.asarray(Fs, dtype=float)
    if eta is None:
        eta = metric(Fs.shape[0])
    C = Fs.T @ eta @ Fs
    scale = max(1.0, float(np.linalg.norm(C)))
    if float(np.min(np.linalg.eigvalsh(C))) < -TOL_ALG * scale:
        raise ValueError("right Cauchy-Green tensor has a negative eigenvalue; "
                         "deformation gradient is not space-like")
    return C


def left_cauchy_green(Fs) -> np.ndarray:
    """B = Fs Fs^T, the d x d observer-frame deformation tensor."""
    Fs = np.asarray(Fs, dtype=float)
    return Fs @ Fs.T


def cg_invariants(C, B, eta: np.ndarray | None = None) -> tuple[float, float]:
    """First and second invariants, computed through both C and B routes.

    I1 = C : I = B : (eta I) and I2 = (C I C) : I = (B eta B) : (eta I), where
    A : M = tr(A M^T).  The two routes are cross-checked to TOL_ALG (relative)
    and the C-route values are returned.
    """
    C = np.atleast_2d(np.asarray(C, dtype=float))
    B = np.asarray(B, dtype=float)
    if eta is None:
        eta = metric(B.shape[0])
    i1_c = float(np.trace(C))
    i2_c = float(np.trace(C @ C))
    i1_b = float(np.trace(B @ eta))
    i2_b = float(np.trace(B @ eta @ B @ eta))
    if abs(i1_c - i1_b) > TOL_ALG * max(1.0, abs(i1_c)):
        raise ValueError(f"I1 route mismatch: {i1_c} (C) vs {i1_b} (B)")
    if abs(i2_c - i2_b) > TOL_ALG * max(1.0, abs(i2_c)):
        raise ValueError(f"I2 route mismatch: {i2_c} (C) vs {i2_b} (B)")
    return i1_c, i2_c


@dataclass(frozen=True)
class RateTensors:
    """Velocity-gradient family for one event.

    L       world-velocity gradient grad(u);
    Ls      space-like part L S;
    Ls_eta  metric-lowered eta L S;
    Ds_eta  symmetric part of Ls_eta (stretching);
    Ws_eta  antisymmetric part of Ls_eta (spin).
    """

    L: np.ndarray
    Ls: np.ndarray
    Ls_eta: np.ndarray
    Ds_eta: np.ndarray
    Ws_eta: np.ndarray

    @property
    def Ds(self) -> np.ndarray:
        eta = metric(self.L.shape[0])
        return eta @ self.Ds_eta

    @property
    def Ws(self) -> np.ndarray:
        eta = metric(self.L.shape[0])
        return eta @ self.Ws_eta

    @property
    def div_u(self) -> float:
        """Divergence of the world velocity, tr(grad u)."""
        return float(np.trace(self.L))


def rate_tensors(grad_u, S, eta: np.ndarray | None = None) -> RateTensors:
    """Build the rate family from the world-velocity gradient and projector."""
    L = np.asarray(grad_u, dtype=float)
    S = np.asarray(S, dtype=float)
    if eta is None:
        eta = metric(L.shape[0])
    Ls = L @ S
    Ls_eta = eta @ Ls
    Ds_eta = 0.5 * (Ls_eta + Ls_eta.T)
    Ws_eta = 0.5 * (Ls_eta - Ls_eta.T)
    return RateTensors(L=L, Ls=Ls, Ls_eta=Ls_eta, Ds_eta=Ds_eta, Ws_eta=Ws_eta)


def jacobian(Fs, u: WorldVelocity) -> float:
    """Volume map j = det([Fs u]): columns of Fs completed by the observer u."""
    Fs = np.asarray(Fs, dtype=float)
    M = np.column_stack([Fs, u.u])
    return float(np.linalg.det(M))


def _gradient(sampler, x: np.ndarray, h: float) -> np.ndarray:
    """Gradient of a sampled field, analytic when the sampler provides it.

    A sampler is any callable of the event x; if it carries a ``partials``
    attribute, that is trusted as the analytic gradient (shape = value shape
    + (d,)).  Otherwise second-order central differences with absolute step h
    are used.  SamplerDomain raised by the sampler propagates to the caller.
    """
    partials = getattr(sampler, "partials", None)
    if partials is not None:
        return np.asarray(partials(x), dtype=float)
    cols = []
    for a in range(x.size):
        dx = np.zeros_like(x)
        dx[a] = h
        hi = np.asarray(sampler(x + dx), dtype=float)
        lo = np.asarray(sampler(x - dx), dtype=float)
        cols.append((hi - lo) / (2.0 * h))
    return np.stack(cols, axis=-1)


def invariant_derivative(sampler, u: WorldVelocity, x, h: float = 1e-6):
    """World-line derivative D(A) = grad(A) . u of a scalar/tensor field A.

    The result is observer-independent (u-contraction of the true gradient).
    """
    x = np.asarray(x, dtype=float)
    if h <= 0.0:
        raise ValueError("finite-difference step must be positive")
    grad = _gradient(sampler, x, h)
    uvec = u.u if isinstance(u, WorldVelocity) else np.asarray(u, dtype=float)
    return grad @ uvec


def particle_conservation_residual(m0_sampler, u_sampler, x, h: float = 1e-6) -> float:
    """Residual of particle conservation, D(m0) + m0 div(u) at event x.

    ``m0_sampler`` samples the rest density field, ``u_sampler`` the world
    velocity field (returning the d-vector u).  Both may carry analytic
    ``partials``.  Zero (to discretization error) iff the fields conserve
    particle number.
    """
    x = np.asarray(x, dtype=float)
    uvec = np.asarray(u_sampler(x), dtype=float)
    grad_u = _gradient(u_sampler, x, h)
    div_u = float(np.trace(grad_u))
    grad_m0 = _gradient(m0_sampler, x, h)
    d_m0 = float(grad_m0 @ uvec)
    return d_m0 + float(m0_sampler(x)) * div_u
