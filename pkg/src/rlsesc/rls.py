"""Continuous-time recursive least squares with forgetting.

    h_hat' = P eps phi
    P'     = beta P - P phi phi^T P
    eps    = z - h_hat^T phi

All functions broadcast over leading batch dimensions: ``h_hat`` has shape
(..., N) and ``P`` has shape (..., N, N), so many independent estimators can
be advanced with a single call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DivergenceError
from .integrate import rk4_step

P_MAX_DEFAULT = 1e8


@dataclass(frozen=True)
class RlsState:
    h_hat: np.ndarray
    P: np.ndarray
    beta: float
    eps_last: np.ndarray | float = 0.0
    p_max: float = P_MAX_DEFAULT

    @property
    def n(self) -> int:
        return self.h_hat.shape[-1]


def rls_reset(n: int, p0: float, beta: float, h_hat0=None, p_max: float = P_MAX_DEFAULT) -> RlsState:
    if not p0 > 0:
        raise ConfigError(f"p0 must be > 0, got {p0}", key="gains.p0")
    if not beta >= 0:
        raise ConfigError(f"beta must be >= 0, got {beta}", key="gains.beta")
    h = np.zeros(n) if h_hat0 is None else np.broadcast_to(np.asarray(h_hat0, float), (n,)).copy()
    return RlsState(h, p0 * np.eye(n), float(beta), 0.0, float(p_max))


def rls_derivative(h_hat, P, z, phi, beta):
    """Right-hand side of the estimator ODEs; returns (dh, dP, eps)."""
    if P.ndim == 2:
        # single estimator: plain matmul avoids the einsum overhead in the loop
        eps = z - h_hat @ phi
        Pphi = P @ phi
        return Pphi * eps, beta * P - np.outer(Pphi, Pphi), eps
    eps = z - (h_hat * phi).sum(axis=-1)
    Pphi = np.einsum("...ij,...j->...i", P, phi)
    dh = Pphi * eps[..., None]
    dP = beta * P - Pphi[..., :, None] * Pphi[..., None, :]
    return dh, dP, eps


def symmetrize(P):
    return 0.5 * (P + np.swapaxes(P, -1, -2))


def check_covariance(P, p_max, t=None):
    if not np.all(np.isfinite(P)) or np.max(np.abs(P)) > p_max:
        when = "" if t is None else f" at t={t:.6g} s"
        raise DivergenceError(f"RLS covariance exceeded {p_max:g}{when}", time=t)


def rls_step(state: RlsState, z, phi, dt: float, t: float | None = None) -> RlsState:
    """One RK4 step of the estimator with (z, phi) held over the step.

    The residual is computed from the entry state. P is symmetrized after the
    step; a covariance entry above ``state.p_max`` raises DivergenceError
    carrying ``t``.

    RK4 keeps P positive definite only while ``|P| |phi|^2 dt`` stays well
    below its stability limit (about 2.8); larger products need a smaller dt.
    """
    if not dt > 0:
        raise ConfigError("dt must be > 0", key="dt")
    z = np.asarray(z, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(phi))):
        raise ValueError("non-finite regressor input")
    beta = state.beta

    def f(_, x):
        dh, dP, _eps = rls_derivative(x[0], x[1], z, phi, beta)
        return dh, dP

    eps = z - np.sum(state.h_hat * phi, axis=-1)
    h, P = rk4_step(f, 0.0, (state.h_hat, state.P), dt)
    P = symmetrize(P)
    check_covariance(P, state.p_max, t)
    return RlsState(h, P, beta, eps, state.p_max)
