"""Perturbation-based extremum seeking baseline.

    theta     = theta_hat + S(t)
    theta_hat' = k G_hat
    G_hat'     = omega_l M(t) (y - eta) - omega_l G_hat
    eta'       = omega_h (y - eta)

One output means one shared high-pass path, so ``eta`` and ``omega_h`` are
scalars; ``k`` and ``omega_l`` may differ per channel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import DitherSpec, demod_value, dither_value
from .errors import ConfigError
from .integrate import rk4_step


@dataclass(frozen=True)
class ClassicEsState:
    theta_hat: np.ndarray
    G_hat: np.ndarray
    eta: float
    omega_h: float
    omega_l: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        n = np.atleast_1d(self.theta_hat).size
        for name in ("theta_hat", "G_hat", "omega_l", "k"):
            val = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (n,)).copy()
            object.__setattr__(self, name, val)
        if not self.omega_h > 0 or np.any(self.omega_l <= 0):
            raise ConfigError("omega_h and omega_l must be > 0", key="gains.omega_h")


def classic_init(theta0, k, omega_h, omega_l, eta0: float = 0.0) -> ClassicEsState:
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    return ClassicEsState(theta0, np.zeros(theta0.size), float(eta0), float(omega_h), omega_l, k)


def classic_derivative(theta_hat, G_hat, eta, y, m, k, omega_h, omega_l):
    """Returns (d theta_hat, d G_hat, d eta) for demodulation signal ``m``."""
    return k * G_hat, omega_l * m * (y - eta) - omega_l * G_hat, omega_h * (y - eta)


def classic_step(state: ClassicEsState, y: float, dither: DitherSpec, t: float, dt: float) -> ClassicEsState:
    if not dt > 0:
        raise ConfigError("dt must be > 0", key="dt")
    if not math.isfinite(y):
        raise ValueError("non-finite output sample")
    k, wh, wl = state.k, state.omega_h, state.omega_l

    def f(tt, x):
        th, G, eta = x
        return classic_derivative(th, G, eta, y, demod_value(dither, tt), k, wh, wl)

    th, G, eta = rk4_step(f, t, (state.theta_hat, state.G_hat, np.float64(state.eta)), dt)
    return replace(state, theta_hat=th, G_hat=G, eta=float(eta))


def classic_output(state: ClassicEsState, dither: DitherSpec, t: float) -> np.ndarray:
    return state.theta_hat + dither_value(dither, t)
