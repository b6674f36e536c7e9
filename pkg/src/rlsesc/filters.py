"""Regressor generation for the linear parametric model z = h^T phi.

The washout s/(s+w) is realized as x' = -w x + y, z = y - w x so the
measured output is never differentiated. phi is the first-order lag of the
commanded parameter rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .integrate import rk4_step


@dataclass(frozen=True)
class RegressorState:
    washout_state: float
    z: float
    phi: np.ndarray
    omega_l: float

    def __post_init__(self):
        if not self.omega_l > 0:
            raise ConfigError("omega_l must be > 0", key="gains.omega_l")
        object.__setattr__(self, "phi", np.atleast_1d(np.asarray(self.phi, dtype=float)))


def regressor_init(n: int, omega_l: float, y0: float | None = None) -> RegressorState:
    """Zero filter states, or the washout at its fixed point for output ``y0``."""
    xw = 0.0 if y0 is None else y0 / omega_l
    z = 0.0 if y0 is None else y0 - omega_l * xw
    return RegressorState(xw, z, np.zeros(n), omega_l)


def washout_output(washout_state: float, y: float, omega_l: float) -> float:
    return y - omega_l * washout_state


def _check_dt(dt):
    if not dt > 0:
        raise ConfigError("dt must be > 0", key="dt")


def washout_step(state: RegressorState, y: float, dt: float) -> RegressorState:
    """Advance the washout one step with ``y`` held, returning the new z."""
    _check_dt(dt)
    if not math.isfinite(y):
        raise ValueError("non-finite output sample")
    w = state.omega_l
    xw = rk4_step(lambda t, x: -w * x + y, 0.0, state.washout_state, dt)
    return replace(state, washout_state=xw, z=washout_output(xw, y, w))


def phi_step(state: RegressorState, theta_dot, dt: float) -> RegressorState:
    """Advance phi' = -omega_l phi + theta_dot one step (theta_dot held)."""
    _check_dt(dt)
    theta_dot = np.atleast_1d(np.asarray(theta_dot, dtype=float))
    if not np.all(np.isfinite(theta_dot)):
        raise ValueError("non-finite parameter rate")
    w = state.omega_l
    phi = rk4_step(lambda t, p: -w * p + theta_dot, 0.0, state.phi, dt)
    return replace(state, phi=phi)


def direct_regressors(y_dot: float, theta_dot):
    """Unfiltered regressors for when the output derivative is measured."""
    return float(y_dot), np.atleast_1d(np.asarray(theta_dot, dtype=float)).copy()
