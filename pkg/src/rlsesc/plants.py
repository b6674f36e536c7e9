"""Benchmark plants: two static maps and a single-wheel braking model."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, VehicleStopped
from .integrate import rk4_step

GRAVITY = 9.81


@dataclass(frozen=True)
class ScalarFrictionMap:
    """y = gain * (k1 (1 - exp(-k2 u)) - k3 u) with u = theta."""

    k1: float = 1.05
    k2: float = 23.0
    k3: float = 0.52
    gain: float = 10.0

    def __post_init__(self):
        if min(self.k1, self.k2, self.k3) <= 0:
            raise ConfigError("k1, k2, k3 must be > 0", key="plant.k1")

    n_params = 1

    def __call__(self, theta) -> float:
        return scalar_map_eval(self, float(np.asarray(theta).reshape(-1)[0]))

    def argmax(self) -> float:
        return math.log(self.k1 * self.k2 / self.k3) / self.k2


def scalar_map_eval(plant: ScalarFrictionMap, theta: float) -> float:
    return plant.gain * (plant.k1 * (1.0 - math.exp(-plant.k2 * theta)) - plant.k3 * theta)


@dataclass(frozen=True)
class VectorRationalMap:
    """Sum of channels peak_i * 2 u*_i u_i / (u*_i^2 + u_i^2), peak at u_i = u*_i."""

    peak_inputs: tuple = (0.2, 0.3)
    peak_outputs: tuple = (5.0, 9.0)

    def __post_init__(self):
        ui = np.asarray(self.peak_inputs, dtype=float)
        yo = np.asarray(self.peak_outputs, dtype=float)
        if ui.shape != yo.shape or ui.ndim != 1:
            raise ConfigError("peak_inputs and peak_outputs must be equal-length vectors",
                              key="plant.peak_inputs")
        if np.any(ui <= 0) or np.any(yo <= 0):
            raise ConfigError("peak inputs and outputs must be > 0", key="plant.peak_inputs")
        object.__setattr__(self, "peak_inputs", tuple(float(v) for v in ui))
        object.__setattr__(self, "peak_outputs", tuple(float(v) for v in yo))

    @property
    def n_params(self) -> int:
        return len(self.peak_inputs)

    @cached_property
    def _arrays(self):
        us = np.array(self.peak_inputs)
        return us, 2.0 * us * np.array(self.peak_outputs), us * us

    def __call__(self, theta) -> float:
        return vector_map_eval(self, theta)


def vector_map_eval(plant: VectorRationalMap, theta) -> float:
    u = np.asarray(theta, dtype=float)
    _, num, us2 = plant._arrays
    return float((num * u / (us2 + u * u)).sum())


def friction_coefficient(lam, mu_max: float, lambda_star: float):
    """mu(lambda) = 2 mu_max lambda* lambda / (lambda*^2 + lambda^2); odd, peak mu_max at lambda*."""
    return 2.0 * mu_max * lambda_star * lam / (lambda_star**2 + lam**2)


@dataclass(frozen=True)
class AbsWheelPlant:
    """Quarter-car braking model.

        m v'     = N mu(lambda)
        I omega' = -B omega - N R mu(lambda) - torque
        lambda   = (R omega - v) / v

    ``torque`` is the braking torque magnitude (>= 0). During braking
    R omega < v, so lambda < 0 and v' < 0; the friction peak sits at
    lambda = -lambda_star. ``mu_max`` and ``lambda_star`` default to a wet
    road.
    """

    mass: float = 400.0
    radius: float = 0.3
    inertia: float = 1.7
    bearing: float = 0.01
    weight: float | None = None
    mu_max: float = 0.4
    lambda_star: float = 0.25
    v_stop: float = 0.5
    tau_max: float = 3000.0
    v0: float = 33.3
    omega0: float | None = None

    def __post_init__(self):
        if self.weight is None:
            object.__setattr__(self, "weight", self.mass * GRAVITY)
        for name in ("mass", "radius", "inertia", "weight", "mu_max", "lambda_star", "v_stop"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"plant.{name} must be > 0", key=f"plant.{name}")
        if self.bearing < 0 or self.tau_max < 0:
            raise ConfigError("plant.bearing and plant.tau_max must be >= 0", key="plant.tau_max")
        if not self.v0 > self.v_stop:
            raise ConfigError("plant.v0 must exceed plant.v_stop", key="plant.v0")

    n_params = 1

    def mu(self, lam):
        return friction_coefficient(lam, self.mu_max, self.lambda_star)

    def initial_state(self) -> "AbsState":
        omega0 = self.v0 / self.radius if self.omega0 is None else self.omega0
        return AbsState(self.v0, omega0)


class AbsState(NamedTuple):
    v: float
    omega: float


class AbsStepResult(NamedTuple):
    state: AbsState
    slip: float
    v_dot: float
    clamped: bool


def wheel_slip(plant: AbsWheelPlant, v: float, omega: float) -> float:
    return (plant.radius * omega - v) / v


def abs_derivative(plant: AbsWheelPlant, v: float, omega: float, torque: float):
    """Returns (v', omega', lambda)."""
    lam = wheel_slip(plant, v, omega)
    friction = plant.weight * plant.mu(lam)
    v_dot = friction / plant.mass
    omega_dot = (-plant.bearing * omega - plant.radius * friction - torque) / plant.inertia
    return v_dot, omega_dot, lam


def abs_step(plant: AbsWheelPlant, state: AbsState, torque: float, dt: float) -> AbsStepResult:
    """One RK4 step with the torque held; negative wheel speed is clamped to zero."""
    if state.v <= plant.v_stop:
        raise VehicleStopped(f"v={state.v:.4g} <= v_stop={plant.v_stop}")
    if not dt > 0:
        raise ConfigError("dt must be > 0", key="dt")

    def f(_, x):
        dv, dw, _lam = abs_derivative(plant, x[0], x[1], torque)
        return np.array([dv, dw])

    v, omega = rk4_step(f, 0.0, np.array([state.v, state.omega]), dt)
    clamped = omega < 0
    if clamped:
        omega = 0.0
    v_dot, _, lam = abs_derivative(plant, v, omega, torque)
    return AbsStepResult(AbsState(float(v), float(omega)), lam, v_dot, bool(clamped))


def slip_tracking_torque(plant: AbsWheelPlant, lambda_ref: float, state: AbsState, gain: float) -> float:
    """Braking torque that makes lambda track ``lambda_ref``.

    Feedback linearization of lambda' = (R/v) omega' - (1 + lambda) v'/v
    imposing lambda' = gain (lambda_ref - lambda). The result is clipped to
    [0, tau_max] because brakes cannot drive the wheel.
    """
    v, omega = state
    if v <= plant.v_stop:
        raise VehicleStopped(f"v={v:.4g} <= v_stop={plant.v_stop}")
    return _slip_torque(plant, lambda_ref, v, omega, gain)


def _slip_torque(plant, lambda_ref, v, omega, gain):
    lam = (plant.radius * omega - v) / v
    friction = plant.weight * plant.mu(lam)
    v_dot = friction / plant.mass
    omega_dot = (gain * (lambda_ref - lam) + (1.0 + lam) * v_dot / v) * v / plant.radius
    torque = -plant.bearing * omega - plant.radius * friction - plant.inertia * omega_dot
    return float(min(max(torque, 0.0), plant.tau_max))
