"""Shared value types: time grid, dither specification and measurement noise."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError

NOISE_TARGETS = ("output_y", "acceleration_vdot", "none")


def as_param_vec(values, name="theta") -> np.ndarray:
    """Return ``values`` as a finite 1-D float array (N >= 1)."""
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size < 1:
        raise ConfigError(f"{name} must be a non-empty vector", key=name)
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} has non-finite entries", key=name)
    return arr


@dataclass(frozen=True)
class TimeGrid:
    t0: float = 0.0
    t_end: float = 20.0
    dt: float = 1e-3

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"grid.dt must be positive, got {self.dt}", key="grid.dt")
        if not self.t_end > self.t0:
            raise ConfigError("grid.t_end must exceed grid.t0", key="grid.t_end")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t0) / self.dt))

    def time(self, i: int) -> float:
        # index-based so that no rounding error accumulates over long runs
        return self.t0 + i * self.dt

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class DitherSpec:
    """Sinusoidal perturbation S(t) = a*sin(w t) and its demodulation signal M(t).

    M defaults to (2/a)*sin(w t). ``demod_amplitudes`` and ``demod_frequencies``
    override the amplitude and frequency of M independently of S, which the
    shipped baselines need (e.g. S = 0.01 sin 3t with M = sin 3t).
    """

    amplitudes: np.ndarray
    frequencies: np.ndarray
    demod_amplitudes: Optional[np.ndarray] = None
    demod_frequencies: Optional[np.ndarray] = None

    def __post_init__(self):
        a = as_param_vec(self.amplitudes, "dither.amplitudes")
        w = as_param_vec(self.frequencies, "dither.frequencies")
        if a.shape != w.shape:
            raise ConfigError("dither amplitudes and frequencies differ in length",
                              key="dither.frequencies")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "frequencies", w)
        if np.any(a != 0):
            if np.any(a <= 0):
                raise ConfigError("dither amplitudes must all be > 0 or all be 0",
                                  key="dither.amplitudes")
            if len(np.unique(w)) != len(w):
                raise ConfigError("dither frequencies must be pairwise distinct",
                                  key="dither.frequencies")
        for name in ("demod_amplitudes", "demod_frequencies"):
            val = getattr(self, name)
            if val is not None:
                val = as_param_vec(val, f"dither.{name}")
                if val.shape != a.shape:
                    raise ConfigError(f"dither.{name} has wrong length", key=f"dither.{name}")
                object.__setattr__(self, name, val)

    @classmethod
    def disabled(cls, n: int) -> "DitherSpec":
        return cls(np.zeros(n), np.zeros(n))

    @property
    def n(self) -> int:
        return self.amplitudes.size

    @property
    def enabled(self) -> bool:
        return bool(np.any(self.amplitudes != 0))


def dither_value(spec: DitherSpec, t: float) -> np.ndarray:
    return spec.amplitudes * np.sin(spec.frequencies * t)


def dither_rate(spec: DitherSpec, t: float) -> np.ndarray:
    return spec.amplitudes * spec.frequencies * np.cos(spec.frequencies * t)


def demod_value(spec: DitherSpec, t: float) -> np.ndarray:
    if spec.demod_amplitudes is not None:
        amp = spec.demod_amplitudes
    else:
        if np.any(spec.amplitudes == 0):
            raise ConfigError("demodulation undefined for zero dither amplitude",
                              key="dither.amplitudes")
        amp = 2.0 / spec.amplitudes
    w = spec.frequencies if spec.demod_frequencies is None else spec.demod_frequencies
    return amp * np.sin(w * t)


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian measurement noise on a fixed sensor clock.

    One sample is drawn per ``sample_period`` seconds and held (zero-order
    hold). Tying the stream to a sensor clock rather than to the integration
    step keeps the realization identical when dt is refined.
    """

    sigma: float = 0.0
    seed: int = 0
    target: str = "output_y"
    sample_period: float = 1e-3

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ConfigError("noise.sigma must be >= 0", key="noise.sigma")
        if self.target not in NOISE_TARGETS:
            raise ConfigError(f"noise.target must be one of {NOISE_TARGETS}", key="noise.target")
        if not self.sample_period > 0:
            raise ConfigError("noise.sample_period must be > 0", key="noise.sample_period")

    @property
    def active(self) -> bool:
        return self.sigma > 0 and self.target != "none"


class NoiseStream:
    """Deterministic noise samples for one run, indexed by sensor tick."""

    def __init__(self, spec: NoiseSpec, duration: float):
        self.spec = spec
        n = int(math.ceil(duration / spec.sample_period)) + 2
        if spec.active:
            rng = np.random.default_rng(np.uint64(spec.seed % 2**64))
            self._samples = spec.sigma * rng.standard_normal(n)
        else:
            self._samples = np.zeros(n)

    def at(self, elapsed: float) -> float:
        """Sample held at ``elapsed`` seconds after the start of the run."""
        j = int(math.floor(elapsed / self.spec.sample_period + 1e-9))
        return float(self._samples[min(j, self._samples.size - 1)])
