"""Convergence metrics for recorded runs and paired scheme comparisons."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .engine import RunRecord, ScenarioFailed, run_scenario
from .errors import ConfigError
from .oracle import scenario_oracle

TAIL_FRACTION = 0.2


@dataclass(frozen=True)
class ConvergenceReport:
    """``t_conv`` is None when the run never settles within delta."""

    t_conv: float | None
    steady_state_error: float
    output_gap: float
    stopped_at: float | None = None
    diverged_at: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _tail(n: int) -> slice:
    start = min(n - 1, int(np.floor((1.0 - TAIL_FRACTION) * (n - 1))))
    return slice(start, n)


def convergence_report(record: RunRecord, oracle, delta: float, diverged_at=None) -> ConvergenceReport:
    """Metrics of ``record`` against ``oracle = (theta_star, y_star)``.

    t_conv is the first sample time after which the infinity-norm error stays
    within delta to the end of the record. The steady-state error and output
    gap average over the last 20% of samples.
    """
    theta_star = np.atleast_1d(np.asarray(oracle[0], float))
    y_star = float(oracle[1])
    err = np.max(np.abs(record.theta - theta_star), axis=1)
    outside = np.flatnonzero(err > delta)
    if diverged_at is not None:
        t_conv = None
    elif outside.size == 0:
        t_conv = float(record.t[0])
    elif outside[-1] == err.size - 1:
        t_conv = None
    else:
        t_conv = float(record.t[outside[-1] + 1])
    tail = _tail(err.size)
    return ConvergenceReport(
        t_conv=t_conv,
        steady_state_error=float(np.mean(err[tail])),
        output_gap=y_star - float(np.mean(record.objective[tail])),
        stopped_at=record.stopped_at,
        diverged_at=diverged_at,
    )


def run_and_report(s, oracle=None):
    """Run ``s`` and report; a divergence still yields the partial record."""
    oracle = scenario_oracle(s) if oracle is None else oracle
    try:
        rec = run_scenario(s)
        diverged = None
    except ScenarioFailed as exc:
        rec, diverged = exc.record, exc.time
    return rec, convergence_report(rec, oracle, s.delta, diverged_at=diverged)


def check_comparable(a, b):
    if a.plant != b.plant:
        raise ConfigError("scenarios use different plants", key="plant")
    if a.seed != b.seed:
        raise ConfigError("scenarios use different noise seeds", key="seed")
    if a.noise != b.noise:
        raise ConfigError("scenarios use different noise settings", key="noise")
    if a.grid != b.grid:
        raise ConfigError("scenarios use different time grids", key="grid")


@dataclass
class Comparison:
    a: ConvergenceReport
    b: ConvergenceReport
    records: tuple
    oracle: tuple

    @property
    def stop_delta(self) -> float | None:
        """a's stopping time minus b's; None unless both stopped."""
        if self.a.stopped_at is None or self.b.stopped_at is None:
            return None
        return self.a.stopped_at - self.b.stopped_at

    @property
    def error_delta(self) -> float:
        return self.a.steady_state_error - self.b.steady_state_error

    def to_dict(self, names=("a", "b")) -> dict:
        return {
            names[0]: self.a.to_dict(),
            names[1]: self.b.to_dict(),
            "stop_delta": self.stop_delta,
            "steady_state_error_delta": self.error_delta,
            "oracle": {"theta_star": [float(v) for v in self.oracle[0]], "y_star": self.oracle[1]},
        }


def compare_schemes(s_a, s_b) -> Comparison:
    """Run two scenarios on the same plant, grid and noise realization."""
    check_comparable(s_a, s_b)
    oracle = scenario_oracle(s_a)
    rec_a, rep_a = run_and_report(s_a, oracle)
    rec_b, rep_b = run_and_report(s_b, oracle)
    return Comparison(rep_a, rep_b, (rec_a, rec_b), (np.asarray(oracle[0]), oracle[1]))
