"""Closed-loop simulation of the RLS and classic extremum seeking schemes.

Plant, regressor filters, estimator and control law form one augmented
state advanced by a single fixed-step RK4 integrator. Measurement noise is
held constant across each step.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classic import classic_derivative
from .core import NoiseStream, demod_value, dither_rate, dither_value
from .errors import DivergenceError
from .plants import AbsState, AbsWheelPlant, abs_derivative, wheel_slip
from .plants import _slip_torque
from .rls import check_covariance, rls_derivative, symmetrize
from .scenario import Scenario


@dataclass
class RunRecord:
    """Sampled trajectory of one run; row i is time ``t[i]``."""

    scenario: Scenario
    t: np.ndarray
    theta: np.ndarray
    theta_hat: np.ndarray
    y_clean: np.ndarray
    y_noisy: np.ndarray
    z: np.ndarray
    phi: np.ndarray
    grad: np.ndarray
    P_trace: np.ndarray
    objective: np.ndarray
    abs_signals: dict | None = None
    events: list = field(default_factory=list)
    stopped_at: float | None = None
    error: str | None = None

    @property
    def n_samples(self) -> int:
        return self.t.size

    def csv_header(self) -> list[str]:
        n = self.theta.shape[1]
        cols = ["t"]
        cols += [f"theta_{i + 1}" for i in range(n)]
        cols += [f"theta_hat_{i + 1}" for i in range(n)]
        cols += ["y_clean", "y_noisy", "z"]
        cols += [f"phi_{i + 1}" for i in range(n)]
        cols += [f"hhat_{i + 1}" for i in range(n)]
        cols += ["P_trace"]
        if self.abs_signals is not None:
            cols += list(self.abs_signals)
        return cols

    def rows(self):
        extra = list(self.abs_signals.values()) if self.abs_signals is not None else []
        for i in range(self.n_samples):
            row = [self.t[i], *self.theta[i], *self.theta_hat[i], self.y_clean[i],
                   self.y_noisy[i], self.z[i], *self.phi[i], *self.grad[i], self.P_trace[i]]
            row += [col[i] for col in extra]
            yield [repr(float(v)) for v in row]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            self._write(fh)

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self._write(buf)
        return buf.getvalue()

    def _write(self, fh):
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(self.csv_header())
        w.writerows(self.rows())


class ScenarioFailed(DivergenceError):
    """Run aborted; ``record`` holds the samples up to the failure."""

    def __init__(self, cause: DivergenceError, record: RunRecord):
        super().__init__(str(cause), time=cause.time)
        self.record = record


def _static_output(plant, theta):
    return plant(theta)


def run_scenario(s: Scenario) -> RunRecord:
    """Simulate ``s`` over its grid. Deterministic given the scenario (incl. seed).

    Raises ScenarioFailed (carrying the partial record) on estimator
    divergence or a non-finite state. An ABS run ends early, without error,
    once the vehicle reaches the stop speed.
    """
    grid, n, g = s.grid, s.n, s.gains
    dither = s.dither
    has_dither = dither.enabled
    plant = s.plant
    is_abs = isinstance(plant, AbsWheelPlant)
    rls = s.scheme == "rls"
    k = g.k
    scale = s.output_scale
    noise = NoiseStream(s.noise, grid.t_end - grid.t0)
    wl_rls = float(g.omega_l[0])
    beta = g.beta

    n_plant = 2 if is_abs else 0
    # augmented state layout
    if rls:
        sizes = {"theta_hat": n, "xw": 1, "phi": n, "h": n, "P": n * n}
    else:
        sizes = {"theta_hat": n, "G": n, "eta": 1}
    off = {}
    pos = n_plant
    for key, size in sizes.items():
        off[key] = slice(pos, pos + size)
        pos += size
    dim = pos

    sl_th = off["theta_hat"]
    sl_grad = off["h"] if rls else off["G"]
    if rls:
        i_xw, sl_phi, sl_P = off["xw"].start, off["phi"], off["P"]
    else:
        i_eta = off["eta"].start

    def measure(t, x):
        """Returns (theta, y_clean, plant derivative, slip, torque)."""
        th_hat = x[sl_th]
        theta = th_hat + dither_value(dither, t) if has_dither else th_hat.copy()
        if is_abs:
            v, om = x[0], x[1]
            torque = _slip_torque(plant, theta[0], v, om, g.slip_gain)
            dv, dw, lam = abs_derivative(plant, v, om, torque)
            return theta, dv, (dv, dw), lam, torque
        return theta, plant(theta), None, None, None

    def deriv(t, x, nz):
        theta, y, dplant, _, _ = measure(t, x)
        y_est = scale * (y + nz)
        dx = np.empty(dim)
        if is_abs:
            dx[0], dx[1] = dplant
        grad = x[sl_grad]
        th_rate = k * grad
        dx[sl_th] = th_rate
        if rls:
            xw = x[i_xw]
            phi = x[sl_phi]
            z = y_est - wl_rls * xw
            cmd_rate = th_rate + dither_rate(dither, t) if has_dither else th_rate
            dh, dP, _ = rls_derivative(grad, x[sl_P].reshape(n, n), z, phi, beta)
            dx[i_xw] = -wl_rls * xw + y_est
            dx[sl_phi] = -wl_rls * phi + cmd_rate
            dx[sl_grad] = dh
            dx[sl_P] = dP.ravel()
        else:
            eta = x[i_eta]
            _, dG, deta = classic_derivative(x[sl_th], grad, eta, y_est,
                                             demod_value(dither, t), k, g.omega_h, g.omega_l)
            dx[sl_grad] = dG
            dx[i_eta] = deta
        return dx

    # initial state
    x = np.zeros(dim)
    if is_abs:
        st0 = plant.initial_state()
        x[0], x[1] = st0.v, st0.omega
    x[off["theta_hat"]] = s.theta0
    _, y0, _, _, _ = measure(grid.t0, x)
    y0_est = scale * y0
    steady = s.filter_init == "steady"
    if rls:
        x[off["xw"]] = y0_est / wl_rls if steady else 0.0
        x[off["h"]] = g.h_hat0
        x[off["P"]] = (g.p0 * np.eye(n)).ravel()
    else:
        x[off["eta"]] = y0_est if steady else 0.0

    n_steps = grid.n_steps
    rows = n_steps + 1
    T = np.empty(rows)
    TH = np.empty((rows, n))
    THH = np.empty((rows, n))
    YC = np.empty(rows)
    YN = np.empty(rows)
    Z = np.full(rows, np.nan)
    PHI = np.full((rows, n), np.nan)
    GR = np.empty((rows, n))
    PT = np.full(rows, np.nan)
    OBJ = np.empty(rows)
    if is_abs:
        abs_cols = {name: np.empty(rows) for name in ("v", "omega", "slip", "torque")}
    events = []

    def record(i, t, x):
        nz = noise.at(t - grid.t0)
        theta, y, _, lam, torque = measure(t, x)
        T[i] = t
        TH[i] = theta
        THH[i] = x[off["theta_hat"]]
        YC[i] = y
        YN[i] = y + nz
        if rls:
            Z[i] = scale * (y + nz) - wl_rls * x[off["xw"]][0]
            PHI[i] = x[off["phi"]]
            GR[i] = x[off["h"]]
            PT[i] = np.trace(x[off["P"]].reshape(n, n))
        else:
            GR[i] = x[off["G"]]
        if is_abs:
            OBJ[i] = -y * plant.mass / plant.weight
            abs_cols["v"][i] = x[0]
            abs_cols["omega"][i] = x[1]
            abs_cols["slip"][i] = lam
            abs_cols["torque"][i] = torque
        else:
            OBJ[i] = y

    def finish(last):
        sl = slice(0, last + 1)
        return RunRecord(
            scenario=s, t=T[sl].copy(), theta=TH[sl].copy(), theta_hat=THH[sl].copy(),
            y_clean=YC[sl].copy(), y_noisy=YN[sl].copy(), z=Z[sl].copy(), phi=PHI[sl].copy(),
            grad=GR[sl].copy(), P_trace=PT[sl].copy(), objective=OBJ[sl].copy(),
            abs_signals={kk: vv[sl].copy() for kk, vv in abs_cols.items()} if is_abs else None,
            events=events, stopped_at=stopped_at,
        )

    stopped_at = None
    record(0, grid.t0, x)
    dt = grid.dt
    clamp_reported = False
    for i in range(n_steps):
        t = grid.time(i)
        nz = noise.at(t - grid.t0)
        k1 = deriv(t, x, nz)
        k2 = deriv(t + dt / 2, x + dt / 2 * k1, nz)
        k3 = deriv(t + dt / 2, x + dt / 2 * k2, nz)
        k4 = deriv(t + dt, x + dt * k3, nz)
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t_next = grid.time(i + 1)
        try:
            if rls:
                P = symmetrize(x[off["P"]].reshape(n, n))
                x[off["P"]] = P.ravel()
                check_covariance(P, g.p_max, t_next)
            if not np.all(np.isfinite(x)):
                raise DivergenceError(f"non-finite state at t={t_next:.6g} s", time=t_next)
        except DivergenceError as exc:
            rec = finish(i)
            rec.error = str(exc)
            events.append({"event": "divergence", "t": t_next, "message": str(exc)})
            raise ScenarioFailed(exc, rec) from None
        if is_abs:
            if x[1] < 0:
                x[1] = 0.0
                if not clamp_reported:
                    events.append({"event": "wheel_speed_clamped", "t": t_next})
                    clamp_reported = True
            if x[0] <= plant.v_stop:
                stopped_at = t_next
                events.append({"event": "vehicle_stopped", "t": t_next})
                record(i + 1, t_next, x)
                return finish(i + 1)
        record(i + 1, t_next, x)
    return finish(n_steps)
