"""Ground-truth extrema by brute-force grid search plus golden-section polish.

The objective formulas are written out here from the plant parameters rather
than calling into the simulation code, so a bug in either place shows up as
a disagreement.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError, NonConcaveError
from .plants import AbsWheelPlant, ScalarFrictionMap, VectorRationalMap

FINE_STEP = 1e-4


def _objective(plant, braking: bool):
    """Vectorized objective over the last axis plus a default search box."""
    if isinstance(plant, ScalarFrictionMap):
        k1, k2, k3, c = plant.k1, plant.k2, plant.k3, plant.gain

        def f(u):
            u = u[..., 0]
            return c * (k1 * (1.0 - np.exp(-k2 * u)) - k3 * u)

        return f, [(0.0, 1.0)]
    if isinstance(plant, VectorRationalMap):
        us = np.array(plant.peak_inputs)
        ys = np.array(plant.peak_outputs)

        def f(u):
            return np.sum(ys * 2 * us * u / (us**2 + u**2), axis=-1)

        return f, [(0.0, max(1.0, 4 * a)) for a in us]
    if isinstance(plant, AbsWheelPlant):
        ls, mm = plant.lambda_star, plant.mu_max
        sign = -1.0 if braking else 1.0

        # braking: maximize the decelerating friction -mu(lambda) for lambda < 0
        def f(u):
            lam = u[..., 0]
            return sign * 2 * mm * ls * lam / (ls**2 + lam**2)

        return f, [(-1.0, 0.0)] if braking else [(0.0, 1.0)]
    raise ConfigError(f"no oracle for plant type {type(plant).__name__}", key="plant.kind")


def _axis_grid(lo, hi, step):
    n = int(math.ceil((hi - lo) / step - 1e-9))
    return np.linspace(lo, hi, n + 1)


def _local_maxima(values: np.ndarray, rel_tol: float) -> list[tuple]:
    """Indices of discrete local maxima; ties within rel_tol count as one plateau."""
    peak = values.max()
    tol = rel_tol * max(1.0, abs(peak))
    padded = np.pad(values, 1, constant_values=-np.inf)
    core = tuple(slice(1, -1) for _ in range(values.ndim))
    is_max = np.ones(values.shape, bool)
    for shift in itertools.product((-1, 0, 1), repeat=values.ndim):
        if not any(shift):
            continue
        nb = tuple(slice(1 + s, values.shape[d] + 1 + s) for d, s in enumerate(shift))
        is_max &= padded[core] >= padded[nb] - tol
    return [tuple(i) for i in np.argwhere(is_max)]


def _clusters(points: list[tuple]) -> int:
    """Number of connected groups among grid indices (8-connectivity)."""
    left = set(points)
    count = 0
    while left:
        count += 1
        stack = [left.pop()]
        while stack:
            p = stack.pop()
            for shift in itertools.product((-1, 0, 1), repeat=len(p)):
                q = tuple(a + b for a, b in zip(p, shift))
                if q in left:
                    left.remove(q)
                    stack.append(q)
    return count


def oracle_extremum(plant, domain=None, braking: bool = False, rel_tol: float = 1e-12):
    """Return (theta_star, y_star) for a static map or the friction curve.

    ``domain`` is a list of (lo, hi) per axis. For an AbsWheelPlant the
    default searches the friction curve on lambda in [0, 1]; ``braking=True``
    searches lambda in [-1, 0] for the strongest deceleration instead.

    Raises NonConcaveError when the grid shows more than one separated
    local maximum.
    """
    f, box = _objective(plant, braking)
    if domain is not None:
        box = [tuple(map(float, b)) for b in domain]
    n = len(box)
    if n > 3:
        raise ConfigError("oracle supports at most 3 parameters", key="theta0")

    # coarse pass over the whole box, then a 1e-4 grid around the best point
    coarse_step = FINE_STEP if n == 1 else 1e-2 if n == 2 else 2e-2
    axes = [_axis_grid(lo, hi, coarse_step) for lo, hi in box]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = f(mesh)
    if not np.all(np.isfinite(vals)):
        raise NonConcaveError("objective is not finite on the search box")
    maxima = _local_maxima(vals, rel_tol)
    if _clusters(maxima) > 1:
        where = [tuple(float(axes[d][i[d]]) for d in range(n)) for i in maxima]
        raise NonConcaveError(f"multiple local maxima on the grid: {where[:5]}")
    best = np.array([axes[d][maxima[0][d]] for d in range(n)]) if len(maxima) == 1 else \
        np.array([axes[d][i] for d, i in enumerate(np.unravel_index(np.argmax(vals), vals.shape))])

    if n > 1:
        half = 2 * coarse_step
        fine_axes = [_axis_grid(max(lo, c - half), min(hi, c + half), FINE_STEP)
                     for (lo, hi), c in zip(box, best)]
        fmesh = np.stack(np.meshgrid(*fine_axes, indexing="ij"), axis=-1)
        fvals = f(fmesh)
        idx = np.unravel_index(np.argmax(fvals), fvals.shape)
        best = np.array([fine_axes[d][i] for d, i in enumerate(idx)])

    # golden-section polish, one axis at a time
    x = best.astype(float)
    for _ in range(3 if n > 1 else 1):
        for d in range(n):
            lo = max(box[d][0], x[d] - FINE_STEP)
            hi = min(box[d][1], x[d] + FINE_STEP)

            def neg(u, d=d):
                p = x.copy()
                p[d] = u
                return -float(f(p))

            mid = x[d]
            if lo < mid < hi and neg(mid) <= min(neg(lo), neg(hi)):
                res = minimize_scalar(neg, bracket=(lo, mid, hi), method="golden",
                                      options={"xtol": 1e-12})
                if -res.fun >= -neg(mid):
                    x[d] = res.x
    return x, float(f(x))


def scenario_oracle(scenario):
    """Target (theta_star, y_star) for a scenario's plant.

    For the braking plant the tuned variable is the slip reference, so the
    braking-side peak is used and y_star is the friction coefficient there.
    """
    return oracle_extremum(scenario.plant, braking=isinstance(scenario.plant, AbsWheelPlant))
