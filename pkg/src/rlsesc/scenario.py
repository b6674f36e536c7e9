"""Scenario description, YAML (de)serialization and the shipped presets."""
from __future__ import annotations

import copy
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from .core import DitherSpec, NoiseSpec, TimeGrid, as_param_vec
from .errors import ConfigError
from .plants import GRAVITY, AbsWheelPlant, ScalarFrictionMap, VectorRationalMap
from .rls import P_MAX_DEFAULT

SCHEMES = ("rls", "classic")
FILTER_INITS = ("zero", "steady")
PLANT_KINDS = {
    "scalar_friction": ScalarFrictionMap,
    "vector_rational": VectorRationalMap,
    "abs_wheel": AbsWheelPlant,
}


@dataclass(frozen=True)
class Gains:
    """Estimator and controller gains. Unused entries are ignored by a scheme."""

    k: np.ndarray
    beta: float = 0.98
    p0: float = 1e3
    p_max: float = P_MAX_DEFAULT
    omega_l: np.ndarray | float = 1.0
    omega_h: float = 0.6
    h_hat0: np.ndarray | float = 0.0
    slip_gain: float = 50.0


@dataclass(frozen=True)
class Scenario:
    name: str
    plant: object
    scheme: str
    grid: TimeGrid
    dither: DitherSpec
    noise: NoiseSpec
    gains: Gains
    theta0: np.ndarray
    output_scale: float = 1.0
    filter_init: str = "zero"
    delta: float = 0.02

    @property
    def seed(self) -> int:
        return self.noise.seed

    @property
    def n(self) -> int:
        return self.theta0.size

    @property
    def is_abs(self) -> bool:
        return isinstance(self.plant, AbsWheelPlant)

    def replace(self, **changes) -> "Scenario":
        """Return a copy with dotted-key overrides applied (e.g. ``noise.sigma=0``)."""
        doc = scenario_to_dict(self)
        for key, value in changes.items():
            _set_dotted(doc, key.replace("__", "."), value)
        return scenario_from_dict(doc)


# --------------------------------------------------------------------------
# presets

_SCALAR_PLANT = {"kind": "scalar_friction", "k1": 1.05, "k2": 23.0, "k3": 0.52, "gain": 10.0}
_VECTOR_PLANT = {"kind": "vector_rational", "peak_inputs": [0.2, 0.3], "peak_outputs": [5.0, 9.0]}
# ES engages at a 10 % slip reference; the wheel starts at that slip.
_ABS_THETA0 = -0.1
_ABS_PLANT = {"kind": "abs_wheel", "mass": 400.0, "radius": 0.3, "inertia": 1.7, "bearing": 0.01,
              "weight": 400.0 * GRAVITY, "mu_max": 0.4, "lambda_star": 0.25, "v_stop": 0.5,
              "tau_max": 3000.0, "v0": 33.3, "omega0": 33.3 * (1 + _ABS_THETA0) / 0.3}

_NO_DITHER_1 = {"amplitudes": [0.0], "frequencies": [0.0]}

PRESETS = {
    "scalar_6_1_rls": {
        "scheme": "rls", "plant": _SCALAR_PLANT, "theta0": [0.01],
        "grid": {"t0": 0.0, "t_end": 20.0, "dt": 1e-3},
        "dither": _NO_DITHER_1,
        "noise": {"sigma": 0.05, "target": "output_y"},
        "gains": {"k": [0.01], "beta": 0.98, "p0": 1e3, "omega_l": 20.0, "h_hat0": 1.0},
        "filter_init": "steady", "delta": 0.02,
    },
    "scalar_6_1_classic": {
        "scheme": "classic", "plant": _SCALAR_PLANT, "theta0": [0.01],
        "grid": {"t0": 0.0, "t_end": 20.0, "dt": 1e-3},
        "dither": {"amplitudes": [0.01], "frequencies": [3.0], "demod_amplitudes": [1.0]},
        "noise": {"sigma": 0.05, "target": "output_y"},
        "gains": {"k": [0.08], "omega_h": 0.6, "omega_l": [0.8]},
        "filter_init": "steady", "delta": 0.02,
    },
    "vector_6_2_rls": {
        "scheme": "rls", "plant": _VECTOR_PLANT, "theta0": [0.1, 0.1],
        "grid": {"t0": 0.0, "t_end": 20.0, "dt": 1e-3},
        "dither": {"amplitudes": [0.01, 0.01], "frequencies": [7.0, 10.0]},
        "noise": {"sigma": 0.05, "target": "output_y"},
        "gains": {"k": [0.01, 0.01], "beta": 0.98, "p0": 1e4, "omega_l": 20.0, "h_hat0": 0.0},
        "filter_init": "steady", "delta": 0.05,
    },
    "vector_6_2_classic": {
        "scheme": "classic", "plant": _VECTOR_PLANT, "theta0": [0.1, 0.1],
        "grid": {"t0": 0.0, "t_end": 20.0, "dt": 1e-3},
        "dither": {"amplitudes": [0.01, 0.01], "frequencies": [1.0, 2.0],
                   "demod_amplitudes": [4.5, 11.0], "demod_frequencies": [5.0, 5.0]},
        "noise": {"sigma": 0.05, "target": "output_y"},
        "gains": {"k": [0.02, 0.01], "omega_h": 0.6, "omega_l": [0.8, 0.8]},
        "filter_init": "steady", "delta": 0.05,
    },
    "abs_6_3_rls": {
        "scheme": "rls", "plant": _ABS_PLANT, "theta0": [_ABS_THETA0],
        "grid": {"t0": 0.0, "t_end": 30.0, "dt": 1e-3},
        "dither": _NO_DITHER_1,
        "noise": {"sigma": 0.1, "target": "acceleration_vdot"},
        "gains": {"k": [-0.01], "beta": 0.95, "p0": 1e3, "omega_l": 20.0, "h_hat0": 1.0,
                  "slip_gain": 50.0},
        "filter_init": "steady", "delta": 0.025,
    },
    "abs_6_3_classic": {
        "scheme": "classic", "plant": _ABS_PLANT, "theta0": [_ABS_THETA0],
        "grid": {"t0": 0.0, "t_end": 30.0, "dt": 1e-3},
        "dither": {"amplitudes": [0.01], "frequencies": [3.0], "demod_amplitudes": [1.0]},
        "noise": {"sigma": 0.1, "target": "acceleration_vdot"},
        # the classic loop ascends the friction coefficient -v'/g
        "output_scale": -1.0 / GRAVITY,
        "gains": {"k": [6.0], "omega_h": 0.6, "omega_l": [0.8], "slip_gain": 50.0},
        "filter_init": "steady", "delta": 0.025,
    },
}

_TOP_KEYS = {"name", "preset", "scheme", "plant", "grid", "dither", "noise", "gains", "theta0",
             "seed", "output_scale", "filter_init", "delta"}
_SECTION_KEYS = {
    "grid": {f.name for f in fields(TimeGrid)},
    "dither": {f.name for f in fields(DitherSpec)},
    "noise": {"sigma", "target", "sample_period"},
    "gains": {f.name for f in fields(Gains)},
}


def preset(name: str) -> Scenario:
    return scenario_from_dict({"preset": name})


def _deep_merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            if key == "plant" and "kind" in val and val["kind"] != out[key].get("kind"):
                out[key] = copy.deepcopy(val)
            else:
                out[key] = _deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _set_dotted(doc: dict, key: str, value):
    parts = key.split(".")
    node = doc
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot override {key}", key=key)
    node[parts[-1]] = value


def _check_keys(section: str, doc: dict, allowed: set):
    if not isinstance(doc, dict):
        raise ConfigError(f"{section} must be a mapping", key=section)
    unknown = set(doc) - allowed
    if unknown:
        bad = sorted(unknown)[0]
        name = bad if section == "" else f"{section}.{bad}"
        raise ConfigError(f"unknown key '{name}'", key=name)


def _num(doc, key, section):
    try:
        return float(doc[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key} must be a number", key=f"{section}.{key}") from None


def _build_plant(doc: dict):
    doc = dict(doc)
    kind = doc.pop("kind", None)
    if kind not in PLANT_KINDS:
        raise ConfigError(f"plant.kind must be one of {sorted(PLANT_KINDS)}", key="plant.kind")
    cls = PLANT_KINDS[kind]
    _check_keys("plant", doc, {f.name for f in fields(cls)})
    kwargs = {}
    for key, val in doc.items():
        if val is None:
            kwargs[key] = None
        elif isinstance(val, (list, tuple)):
            kwargs[key] = tuple(float(v) for v in val)
        else:
            kwargs[key] = _num(doc, key, "plant")
    return cls(**kwargs)


def _plant_to_dict(plant) -> dict:
    kind = next(k for k, c in PLANT_KINDS.items() if isinstance(plant, c))
    out = {"kind": kind}
    for f in fields(plant):
        val = getattr(plant, f.name)
        out[f.name] = list(val) if isinstance(val, tuple) else val
    return out


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a validated Scenario; unknown keys raise ConfigError."""
    _check_keys("", doc, _TOP_KEYS)
    doc = copy.deepcopy(doc)
    name = doc.pop("preset", None)
    if name is not None:
        if name not in PRESETS:
            raise ConfigError(f"unknown preset '{name}'", key="preset")
        base = copy.deepcopy(PRESETS[name])
        base.setdefault("name", name)
        doc = _deep_merge(base, doc)
    for section, allowed in _SECTION_KEYS.items():
        if section in doc:
            _check_keys(section, doc[section], allowed)

    scheme = doc.get("scheme")
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}", key="scheme")
    if "plant" not in doc:
        raise ConfigError("plant is required", key="plant")
    plant = _build_plant(doc["plant"])
    theta0 = as_param_vec(doc.get("theta0", [0.0]), "theta0")
    n = theta0.size
    if n != plant.n_params:
        raise ConfigError(f"theta0 has {n} entries, plant expects {plant.n_params}", key="theta0")

    g = doc.get("grid", {})
    grid = TimeGrid(**{k: _num(g, k, "grid") for k in g})

    d = doc.get("dither", {"amplitudes": [0.0] * n, "frequencies": [0.0] * n})
    dither = DitherSpec(**{k: (None if v is None else np.asarray(v, float)) for k, v in d.items()})
    if dither.n != n:
        raise ConfigError("dither length does not match theta0", key="dither.amplitudes")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError("seed must be an integer in [0, 2**64)", key="seed")
    nz = dict(doc.get("noise", {}))
    noise = NoiseSpec(sigma=float(nz.get("sigma", 0.0)), seed=seed,
                      target=nz.get("target", "output_y"),
                      sample_period=float(nz.get("sample_period", 1e-3)))

    gd = dict(doc.get("gains", {}))
    if "k" not in gd:
        raise ConfigError("gains.k is required", key="gains.k")
    k = np.broadcast_to(np.asarray(gd.pop("k"), float), (n,)).copy()
    omega_l = gd.pop("omega_l", 1.0)
    h_hat0 = gd.pop("h_hat0", 0.0)
    try:
        omega_l = np.broadcast_to(np.asarray(omega_l, float), (n,)).copy()
        h_hat0 = np.broadcast_to(np.asarray(h_hat0, float), (n,)).copy()
    except ValueError:
        raise ConfigError("gains.omega_l / gains.h_hat0 have the wrong length", key="gains.omega_l") from None
    gains = Gains(k=k, omega_l=omega_l, h_hat0=h_hat0, **{key: _num(gd, key, "gains") for key in gd})
    if np.any(gains.omega_l <= 0):
        raise ConfigError("gains.omega_l must be > 0", key="gains.omega_l")
    if not gains.omega_h > 0:
        raise ConfigError("gains.omega_h must be > 0", key="gains.omega_h")
    if not gains.p0 > 0:
        raise ConfigError("gains.p0 must be > 0", key="gains.p0")
    if not gains.beta >= 0:
        raise ConfigError("gains.beta must be >= 0", key="gains.beta")
    if scheme == "rls" and np.any(gains.omega_l != gains.omega_l[0]):
        raise ConfigError("rls uses one regressor filter pole; omega_l entries must match",
                          key="gains.omega_l")
    if scheme == "classic" and not dither.enabled:
        raise ConfigError("classic scheme requires an enabled dither", key="dither.amplitudes")

    filter_init = doc.get("filter_init", "zero")
    if filter_init not in FILTER_INITS:
        raise ConfigError(f"filter_init must be one of {FILTER_INITS}", key="filter_init")
    is_abs = isinstance(plant, AbsWheelPlant)
    if noise.active and noise.target == ("output_y" if is_abs else "acceleration_vdot"):
        raise ConfigError(f"noise.target {noise.target} does not fit this plant", key="noise.target")
    delta = float(doc.get("delta", 0.02))
    if not delta > 0:
        raise ConfigError("delta must be > 0", key="delta")

    return Scenario(
        name=str(doc.get("name", "scenario")), plant=plant, scheme=scheme, grid=grid,
        dither=dither, noise=noise, gains=gains, theta0=theta0,
        output_scale=float(doc.get("output_scale", 1.0)), filter_init=filter_init, delta=delta,
    )


def _plain(x):
    if isinstance(x, np.ndarray):
        return [float(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def scenario_to_dict(s: Scenario) -> dict:
    """Full (preset-free) document; ``scenario_from_dict`` inverts it."""
    d = s.dither
    return {
        "name": s.name,
        "scheme": s.scheme,
        "plant": _plant_to_dict(s.plant),
        "theta0": _plain(s.theta0),
        "seed": int(s.seed),
        "output_scale": s.output_scale,
        "filter_init": s.filter_init,
        "delta": s.delta,
        "grid": {"t0": s.grid.t0, "t_end": s.grid.t_end, "dt": s.grid.dt},
        "dither": {"amplitudes": _plain(d.amplitudes), "frequencies": _plain(d.frequencies),
                   "demod_amplitudes": _plain(d.demod_amplitudes),
                   "demod_frequencies": _plain(d.demod_frequencies)},
        "noise": {"sigma": s.noise.sigma, "target": s.noise.target,
                  "sample_period": s.noise.sample_period},
        "gains": {f.name: _plain(getattr(s.gains, f.name)) for f in fields(Gains)},
    }


def apply_overrides(doc: dict, overrides) -> dict:
    """Apply ``key=value`` strings in place; values are parsed as YAML scalars."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not key=value", key=item)
        key, raw = item.split("=", 1)
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError:
            raise ConfigError(f"cannot parse override value '{raw}'", key=key.strip()) from None
        _set_dotted(doc, key.strip(), value)
    return doc


def load_scenario(path, overrides=()) -> Scenario:
    """Read a YAML scenario file and apply ``key=value`` overrides."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must hold a mapping")
    apply_overrides(doc, overrides)
    doc.setdefault("name", path.stem)
    return scenario_from_dict(doc)


def dump_scenario(s: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(s), sort_keys=False)
