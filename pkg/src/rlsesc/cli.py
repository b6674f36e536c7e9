"""Command-line front end: scenario files in, CSV and JSON summaries out.

Exit codes: 0 ok, 2 configuration error, 3 estimator divergence (the
partial CSV is still written), 4 non-concave objective in the oracle.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, NonConcaveError
from .metrics import check_comparable, run_and_report
from .oracle import oracle_extremum, scenario_oracle
from .scenario import PLANT_KINDS, PRESETS, _build_plant, apply_overrides, load_scenario, preset
from .scenario import scenario_from_dict, scenario_to_dict

OUT_ENV = "RLSESC_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_NONCONCAVE = 0, 2, 3, 4


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def resolve_scenario(ref: str, overrides=()):
    """``ref`` is a YAML file path or a preset name."""
    path = Path(ref)
    if path.is_file():
        return load_scenario(path, overrides)
    if ref in PRESETS:
        return scenario_from_dict(apply_overrides({"preset": ref}, overrides))
    raise ConfigError(f"'{ref}' is neither a scenario file nor a preset", key="scenario")


def _out_dir(arg) -> Path:
    out = Path(arg or os.environ.get(OUT_ENV) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt(v, width=12):
    if v is None:
        return f"{'-':>{width}}"
    if isinstance(v, str):
        return f"{v:>{width}}"
    return f"{v:>{width}.6g}"


def _table(rows, names):
    cols = ["t_conv", "ss_error", "output_gap", "stopped_at", "diverged_at"]
    lines = [f"{'scenario':<24}" + "".join(f"{c:>12}" for c in cols)]
    for name, rep in zip(names, rows):
        vals = [rep.t_conv, rep.steady_state_error, rep.output_gap, rep.stopped_at, rep.diverged_at]
        lines.append(f"{name[:24]:<24}" + "".join(_fmt(v) for v in vals))
    return "\n".join(lines)


def _oracle_doc(oracle):
    return {"theta_star": [float(v) for v in np.atleast_1d(oracle[0])], "y_star": float(oracle[1])}


def _execute(s, out: Path):
    """Run one scenario and write its CSV; returns (record, report, oracle)."""
    oracle = scenario_oracle(s)
    rec, rep = run_and_report(s, oracle)
    rec.write_csv(out / f"{s.name}.csv")
    return rec, rep, oracle


def _summary(s, rec, rep, oracle):
    return {
        "name": s.name,
        "report": rep.to_dict(),
        "oracle": _oracle_doc(oracle),
        "final_theta": [float(v) for v in rec.theta[-1]],
        "events": rec.events,
        "error": rec.error,
        "config": scenario_to_dict(s),
    }


def cmd_run(args) -> int:
    s = resolve_scenario(args.scenario, args.override)
    out = _out_dir(args.out)
    rec, rep, oracle = _execute(s, out)
    (out / f"{s.name}.summary.json").write_text(json.dumps(_summary(s, rec, rep, oracle), indent=2))
    print(_table([rep], [s.name]))
    if rep.diverged_at is not None:
        _err(rec.error)
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_compare(args) -> int:
    a = resolve_scenario(args.a, args.override)
    b = resolve_scenario(args.b, args.override)
    if a.name == b.name:
        a = a.replace(name=a.name + "_a")
        b = b.replace(name=b.name + "_b")
    check_comparable(a, b)
    out = _out_dir(args.out)
    with ThreadPoolExecutor(max_workers=2) as pool:
        ra, rb = pool.map(lambda s: _execute(s, out), (a, b))
    oracle = ra[2]
    stop_delta = None
    if ra[1].stopped_at is not None and rb[1].stopped_at is not None:
        stop_delta = ra[1].stopped_at - rb[1].stopped_at
    doc = {
        "a": _summary(a, *ra),
        "b": _summary(b, *rb),
        "stop_delta": stop_delta,
        "steady_state_error_delta": ra[1].steady_state_error - rb[1].steady_state_error,
        "t_conv_delta": None if None in (ra[1].t_conv, rb[1].t_conv) else ra[1].t_conv - rb[1].t_conv,
        "oracle": _oracle_doc(oracle),
    }
    (out / f"{a.name}__vs__{b.name}.comparison.json").write_text(json.dumps(doc, indent=2))
    print(_table([ra[1], rb[1]], [a.name, b.name]))
    print(f"stop_delta {_fmt(stop_delta).strip()}  steady_state_error_delta "
          f"{doc['steady_state_error_delta']:.6g}")
    if ra[1].diverged_at is not None or rb[1].diverged_at is not None:
        _err("at least one run diverged")
        return EXIT_DIVERGED
    return EXIT_OK


def _resolve_plant(ref: str):
    if ref in PRESETS:
        return preset(ref).plant, preset(ref).is_abs
    if ref in PLANT_KINDS:
        plant = PLANT_KINDS[ref]()
        return plant, False
    path = Path(ref)
    doc = yaml.safe_load(path.read_text()) if path.is_file() else yaml.safe_load(ref)
    if not isinstance(doc, dict):
        raise ConfigError(f"cannot read plant spec '{ref}'", key="plant")
    if "plant" in doc or "preset" in doc or "scheme" in doc:
        s = scenario_from_dict(doc)
        return s.plant, s.is_abs
    return _build_plant(doc), False


def cmd_oracle(args) -> int:
    plant, braking = _resolve_plant(args.plant)
    braking = braking or args.braking
    theta, y = oracle_extremum(plant, braking=braking)
    doc = {"plant": type(plant).__name__, "braking": braking, **_oracle_doc((theta, y))}
    print(f"theta_star={np.array2string(theta, precision=6)} y_star={y:.6f}")
    print(json.dumps(doc))
    return EXIT_OK


def cmd_list_presets(args) -> int:
    for name in PRESETS:
        s = preset(name)
        print(f"{name:<22}{s.scheme:<9}{type(s.plant).__name__}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rlsesc", description="Extremum seeking experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one scenario")
    r.add_argument("scenario", help="YAML scenario file or preset name")
    r.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    r.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="run two scenarios on the same plant and seed")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--out")
    c.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="applied to both scenarios")
    c.set_defaults(func=cmd_compare)

    o = sub.add_parser("oracle", help="true extremum of a plant")
    o.add_argument("--plant", required=True,
                   help="preset name, plant kind, YAML file or inline YAML mapping")
    o.add_argument("--braking", action="store_true",
                   help="friction curve: search the braking side (negative slip)")
    o.set_defaults(func=cmd_oracle)

    ls = sub.add_parser("list-presets", help="list shipped presets")
    ls.set_defaults(func=cmd_list_presets)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        key = f" [{exc.key}]" if getattr(exc, "key", None) else ""
        _err(f"{exc}{key}")
        return EXIT_CONFIG
    except NonConcaveError as exc:
        _err(str(exc))
        return EXIT_NONCONCAVE
    except (OSError, yaml.YAMLError) as exc:
        _err(str(exc))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
