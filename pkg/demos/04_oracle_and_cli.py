"""Ground truth and the command-line workflow.

The oracle grid-searches the objective directly from the plant constants.
The CLI wraps scenario files and presets and writes CSV plus JSON summaries.
"""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

from rlsesc import AbsWheelPlant, ScalarFrictionMap, VectorRationalMap, oracle_extremum
from rlsesc.errors import NonConcaveError

for plant in (ScalarFrictionMap(), VectorRationalMap(), AbsWheelPlant()):
    th, y = oracle_extremum(plant)
    print(f"{type(plant).__name__:>18}: theta* = {th.round(5)}, y* = {y:.4f}")
try:
    oracle_extremum(AbsWheelPlant(), domain=[(-1.0, 1.0)])
except NonConcaveError as exc:
    print(f"whole friction curve rejected: {exc}")

here = Path(__file__).parent
with tempfile.TemporaryDirectory() as tmp:
    cmd = [sys.executable, "-m", "rlsesc", "run", str(here / "scenarios" / "abs_dry_road.yaml"),
           "--out", tmp]
    res = subprocess.run(cmd, capture_output=True, text=True)
    print(f"\n$ rlsesc run abs_dry_road.yaml   (exit {res.returncode})")
    print(res.stdout.rstrip())
    summary = json.loads((Path(tmp) / "abs_dry_road.summary.json").read_text())
    print("oracle from the summary:", summary["oracle"])
