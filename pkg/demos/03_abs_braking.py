"""Anti-lock braking: both schemes search for the slip of peak friction.

The wheel model brakes from 120 km/h. The searched variable is the slip
reference handed to an inner slip-tracking torque loop; the measured signal
is the vehicle deceleration with noise on it.
"""
import sys
from pathlib import Path

from rlsesc import compare_schemes, preset, run_scenario

out = Path(sys.argv[1]) if len(sys.argv) > 1 else None
rls, classic = preset("abs_6_3_rls"), preset("abs_6_3_classic")
cmp = compare_schemes(rls, classic)
target = cmp.oracle[0][0]
print(f"peak friction at slip {target:.3f}")
for label, rec in zip(("rls", "classic"), cmp.records):
    last = rec.t >= rec.t[-1] - 1.0
    slip = rec.abs_signals["slip"]
    print(f"{label:>8}: stopped at {rec.stopped_at:.3f} s, slip over the last second "
          f"{slip[last].mean():.3f} (target {target:.3f})")
    if out:
        out.mkdir(parents=True, exist_ok=True)
        rec.write_csv(out / f"{rec.scenario.name}.csv")
print(f"stopping time difference (rls - classic): {cmp.stop_delta:+.3f} s")

# fixed slip references for scale; zero gain leaves the estimator unexcited,
# so its covariance ceiling is lifted
for lam in (-0.1, -0.25):
    fixed = rls.replace(**{"gains.k": [0.0], "gains.p_max": 1e30, "theta0": [lam],
                           "plant.omega0": rls.plant.v0 * (1 + lam) / rls.plant.radius})
    print(f"  slip held at {lam:+.2f}: stops at {run_scenario(fixed).stopped_at:.3f} s")
