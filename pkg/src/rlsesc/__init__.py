"""Extremum seeking with a recursive-least-squares gradient estimator.

Also ships the classic perturbation-based scheme as a baseline, three
benchmark plants and a deterministic closed-loop simulator.
"""
from .classic import ClassicEsState, classic_init, classic_output, classic_step
from .core import DitherSpec, NoiseSpec, TimeGrid, demod_value, dither_rate, dither_value
from .engine import RunRecord, ScenarioFailed, run_scenario
from .errors import ConfigError, DivergenceError, NonConcaveError, VehicleStopped
from .filters import RegressorState, direct_regressors, phi_step, regressor_init, washout_step
from .metrics import ConvergenceReport, compare_schemes, convergence_report, run_and_report
from .oracle import oracle_extremum, scenario_oracle
from .plants import AbsWheelPlant, ScalarFrictionMap, VectorRationalMap, friction_coefficient
from .rls import RlsState, rls_reset, rls_step
from .scenario import PRESETS, Scenario, load_scenario, preset

__version__ = "0.1.0"
