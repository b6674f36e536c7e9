import numpy as np
import pytest

from rlsesc.errors import NonConcaveError
from rlsesc.oracle import oracle_extremum, scenario_oracle
from rlsesc.plants import AbsWheelPlant, ScalarFrictionMap, VectorRationalMap
from rlsesc.scenario import preset


def test_scalar_map():
    th, y = oracle_extremum(ScalarFrictionMap())
    closed = np.log(1.05 * 23 / 0.52) / 23
    assert th[0] == pytest.approx(closed, abs=1e-6)
    assert th[0] == pytest.approx(0.16688, abs=1e-3)
    assert y == pytest.approx(9.4059, abs=1e-3)


def test_vector_map():
    th, y = oracle_extremum(VectorRationalMap())
    np.testing.assert_allclose(th, [0.2, 0.3], atol=1e-6)
    assert y == pytest.approx(14.0, abs=1e-9)


def test_friction_curve():
    th, y = oracle_extremum(AbsWheelPlant())
    assert th[0] == pytest.approx(0.25, abs=1e-6) and y == pytest.approx(0.4, abs=1e-12)
    th, y = oracle_extremum(AbsWheelPlant(), braking=True)
    assert th[0] == pytest.approx(-0.25, abs=1e-6) and y == pytest.approx(0.4, abs=1e-12)


def test_other_constants():
    th, y = oracle_extremum(VectorRationalMap(peak_inputs=(0.55, 0.1), peak_outputs=(2.0, 1.0)))
    np.testing.assert_allclose(th, [0.55, 0.1], atol=1e-6)
    th, _ = oracle_extremum(AbsWheelPlant(mu_max=0.9, lambda_star=0.12))
    assert th[0] == pytest.approx(0.12, abs=1e-6)


def test_non_concave_detected():
    # the odd friction curve has a second peak at the left edge of [-1, 1]
    with pytest.raises(NonConcaveError):
        oracle_extremum(AbsWheelPlant(), domain=[(-1.0, 1.0)])


def test_scenario_targets():
    assert scenario_oracle(preset("abs_6_3_rls"))[0][0] == pytest.approx(-0.25, abs=1e-6)
    assert scenario_oracle(preset("scalar_6_1_classic"))[0][0] == pytest.approx(0.16688, abs=1e-5)
