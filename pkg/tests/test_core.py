import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlsesc.core import DitherSpec, NoiseSpec, NoiseStream, TimeGrid, as_param_vec
from rlsesc.core import demod_value, dither_rate, dither_value
from rlsesc.errors import ConfigError


def test_time_grid_steps_and_final_time():
    g = TimeGrid(0.0, 20.0, 1e-3)
    assert g.n_steps == 20000
    assert abs(g.time(g.n_steps) - 20.0) <= g.dt / 2
    t = g.times()
    assert t.size == 20001 and t[0] == 0.0


@pytest.mark.parametrize("kw,key", [({"dt": -1e-3}, "grid.dt"), ({"dt": 0.0}, "grid.dt"),
                                    ({"t0": 1.0, "t_end": 1.0}, "grid.t_end")])
def test_time_grid_rejects(kw, key):
    with pytest.raises(ConfigError) as e:
        TimeGrid(**kw)
    assert e.value.key == key


def test_param_vec():
    assert as_param_vec(0.1).shape == (1,)
    with pytest.raises(ConfigError):
        as_param_vec([np.nan])
    with pytest.raises(ConfigError):
        as_param_vec([])


def test_dither_value_examples():
    d = DitherSpec([0.01], [3.0])
    assert dither_value(d, 0.0)[0] == 0.0
    assert dither_value(d, math.pi / 6)[0] == pytest.approx(0.01, abs=1e-15)
    d2 = DitherSpec([0.01, 0.01], [7.0, 10.0])
    np.testing.assert_allclose(dither_value(d2, 0.1), [0.01 * math.sin(0.7), 0.01 * math.sin(1.0)])


def test_dither_rate_examples():
    assert dither_rate(DitherSpec([0.01], [3.0]), 0.0)[0] == pytest.approx(0.03)
    np.testing.assert_allclose(dither_rate(DitherSpec([0.01, 0.01], [7.0, 10.0]), 0.0), [0.07, 0.10])
    off = DitherSpec.disabled(2)
    assert not off.enabled
    np.testing.assert_array_equal(dither_rate(off, 1.3), [0.0, 0.0])
    np.testing.assert_array_equal(dither_value(off, 1.3), [0.0, 0.0])


def test_demod_examples():
    d = DitherSpec([0.01], [3.0])
    assert demod_value(d, math.pi / 6)[0] == pytest.approx(200.0)
    assert demod_value(d, 0.0)[0] == 0.0
    # a = 2 gives unit demodulation amplitude, same as the explicit override
    t = 0.37
    assert demod_value(DitherSpec([2.0], [3.0]), t)[0] == pytest.approx(math.sin(3 * t))
    over = DitherSpec([0.01], [3.0], demod_amplitudes=[1.0])
    assert demod_value(over, t)[0] == pytest.approx(math.sin(3 * t))
    with pytest.raises(ConfigError):
        demod_value(DitherSpec.disabled(1), t)


def test_dither_spec_validation():
    with pytest.raises(ConfigError):
        DitherSpec([0.01, 0.0], [1.0, 2.0])
    with pytest.raises(ConfigError):
        DitherSpec([0.01, 0.01], [5.0, 5.0])
    with pytest.raises(ConfigError):
        DitherSpec([0.01], [1.0, 2.0])


amps = st.floats(1e-3, 1.0)
freqs = st.floats(0.1, 20.0)


@settings(max_examples=200, deadline=None)
@given(a=amps, w=freqs, t=st.floats(-50.0, 50.0))
def test_rate_is_derivative_of_dither(a, w, t):
    d = DitherSpec([a], [w])
    h = 1e-6
    fd = (dither_value(d, t + h) - dither_value(d, t - h)) / (2 * h)
    assert abs(fd[0] - dither_rate(d, t)[0]) <= 1e-6


@settings(max_examples=200, deadline=None)
@given(a=st.lists(amps, min_size=1, max_size=3), t=st.floats(-100.0, 100.0))
def test_demod_times_dither_bounded(a, t):
    w = np.arange(1, len(a) + 1, dtype=float)
    d = DitherSpec(a, w)
    prod = demod_value(d, t) * dither_value(d, t)
    np.testing.assert_allclose(prod, 2 * np.sin(w * t) ** 2, atol=1e-12)
    assert np.all(prod >= -1e-12) and np.all(prod <= 2 + 1e-12)


def test_noise_reproducible_and_seeded():
    spec = NoiseSpec(sigma=0.05, seed=123)
    a = NoiseStream(spec, 1.0)
    b = NoiseStream(spec, 1.0)
    ta = [a.at(k * 1e-3) for k in range(1000)]
    tb = [b.at(k * 1e-3) for k in range(1000)]
    assert ta == tb
    c = NoiseStream(NoiseSpec(sigma=0.05, seed=124), 1.0)
    assert ta != [c.at(k * 1e-3) for k in range(1000)]
    assert np.std(ta) == pytest.approx(0.05, rel=0.1)


def test_noise_held_between_sensor_ticks():
    s = NoiseStream(NoiseSpec(sigma=1.0, seed=7), 1.0)
    # any time within one tick returns the same sample
    assert s.at(0.0101) == s.at(0.0105) == s.at(0.0109)
    assert s.at(0.010) != s.at(0.011)


def test_noise_inactive():
    s = NoiseStream(NoiseSpec(sigma=0.0, seed=1), 1.0)
    assert s.at(0.5) == 0.0
    s = NoiseStream(NoiseSpec(sigma=1.0, seed=1, target="none"), 1.0)
    assert s.at(0.5) == 0.0
    with pytest.raises(ConfigError):
        NoiseSpec(sigma=-1.0)
