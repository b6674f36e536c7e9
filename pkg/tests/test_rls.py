import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import batch_least_squares, synthetic_regression
from rlsesc.errors import ConfigError, DivergenceError
from rlsesc.rls import RlsState, rls_derivative, rls_reset, rls_step

DT = 1e-3


def run(state, zs, phis, dt=DT):
    for z, phi in zip(zs, phis):
        state = rls_step(state, z, phi, dt)
    return state


def test_reset_examples():
    s = rls_reset(1, 1000.0, 0.98)
    assert s.P.shape == (1, 1) and s.P[0, 0] == 1000.0 and s.h_hat[0] == 0.0
    s = rls_reset(2, 1e4, 0.98)
    np.testing.assert_array_equal(s.P, np.diag([1e4, 1e4]))
    s = rls_reset(3, 1.0, 0.0)
    np.testing.assert_array_equal(s.P, np.eye(3))
    assert s.eps_last == 0.0
    for bad in (0.0, -1.0):
        with pytest.raises(ConfigError):
            rls_reset(1, bad, 0.9)
    with pytest.raises(ConfigError):
        rls_reset(1, 1.0, -0.1)


def test_zero_regressor_freezes_estimate():
    s = rls_reset(2, 2.0, 0.5, h_hat0=[0.3, -0.1])
    out = run(s, [1.7] * 1000, [np.zeros(2)] * 1000)
    np.testing.assert_array_equal(out.h_hat, [0.3, -0.1])
    np.testing.assert_allclose(out.P, 2.0 * np.exp(0.5) * np.eye(2), rtol=1e-12)


def test_zero_residual_keeps_estimate():
    h = np.array([0.4, -1.2])
    s = rls_reset(2, 10.0, 0.9, h_hat0=h)
    rng = np.random.default_rng(3)
    phis = rng.uniform(-1, 1, (200, 2))
    out = run(s, phis @ h, phis)
    np.testing.assert_allclose(out.h_hat, h, atol=1e-13)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_closed_form_scalar(t):
    g = 3.0
    n = int(round(t / DT))
    s = run(rls_reset(1, 1.0, 0.0), [g] * n, [np.ones(1)] * n)
    assert s.P[0, 0] == pytest.approx(1 / (1 + t), abs=1e-4)
    assert s.h_hat[0] == pytest.approx(g * t / (1 + t), abs=1e-4)


def test_residual_uses_entry_state():
    s = rls_reset(1, 1.0, 0.0, h_hat0=[0.5])
    out = rls_step(s, 2.0, [1.0], DT)
    assert out.eps_last == pytest.approx(1.5)


def test_matches_batch_least_squares():
    h_true = [1.5, -0.7]
    phis, zs = synthetic_regression(1000, DT, h_true)
    p0, h0 = 100.0, np.zeros(2)
    s = run(rls_reset(2, p0, 0.0), zs, phis)
    ref = batch_least_squares(phis, zs, DT, p0, h0)
    assert np.linalg.norm(s.h_hat - ref) / np.linalg.norm(ref) < 1e-3


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 10_000), beta=st.floats(0.0, 2.0),
       scale=st.floats(1e-5, 0.5))
def test_covariance_stays_symmetric_positive_definite(n, seed, beta, scale):
    # keep p |phi|^2 dt inside the RK4 stability region
    p0 = scale / (n * DT)
    rng = np.random.default_rng(seed)
    s = rls_reset(n, p0, beta)
    for _ in range(300):
        s = rls_step(s, rng.normal(), rng.uniform(-1, 1, n), DT)
        P = s.P
        assert np.max(np.abs(P - P.T)) <= 1e-9 * np.max(np.abs(P))
        np.linalg.cholesky(P)


def test_perfect_model_converges_under_excitation():
    beta = 0.98
    h_true = np.array([2.0, -0.5])
    n = int(round(10 / beta / DT))
    phis, zs = synthetic_regression(n, DT, h_true, noise=0.0)
    s = run(rls_reset(2, 1e3, beta), zs, phis)
    assert np.linalg.norm(s.h_hat - h_true) <= 1e-3


def test_forgetting_tracks_a_gradient_jump():
    # gradient jumps from 1 to 3 at t = 5 s; time to get back within 5%
    def reconverge(beta):
        s = rls_reset(1, 10.0, beta)
        T, n = 5.0, 15000
        for i in range(n):
            t = i * DT
            g = 1.0 if t < T else 3.0
            phi = np.array([np.cos(3 * t)])
            s = rls_step(s, g * phi[0], phi, DT)
            if t >= T and abs(s.h_hat[0] - 3.0) <= 0.15:
                return t - T
        return np.inf

    assert reconverge(0.98) < reconverge(0.0)


def test_divergence_carries_time():
    s = rls_reset(1, 1.0, 1.0, p_max=10.0)
    t = 0.0
    with pytest.raises(DivergenceError) as e:
        for i in range(5000):
            t = (i + 1) * DT
            s = rls_step(s, 0.0, [0.0], DT, t=t)
    assert e.value.time == pytest.approx(np.log(10.0), abs=2 * DT)


def test_rejects_non_finite_and_bad_dt():
    s = rls_reset(1, 1.0, 0.0)
    with pytest.raises(ValueError):
        rls_step(s, np.nan, [1.0], DT)
    with pytest.raises(ConfigError):
        rls_step(s, 1.0, [1.0], 0.0)


def test_batched_derivative_matches_loop():
    rng = np.random.default_rng(1)
    B, n = 5, 3
    h = rng.normal(size=(B, n))
    A = rng.normal(size=(B, n, n))
    P = A @ np.swapaxes(A, 1, 2) + np.eye(n)
    z = rng.normal(size=B)
    phi = rng.normal(size=(B, n))
    dh, dP, eps = rls_derivative(h, P, z, phi, 0.7)
    for b in range(B):
        e = z[b] - h[b] @ phi[b]
        np.testing.assert_allclose(eps[b], e)
        np.testing.assert_allclose(dh[b], P[b] @ phi[b] * e)
        np.testing.assert_allclose(dP[b], 0.7 * P[b] - P[b] @ np.outer(phi[b], phi[b]) @ P[b])


def test_state_dimension():
    assert RlsState(np.zeros(3), np.eye(3), 0.5).n == 3
