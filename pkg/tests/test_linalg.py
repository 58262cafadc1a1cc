import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from blockcert.exceptions import NotHurwitzError
from blockcert.linalg import (eigenvalues, frequency_gain, hinf_norm, is_hurwitz, log_norm_mu2,
                              max_singular_value, riccati_residual, simulate_lti, solve_lyapunov,
                              solve_riccati, spectral_abscissa, static_gain)
from blockcert.catalog import two_block_system

from _helpers import expm_trajectory, grid_hinf, kron_lyapunov, newton_riccati, random_hurwitz

A_PAIR = np.array([[-2.0, 1.0], [4.0, -8.0]])


# eigenvalues / Hurwitz tests

def test_eigenvalues_diagonal():
    assert np.allclose(np.sort(eigenvalues([[-1, 0], [0, -2]]).eigenvalues.real), [-2, -1])


def test_eigenvalues_rotation():
    ev = eigenvalues([[0, 1], [-1, 0]]).eigenvalues
    assert np.allclose(np.sort(ev.imag), [-1, 1])
    assert np.allclose(ev.real, 0)


def test_eigenvalues_quadratic_roots():
    roots = np.sort(np.roots([1, 10, 12]).real)
    assert np.allclose(np.sort(eigenvalues(A_PAIR).eigenvalues.real), roots)
    assert np.allclose(roots, [-5 - np.sqrt(13), -5 + np.sqrt(13)])


def test_is_hurwitz():
    assert is_hurwitz([[-1]])
    assert not is_hurwitz([[0, 1], [-1, 0]])
    assert is_hurwitz(A_PAIR)
    assert not is_hurwitz(A_PAIR, margin=2.0)


def test_rejects_nonsquare_and_nonfinite():
    with pytest.raises(ValueError):
        eigenvalues(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eigenvalues([[np.nan]])


# singular values and log norm

def test_max_singular_value():
    assert max_singular_value(np.zeros((2, 3))) == 0
    assert max_singular_value(np.diag([3.0, 2.0])) == pytest.approx(3)
    assert max_singular_value(np.ones((2, 2))) == pytest.approx(2)


def test_log_norm():
    assert log_norm_mu2([[-0.7]]) == pytest.approx(-0.7)
    assert log_norm_mu2([[-3, 1], [1, -3]]) == pytest.approx(-2)
    assert log_norm_mu2([[0, 2], [0, 0]]) == pytest.approx(1)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(-5, 5)))
def test_log_norm_bounds_spectral_abscissa(X):
    assert spectral_abscissa(X) <= log_norm_mu2(X) + 1e-9


# Lyapunov and Riccati

def test_lyapunov_examples():
    assert np.allclose(solve_lyapunov([[-1]], [[2]]), [[1]])
    assert np.allclose(solve_lyapunov(np.diag([-1.0, -2.0]), np.eye(2)), np.diag([0.5, 0.25]))
    X = solve_lyapunov(A_PAIR, np.eye(2))
    assert np.allclose(X, kron_lyapunov(A_PAIR, np.eye(2)), atol=1e-12)
    assert np.allclose(X, X.T)


def test_lyapunov_requires_hurwitz():
    with pytest.raises(NotHurwitzError):
        solve_lyapunov([[1.0]], [[1.0]])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_lyapunov_matches_vectorised_oracle(n, seed):
    rng = np.random.default_rng(seed)
    A = random_hurwitz(rng, n)
    W = rng.normal(size=(n, n))
    Q = W @ W.T
    X = solve_lyapunov(A, Q)
    Xo = kron_lyapunov(A, Q)
    assert np.allclose(X, Xo, rtol=1e-7, atol=1e-9 * np.abs(Xo).max())


def test_riccati_scalar_double_root():
    # p^2 - 2p + 1 = 0 sits on the boundary of solvability
    assert solve_riccati([[-1]], [[1]], [[1]])[0, 0] == pytest.approx(1.0, abs=1e-6)


def test_riccati_degenerate_lyapunov():
    assert np.allclose(solve_riccati([[-2]], [[0]], [[4]]), [[1]])


def test_riccati_matches_newton_oracle():
    R = Q = np.eye(2)
    P = solve_riccati(A_PAIR, R, Q)
    assert np.abs(riccati_residual(P, A_PAIR, R, Q)).max() <= 1e-8
    Pn = newton_riccati(A_PAIR, R, Q, kron_lyapunov(A_PAIR.T, Q))
    assert np.abs(riccati_residual(Pn, A_PAIR, R, Q)).max() <= 1e-8
    assert np.allclose(P, Pn, atol=1e-8)
    # the stabilising solution
    assert is_hurwitz(A_PAIR + R @ P)


# frequency response and H-infinity norm

def test_hinf_first_order():
    assert hinf_norm([[-1]], [[1]], [[1]]) == pytest.approx(1, rel=1e-7)
    assert hinf_norm([[-2]], [[2]], [[3]]) == pytest.approx(3, rel=1e-7)


def test_hinf_is_certified_upper_bound():
    # the returned value is the upper end of the bisection bracket
    assert hinf_norm([[-1]], [[1]], [[1]]) >= 1.0


def test_hinf_two_block_example_against_grid():
    s = two_block_system(1, 1)
    h = hinf_norm(s.A, s.B, s.C)
    assert h == pytest.approx(grid_hinf(s.A, s.B, s.C), rel=1e-6)


def test_hinf_zero_and_static():
    assert hinf_norm([[-1]], [[0]], [[1]]) == 0
    assert hinf_norm([[-1]], [[0]], [[0]], [[2.5]]) == pytest.approx(2.5)


def test_hinf_requires_hurwitz():
    with pytest.raises(NotHurwitzError):
        hinf_norm([[0.5]], [[1]], [[1]])


def test_hinf_lightly_damped_peak():
    zeta, wn = 1e-3, 10.0
    A = np.array([[0, 1], [-wn ** 2, -2 * zeta * wn]])
    B = np.array([[0], [1.0]])
    C = np.array([[1.0, 0]])
    exact = 1 / (2 * zeta * np.sqrt(1 - zeta ** 2) * wn ** 2)
    assert hinf_norm(A, B, C) == pytest.approx(exact, rel=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_hinf_dominates_sampled_gains(n, seed):
    rng = np.random.default_rng(seed)
    A = random_hurwitz(rng, n)
    B, C = rng.normal(size=(n, 2)), rng.normal(size=(2, n))
    h = hinf_norm(A, B, C)
    for w in np.logspace(-2, 2, 40):
        assert frequency_gain(A, B, C, None, w) <= h * (1 + 1e-9)


def test_static_gain():
    assert static_gain([[-2, 1], [1, -2]], np.eye(2), np.eye(2), np.zeros((2, 2))) == pytest.approx(1)
    assert static_gain([[-1]], [[1]], [[1]], [[0]]) == pytest.approx(1)
    assert static_gain([[-1]], [[2]], [[3]], [[1]]) == pytest.approx(7)


# simulation

def test_simulate_scalar_decay():
    t, X = simulate_lti([[-1]], [[0]], [1.0], None, step=1e-3, horizon=1.0)
    assert t[-1] == pytest.approx(1.0)
    assert X[-1, 0] == pytest.approx(np.exp(-1), abs=1e-8)


def test_simulate_integrator():
    t, X = simulate_lti([[0.0]], [[1.0]], [0.0], lambda t: [1.0], step=1e-2, horizon=2.0)
    assert X[-1, 0] == pytest.approx(2.0, abs=1e-12)


def test_simulate_matches_matrix_exponential():
    s = two_block_system(1, 1)
    x0 = np.ones(5)
    step = 1e-4
    t, X = simulate_lti(s.A, s.B, x0, None, step=step, horizon=1.0)
    for tq in (0.1, 1.0):
        k = int(round(tq / step))
        assert np.allclose(X[k], expm_trajectory(s.A, x0, [tq])[0], atol=1e-6)


def test_simulate_zero_order_hold_samples():
    # constant samples equal a constant callable
    A, B = np.array([[-1.0, 0.5], [0.0, -2.0]]), np.array([[1.0], [0.5]])
    _, X1 = simulate_lti(A, B, [0, 0], np.ones((101, 1)), step=0.01, horizon=1.0)
    _, X2 = simulate_lti(A, B, [0, 0], lambda t: [1.0], step=0.01, horizon=1.0)
    assert np.allclose(X1, X2)
