import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from blockcert.exceptions import NotHurwitzError
from blockcert.linalg import hinf_norm
from blockcert.positive import (PositiveSystem, diagonal_riccati_certificate, is_metzler,
                                lyapunov_diag_from_vectors, metzler_stability_certificate,
                                positive_hinf_norm, positive_riccati_lhs, solve_scaling_lp)

from _helpers import random_positive_data

F2 = np.array([[-2.0, 1.0], [1.0, -2.0]])
PS2 = PositiveSystem(F2, np.eye(2), np.eye(2), np.zeros((2, 2)))


def test_is_metzler():
    assert is_metzler([[-1, 0.5], [0.5, -1]])
    assert not is_metzler([[-1, -0.1], [0, -1]])
    assert is_metzler([[-5]])


def test_positive_system_validation():
    with pytest.raises(ValueError):
        PositiveSystem([[-1, -1], [0, -1]], np.eye(2), np.eye(2), 0)
    with pytest.raises(ValueError):
        PositiveSystem([[-1]], [[-1]], [[1]], [[0]])
    ps = PositiveSystem([[-1]], np.zeros((1, 0)), np.zeros((0, 1)), [])
    assert ps.n_inputs == 0 and ps.n_outputs == 0


def test_metzler_certificate_examples():
    d, e = metzler_stability_certificate(F2)
    assert np.allclose(d, [1, 1]) and np.allclose(e, [1, 1])
    d, _ = metzler_stability_certificate(np.diag([-1.0, -4.0]))
    assert np.allclose(d, [1, 0.25])
    with pytest.raises(NotHurwitzError) as err:
        metzler_stability_certificate([[-1, 2], [2, -1]])
    assert err.value.abscissa == pytest.approx(1)


def test_positive_norm_examples():
    assert positive_hinf_norm(PS2) == pytest.approx(1)
    assert positive_hinf_norm(PositiveSystem([[-1]], [[1]], [[1]], [[0.5]])) == pytest.approx(1.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_positive_norm_is_dc_gain(seed):
    F, G, H, J = random_positive_data(np.random.default_rng(seed))
    ps = PositiveSystem(F, G, H, J)
    g = positive_hinf_norm(ps)
    assert g == pytest.approx(hinf_norm(F, G, H, J), rel=1e-8, abs=1e-12)


def test_scaling_lp_examples():
    sv = solve_scaling_lp(PS2, 1.1)
    assert sv is not None and sv.is_valid(PS2)
    assert solve_scaling_lp(PS2, 0.9) is None


def test_scaling_lp_pure_stability():
    ps = PositiveSystem(F2, np.zeros((2, 1)), np.zeros((1, 2)), [[0.0]])
    sv = solve_scaling_lp(ps, 0.01)
    assert sv is not None
    assert np.all(sv.g == 0) and np.all(sv.f > 0)
    assert np.all(F2 @ sv.d < 0) and np.all(F2.T @ sv.e < 0)


def test_scaling_lp_rejects_nonpositive_delta():
    with pytest.raises(ValueError):
        solve_scaling_lp(PS2, 0.0)


def _scipy_feasible(ps, delta):
    """Independent feasibility check with HiGHS on the unscaled LP."""
    n, ni, no = ps.n, ps.n_inputs, ps.n_outputs
    nv = 2 * n + no + ni + 1
    rows, rhs = [], []

    def add(block):
        rows.append(block)
        rhs.extend([0.0] * block.shape[0])

    R = np.zeros((n, nv)); R[:, :n] = ps.F; R[:, 2 * n + no:-1] = ps.G; R[:, -1] = 1; add(R)
    R = np.zeros((no, nv)); R[:, :n] = ps.H; R[:, 2 * n + no:-1] = ps.J; R[:, 2 * n:2 * n + no] = -np.eye(no); add(R)
    R = np.zeros((n, nv)); R[:, n:2 * n] = ps.F.T; R[:, 2 * n:2 * n + no] = ps.H.T; R[:, -1] = 1; add(R)
    R = np.zeros((ni, nv)); R[:, n:2 * n] = ps.G.T; R[:, 2 * n:2 * n + no] = ps.J.T
    R[:, 2 * n + no:-1] = -delta ** 2 * np.eye(ni); R[:, -1] = 1; add(R)
    R = np.zeros((1, nv)); R[0, :2 * n] = 1; R[0, 2 * n + no:-1] = 1
    rows.append(R); rhs.append(1.0)
    c = np.zeros(nv); c[-1] = -1
    r = linprog(c, A_ub=np.vstack(rows), b_ub=rhs, bounds=[(0, None)] * (nv - 1) + [(None, 1)], method="highs")
    return -r.fun > 1e-12


@pytest.mark.parametrize("seed", range(40))
def test_scaling_lp_equivalence(seed):
    rng = np.random.default_rng(seed)
    ps = PositiveSystem(*random_positive_data(rng))
    g = positive_hinf_norm(ps)
    if g == 0:
        pytest.skip("zero-gain sample")
    hi, lo = g * 1.01, g * 0.99
    sv = solve_scaling_lp(ps, hi)
    assert sv is not None and sv.is_valid(ps)
    assert solve_scaling_lp(ps, lo) is None
    assert _scipy_feasible(ps, hi) and not _scipy_feasible(ps, lo)
    P = diagonal_riccati_certificate(ps, sv)
    assert np.linalg.eigvalsh(positive_riccati_lhs(ps, P, hi))[-1] < 0


def test_diagonal_riccati_examples():
    sv = solve_scaling_lp(PS2, 1.1)
    P = diagonal_riccati_certificate(PS2, sv)
    assert np.allclose(P, np.diag(np.diag(P))) and np.all(np.diag(P) > 0)
    assert np.linalg.eigvalsh(positive_riccati_lhs(PS2, P, 1.1))[-1] < 0


def test_diagonal_riccati_scalar_no_io():
    ps = PositiveSystem([[-1]], [[0.0]], [[0.0]], [[0.0]])
    sv = solve_scaling_lp(ps, 1.0)
    P = diagonal_riccati_certificate(ps, sv)
    assert P[0, 0] == pytest.approx(sv.e[0] / sv.d[0])


def test_symmetric_pure_stability_identity():
    ps = PositiveSystem(F2, np.zeros((2, 1)), np.zeros((1, 2)), [[0.0]])
    lhs = positive_riccati_lhs(ps, np.eye(2), 1.0)
    assert np.linalg.eigvalsh(lhs)[-1] < 0


def test_diagonal_riccati_rejects_small_delta():
    ps = PositiveSystem([[-1]], [[1]], [[1]], [[2.0]])
    sv = solve_scaling_lp(ps, 3.5)
    with pytest.raises(ValueError):
        diagonal_riccati_certificate(ps, type(sv)(sv.d, sv.e, sv.g, sv.f, 1.5))


def test_lyapunov_from_vectors_examples():
    Q = lyapunov_diag_from_vectors([[-1]], [[1]], [1], [2])
    assert np.allclose(Q, [[2]])
    assert -2 * 2 + 1 < 0
    e = 1.1 * -np.linalg.solve(F2.T, np.ones(2)) * 2
    Q = lyapunov_diag_from_vectors(F2, np.eye(2), [1, 1], e)
    assert np.linalg.eigvalsh(F2.T @ Q + Q @ F2 + np.eye(2))[-1] < 0
    Q = lyapunov_diag_from_vectors(F2, np.zeros((0, 2)), [1, 1], [1, 1])
    assert np.linalg.eigvalsh(F2.T @ Q + Q @ F2)[-1] < 0


def test_lyapunov_from_vectors_controllability():
    G = np.array([[1.0], [0.5]])
    d = -np.linalg.solve(F2.T, np.ones(2))
    e = 2 * -np.linalg.solve(F2, G @ G.T @ d)
    P = lyapunov_diag_from_vectors(F2, G, d, e, mode="controllability")
    assert np.linalg.eigvalsh(F2 @ P + P @ F2.T + G @ G.T)[-1] < 0


def test_lyapunov_from_vectors_reports_bad_vectors():
    with pytest.raises(ValueError, match="e below"):
        lyapunov_diag_from_vectors([[-1]], [[1]], [1], [0.4])
    with pytest.raises(ValueError, match="not negative"):
        lyapunov_diag_from_vectors([[-1, 2], [0, -1]], np.eye(2), [1, 1], [1, 1])
