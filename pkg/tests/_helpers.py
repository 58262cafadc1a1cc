"""Independent oracles and random generators shared by the tests."""

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from blockcert.partition import Partition, PartitionedSystem


def grid_hinf(A, B, C, D=None, n_points=100_000):
    """Peak gain over ``omega = 0`` plus a log grid on ``[1e-4, 1e4]``, refined locally.

    Uses a diagonalisation of ``A``; fine for random matrices.
    """
    A, B, C = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (A, B, C))
    D = np.zeros((C.shape[0], B.shape[1])) if D is None else np.atleast_2d(np.asarray(D, dtype=float))
    lam, V = np.linalg.eig(A)
    CV = C @ V
    VB = np.linalg.solve(V, B)
    w = np.concatenate([[0.0], np.logspace(-4, 4, n_points)])

    def gain(x):
        G = C @ np.linalg.solve(1j * x * np.eye(A.shape[0]) - A, B) + D
        return np.linalg.svd(G, compute_uv=False)[0]

    best, best_w = 0.0, 0.0
    for chunk in np.array_split(w, 50):
        G = np.einsum("ik,wk,kj->wij", CV, 1.0 / (1j * chunk[:, None] - lam[None, :]), VB) + D
        s = np.linalg.svd(G, compute_uv=False)[:, 0]
        i = int(np.argmax(s))
        if s[i] > best:
            best, best_w = float(s[i]), float(chunk[i])
    best = max(best, gain(best_w))
    lo, hi = best_w * 0.99, best_w * 1.01 + 1e-9
    r = minimize_scalar(lambda x: -gain(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return max(best, -r.fun)


def kron_lyapunov(A, Q):
    """Solve ``A X + X A^T + Q = 0`` by vectorisation."""
    n = A.shape[0]
    K = np.kron(np.eye(n), A) + np.kron(A, np.eye(n))
    return np.linalg.solve(K, -Q.reshape(-1, order="F")).reshape(n, n, order="F")


def newton_riccati(A, R, Q, P0, iters=50):
    """Newton-Kleinman iteration for ``P A + A^T P + Q + P R P = 0`` from ``P0``."""
    P = P0
    for _ in range(iters):
        Ak = A + R @ P
        P = kron_lyapunov(Ak.T, Q - P @ R @ P)
    return P


def expm_trajectory(A, x0, times):
    return np.array([expm(A * t) @ x0 for t in times])


def random_hurwitz(rng, k, margin=(0.05, 1.0)):
    A = rng.normal(size=(k, k))
    return A - (np.linalg.eigvals(A).real.max() + rng.uniform(*margin)) * np.eye(k)


def random_partitioned_system(rng, max_states=12, blocks=(2, 4), coupling=0.3, feedthrough=0.3):
    """Random system with Hurwitz diagonal blocks and sparse, weak coupling."""
    n = int(rng.integers(blocks[0], blocks[1] + 1))
    sizes = []
    while True:
        sizes = rng.integers(1, 4, size=n)
        if sizes.sum() <= max_states:
            break
    N = int(sizes.sum())
    part = Partition(tuple(int(k) for k in sizes))
    A = coupling * rng.normal(size=(N, N)) * (rng.random((N, N)) < 0.6)
    for s in part.slices:
        A[s, s] = random_hurwitz(rng, s.stop - s.start, (0.5, 2.0))
    m = int(rng.integers(1, 3))
    p = int(rng.integers(1, 3))
    B = rng.normal(size=(N, m))
    C = rng.normal(size=(p, N))
    D = rng.normal(size=(p, m)) * (rng.random() < feedthrough)
    return PartitionedSystem(A, B, C, D, part, Partition((m,)), Partition((p,)))


def random_positive_data(rng, n_max=8):
    """Hurwitz Metzler ``F`` (diagonally dominant) and nonnegative ``G, H, J``."""
    n = int(rng.integers(1, n_max + 1))
    ni = int(rng.integers(1, 4))
    no = int(rng.integers(1, 4))
    F = np.abs(rng.normal(size=(n, n)))
    np.fill_diagonal(F, 0.0)
    F -= np.diag(F.sum(1) * rng.uniform(1.05, 2.0, n) + 0.01)
    G = np.abs(rng.normal(size=(n, ni))) * (rng.random((n, ni)) < 0.7)
    H = np.abs(rng.normal(size=(no, n))) * (rng.random((no, n)) < 0.7)
    J = np.abs(rng.normal(size=(no, ni))) * (rng.random((no, ni)) < 0.3)
    return F, G, H, J
