"""Trajectory bounds from the ``N^alpha`` comparison system.

With ``F = N^alpha(A)``, ``G_il = ||B_il||``, ``H_kj = ||C_kj||`` and
``J_kl = ||D_kl||``, the comparison state started at
``xi_i(0) = ||x_i(0)||`` and driven by ``upsilon_l = ||u_l||`` dominates
the block norms of the true state: ``||x_i(t)|| <= xi_i(t)`` and
``||y_k(t)|| <= nu_k(t)``.
"""

from dataclasses import dataclass

import numpy as np

from .comparison import comparison_system_simple
from .linalg import simulate_lti
from .partition import Partition, PartitionedSystem
from .positive import is_metzler

__all__ = [
    "BoundedTrajectoryReport",
    "block_norms",
    "comparison_trajectory_bound",
    "separable_lyapunov_values",
]


@dataclass
class BoundedTrajectoryReport:
    """Sampled block norms of a trajectory and of its comparison bound.

    ``max_violation`` is the largest ``||x_i|| - xi_i`` or ``||y_k|| - nu_k``
    over all samples; a nonpositive value means the bound held.
    """

    times: np.ndarray
    state_block_norms: np.ndarray
    comparison_states: np.ndarray
    output_norms: np.ndarray
    comparison_outputs: np.ndarray
    max_violation: float

    def holds(self, tol=1e-6):
        return bool(self.max_violation <= tol)

    def as_table(self):
        """Column names and a 2-D array with one row per sample."""
        n = self.state_block_norms.shape[1]
        p = self.output_norms.shape[1]
        names = (["t"] + [f"x{i + 1}" for i in range(n)] + [f"xi{i + 1}" for i in range(n)]
                 + [f"y{k + 1}" for k in range(p)] + [f"nu{k + 1}" for k in range(p)])
        data = np.column_stack([self.times, self.state_block_norms, self.comparison_states,
                                self.output_norms, self.comparison_outputs])
        return names, data


def block_norms(X, partition):
    """Euclidean norm of each block of each row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.column_stack([np.linalg.norm(X[:, s], axis=1) for s in partition.slices])


def _sample_inputs(inputs, times, m):
    if inputs is None:
        return np.zeros((times.size, m))
    if callable(inputs):
        return np.array([np.asarray(inputs(t), dtype=float).reshape(m) for t in times])
    U = np.asarray(inputs, dtype=float)
    if U.ndim == 1:
        U = U.reshape(-1, 1) if m == 1 else U.reshape(1, -1)
    if U.shape == (1, m):
        U = np.repeat(U, times.size, axis=0)
    if U.shape[1] != m or U.shape[0] < times.size - 1:
        raise ValueError(f"inputs must have shape ({times.size}, {m}), got {U.shape}")
    if U.shape[0] == times.size - 1:
        U = np.vstack([U, U[-1:]])
    return U[:times.size]


def comparison_trajectory_bound(sys, x0, inputs=None, horizon=1.0, step=None):
    """Simulate ``sys`` and its ``N^alpha`` comparison system on the same grid.

    Parameters
    ----------
    sys : PartitionedSystem
    x0 : array_like
        Initial state of the original system.
    inputs : None, array_like or callable
        Piecewise-constant samples of shape ``(n_steps + 1, m)`` (or a
        single row held constant), or ``u(t)`` sampled on the grid and held
        over each step.  ``None`` means ``u = 0``.
    horizon : float
    step : float, optional
        Defaults to ``horizon / 10**4``.

    Returns
    -------
    BoundedTrajectoryReport
    """
    if not isinstance(sys, PartitionedSystem):
        raise TypeError("expected a PartitionedSystem")
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.size != sys.N:
        raise ValueError(f"x0 has length {x0.size}, expected {sys.N}")
    if step is None:
        step = horizon / 1e4
    sp, ip, op = sys.state_partition, sys.input_partition, sys.output_partition
    n_steps = int(round(horizon / step))
    times = np.linspace(0.0, horizon, n_steps + 1)
    U = _sample_inputs(inputs, times, sys.B.shape[1])

    times, X = simulate_lti(sys.A, sys.B, x0, U, step=step, horizon=horizon)
    Y = X @ sys.C.T + U @ sys.D.T

    ps = comparison_system_simple(sys)
    ups = block_norms(U, ip)
    xi0 = block_norms(x0[None, :], sp)[0]
    _, XI = simulate_lti(ps.F, ps.G, xi0, ups, step=step, horizon=horizon)
    NU = XI @ ps.H.T + ups @ ps.J.T

    xn = block_norms(X, sp)
    yn = block_norms(Y, op)
    viol = max(float(np.max(xn - XI)), float(np.max(yn - NU)))
    return BoundedTrajectoryReport(times=times, state_block_norms=xn, comparison_states=XI,
                                   output_norms=yn, comparison_outputs=NU, max_violation=viol)


def separable_lyapunov_values(A, partition, d, e, x):
    """Values ``(V_m, V_s, V_d)`` of three block-separable Lyapunov functions.

    ``V_m = max_i ||x_i|| / d_i``, ``V_s = sum_i e_i ||x_i||`` and
    ``V_d = sum_i (e_i / d_i) ||x_i||^2``.  Requires ``-F d > 0`` and
    ``-F^T e > 0`` for ``F = N^alpha(A)``; raises ``ValueError`` otherwise.
    ``x`` may be a single state or an array of states (one per row).
    """
    from .comparison import ComparisonVariant, comparison_matrix

    partition = partition if isinstance(partition, Partition) else Partition(tuple(partition))
    d = np.asarray(d, dtype=float).ravel()
    e = np.asarray(e, dtype=float).ravel()
    if d.size != partition.n or e.size != partition.n:
        raise ValueError(f"d and e must have length {partition.n}")
    F = comparison_matrix(A, partition, ComparisonVariant.N_ALPHA)
    assert is_metzler(F)
    problems = []
    if np.any(d <= 0) or np.any(e <= 0):
        problems.append("d and e must be positive")
    bad = np.flatnonzero(F @ d >= 0)
    if bad.size:
        problems.append(f"F d not negative at blocks {bad.tolist()}")
    bad = np.flatnonzero(F.T @ e >= 0)
    if bad.size:
        problems.append(f"F^T e not negative at blocks {bad.tolist()}")
    if problems:
        raise ValueError("; ".join(problems))
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    z = block_norms(np.atleast_2d(x), partition)
    Vm = np.max(z / d, axis=1)
    Vs = z @ e
    Vd = (z ** 2) @ (e / d)
    if single:
        return float(Vm[0]), float(Vs[0]), float(Vd[0])
    return Vm, Vs, Vd
