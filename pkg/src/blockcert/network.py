"""Comparison systems and certificates for interconnected subsystems.

Subsystem ``i`` is ``x_i' = A_i x_i + B_i w_i``, ``z_i = C_i x_i`` with
Hurwitz ``A_i``.  Subsystems are coupled by static matrices

    w = M z + K u,    y = N z,

with zero diagonal blocks ``M_ii`` (no direct self loops).  The closed
loop is a partitioned system with ``A_ii = A_i``, ``A_ij = B_i M_ij C_j``,
``B_il = B_i K_il``, ``C_kj = N_kj C_j`` and ``D = 0``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._parallel import parallel_map
from .certify import assemble_blockdiag, verify_lyapunov_lmi, verify_riccati_lmi
from .comparison import is_zero_block
from .exceptions import CertificateError, ComparisonUnstableError, DeltaTooSmallError, NotHurwitzError
from .linalg import HURWITZ_GUARD, as_matrix, hinf_norm, max_singular_value, solve_riccati, spectral_abscissa
from .partition import Partition, PartitionedSystem
from .positive import PositiveSystem, positive_hinf_norm, solve_scaling_lp, strict_tolerance

__all__ = [
    "NetworkModel",
    "NetworkCertificate",
    "assemble",
    "network_comparison_system",
    "network_comparison_decoupled",
    "network_hinf_certificate",
    "local_dissipativity_check",
    "network_mixed_gain",
]


@dataclass(frozen=True)
class NetworkModel:
    """Subsystems ``(A_i, B_i, C_i)`` and interconnection matrices ``M``, ``K``, ``N``.

    ``M`` maps stacked subsystem outputs ``z`` to stacked subsystem inputs
    ``w``; ``K`` maps external inputs and ``N`` produces external outputs.
    ``input_partition`` and ``output_partition`` split the external signals
    into blocks (one block each by default).
    """

    subsystems: tuple
    M: np.ndarray
    K: np.ndarray
    N: np.ndarray
    input_partition: Partition = None
    output_partition: Partition = None

    def __post_init__(self):
        subs = []
        for i, sub in enumerate(self.subsystems):
            if len(sub) == 4:
                if np.any(np.asarray(sub[3], dtype=float)):
                    raise ValueError(f"subsystem {i + 1} has direct feedthrough, which is not supported")
                sub = sub[:3]
            if len(sub) != 3:
                raise ValueError(f"subsystem {i + 1} must be a triple (A, B, C)")
            A, B, C = (as_matrix(X, name) for X, name in zip(sub, "ABC"))
            if A.shape[0] != A.shape[1] or B.shape[0] != A.shape[0] or C.shape[1] != A.shape[0]:
                raise ValueError(f"subsystem {i + 1} has inconsistent shapes A{A.shape} B{B.shape} C{C.shape}")
            alpha = spectral_abscissa(A)
            if not alpha < -HURWITZ_GUARD:
                raise NotHurwitzError(f"subsystem {i + 1} is not Hurwitz (spectral abscissa {alpha:.6g})",
                                      abscissa=alpha, block=i)
            subs.append((A, B, C))
        if not subs:
            raise ValueError("a network needs at least one subsystem")
        object.__setattr__(self, "subsystems", tuple(subs))
        m_tot = sum(B.shape[1] for _, B, _ in subs)
        p_tot = sum(C.shape[0] for _, _, C in subs)
        M = as_matrix(self.M, "M") if np.size(self.M) else np.zeros((m_tot, p_tot))
        K = as_matrix(self.K, "K")
        N = as_matrix(self.N, "N")
        if M.shape != (m_tot, p_tot):
            raise ValueError(f"M has shape {M.shape}, expected {(m_tot, p_tot)}")
        if K.shape[0] != m_tot:
            raise ValueError(f"K has {K.shape[0]} rows, expected {m_tot}")
        if N.shape[1] != p_tot:
            raise ValueError(f"N has {N.shape[1]} columns, expected {p_tot}")
        ip = self.input_partition
        op = self.output_partition
        ip = Partition((K.shape[1],)) if ip is None else (ip if isinstance(ip, Partition) else Partition(tuple(ip)))
        op = Partition((N.shape[0],)) if op is None else (op if isinstance(op, Partition) else Partition(tuple(op)))
        if ip.total != K.shape[1] or op.total != N.shape[0]:
            raise ValueError("external input/output partitions do not match K and N")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "input_partition", ip)
        object.__setattr__(self, "output_partition", op)
        ws, zs = self.w_partition, self.z_partition
        for i, (si, zi) in enumerate(zip(ws.slices, zs.slices)):
            if np.any(M[si, zi]):
                raise ValueError(f"diagonal block M_{i + 1}{i + 1} must be zero")

    @property
    def n(self):
        return len(self.subsystems)

    @property
    def state_partition(self):
        return Partition(tuple(A.shape[0] for A, _, _ in self.subsystems))

    @property
    def w_partition(self):
        return Partition(tuple(B.shape[1] for _, B, _ in self.subsystems))

    @property
    def z_partition(self):
        return Partition(tuple(C.shape[0] for _, _, C in self.subsystems))

    def M_block(self, i, j):
        return self.M[self.w_partition.slice(i), self.z_partition.slice(j)]

    def K_block(self, i, l):
        return self.K[self.w_partition.slice(i), self.input_partition.slice(l)]

    def N_block(self, k, j):
        return self.N[self.output_partition.slice(k), self.z_partition.slice(j)]


def assemble(net):
    """Closed-loop :class:`PartitionedSystem` of a network (``D = 0``)."""
    from scipy.linalg import block_diag

    Ab = block_diag(*[A for A, _, _ in net.subsystems])
    Bb = block_diag(*[B for _, B, _ in net.subsystems])
    Cb = block_diag(*[C for _, _, C in net.subsystems])
    A = Ab + Bb @ net.M @ Cb
    B = Bb @ net.K
    C = net.N @ Cb
    D = np.zeros((C.shape[0], B.shape[1]))
    return PartitionedSystem(A, B, C, D, net.state_partition, net.input_partition, net.output_partition)


def _gain(A, B, C, X):
    """``||C (sI - A)^{-1} B X||_inf``, exactly 0 for a zero ``X``."""
    if is_zero_block(X):
        return 0.0
    return hinf_norm(A, B @ X, C)


def network_comparison_system(net):
    """Comparison system with ``F_ii = -1`` and ``F_ij = ||G_i M_ij||_inf``.

    ``G_i = C_i (sI - A_i)^{-1} B_i``, ``G_il = ||G_i K_il||_inf``,
    ``H_kj = sigma_max(N_kj)`` and ``J = 0``.
    """
    n, ip, op = net.n, net.input_partition, net.output_partition

    def row(i):
        A, B, C = net.subsystems[i]
        f = np.array([-1.0 if j == i else _gain(A, B, C, net.M_block(i, j)) for j in range(n)])
        g = np.array([_gain(A, B, C, net.K_block(i, l)) for l in range(ip.n)])
        return f, g

    rows = parallel_map(row, range(n))
    F = np.vstack([r[0] for r in rows])
    G = np.vstack([r[1] for r in rows])
    H = np.array([[max_singular_value(net.N_block(k, j)) for j in range(n)] for k in range(op.n)])
    return PositiveSystem(F, G, H, np.zeros((op.n, ip.n)))


def network_comparison_decoupled(net):
    """Comparison system separating subsystem gains from interconnection gains.

    ``F_ii = -1 / ||G_i||_inf``, ``F_ij = ||M_ij||_2``,
    ``G_il = sigma_max(K_il)``, ``H_kj = sigma_max(N_kj)``.  It never depends on
    the state-space realizations of the subsystems beyond their gains, and
    is more conservative than :func:`network_comparison_system`.
    """
    n, ip, op = net.n, net.input_partition, net.output_partition
    gains = parallel_map(lambda i: hinf_norm(*net.subsystems[i]), range(n))
    F = np.array([[max_singular_value(net.M_block(i, j)) if i != j else 0.0 for j in range(n)]
                  for i in range(n)])
    for i, g in enumerate(gains):
        if g == 0:
            raise ValueError(f"subsystem {i + 1} has zero gain; its decoupled diagonal entry is undefined")
        F[i, i] = -1.0 / g
    G = np.array([[max_singular_value(net.K_block(i, l)) for l in range(ip.n)] for i in range(n)])
    H = np.array([[max_singular_value(net.N_block(k, j)) for j in range(n)] for k in range(op.n)])
    return PositiveSystem(F, G, H, np.zeros((op.n, ip.n)))


def _stacked_weights(net, i, phi, gamma):
    """``S_i = [M_ij phi_ij^{-1/2} ..., K_il gamma_il^{-1/2} ...]`` over nonzero blocks."""
    cols = []
    for j in range(net.n):
        Mij = net.M_block(i, j)
        if j != i and not is_zero_block(Mij):
            if not phi[i, j] > 0:
                raise ValueError(f"phi[{i}, {j}] must be positive for a nonzero block")
            cols.append(Mij / np.sqrt(phi[i, j]))
    for l in range(net.input_partition.n):
        Kil = net.K_block(i, l)
        if not is_zero_block(Kil):
            if not gamma[i, l] > 0:
                raise ValueError(f"gamma[{i}, {l}] must be positive for a nonzero block")
            cols.append(Kil / np.sqrt(gamma[i, l]))
    m = net.subsystems[i][1].shape[1]
    return np.hstack(cols) if cols else np.zeros((m, 0))


def network_mixed_gain(net, i, phi, gamma):
    """``||G_i [M_ij phi_ij^{-1/2}, K_il gamma_il^{-1/2}]||_inf^2`` for subsystem ``i``."""
    A, B, C = net.subsystems[i]
    S = _stacked_weights(net, i, phi, gamma)
    if S.shape[1] == 0 or not np.any(S):
        return 0.0
    return hinf_norm(A, B @ S, C) ** 2


def local_dissipativity_check(subsystem, Y, P):
    """Largest eigenvalue of the local dissipativity matrix.

    ``[[P A + A^T P + C^T Y11 C, P B + C^T Y12], [*, -Y22]]`` for
    ``Y = [[Y11, Y12], [Y12^T, -Y22]]``.  ``Y`` may be the full symmetric
    matrix or a tuple ``(Y11, Y12, Y22)``.  A nonpositive value means the
    subsystem is dissipative with storage ``x^T P x``.
    """
    A, B, C = (np.atleast_2d(np.asarray(X, dtype=float)) for X in subsystem[:3])
    p, m = C.shape[0], B.shape[1]
    if isinstance(Y, (tuple, list)):
        Y11, Y12, Y22 = (np.atleast_2d(np.asarray(X, dtype=float)) for X in Y)
    else:
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if Y.shape != (p + m, p + m):
            raise ValueError(f"Y has shape {Y.shape}, expected {(p + m, p + m)}")
        Y11, Y12, Y22 = Y[:p, :p], Y[:p, p:], -Y[p:, p:]
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n = A.shape[0]
    if Y11.shape != (p, p) or Y12.shape != (p, m) or Y22.shape != (m, m) or P.shape != (n, n):
        raise ValueError("dimension mismatch between subsystem, Y and P")
    W = np.block([[P @ A + A.T @ P + C.T @ Y11 @ C, P @ B + C.T @ Y12],
                  [(P @ B + C.T @ Y12).T, -Y22]])
    return float(np.linalg.eigvalsh(0.5 * (W + W.T))[-1])


@dataclass
class NetworkCertificate:
    """Per-subsystem storage matrices ``P_i`` and supply-rate data ``(Y11_i, Y22_i)``.

    ``riccati_residual`` is the bounded-real residual of the assembled
    closed loop at level ``delta`` and ``local_residuals`` the local
    dissipativity residuals (all ``<= 0``).
    """

    blocks: list
    delta: float
    comparison_norm: float
    lyapunov_residual: float
    riccati_residual: float
    supply: list
    local_residuals: list
    scaling: object = None
    comparison: object = None
    closed_loop: object = None
    decoupled: bool = False
    timings: dict = field(default_factory=dict)

    @property
    def P(self):
        return assemble_blockdiag(self.blocks)


def network_hinf_certificate(net, delta=None, decoupled=False):
    """Certify ``||C (sI - A)^{-1} B||_inf < delta`` for the closed-loop network.

    Solves the scaling LP on the network comparison system
    (:func:`network_comparison_system`, or the decoupled variant), forms
    ``phi_ij = |F_ij| e_i / d_j`` and ``gamma_il = G_il e_i / f_l``, and for
    each subsystem solves

        P A_i + A_i^T P + phi_ii C_i^T C_i + eps_i I + P B_i (S S^T + tau I) B_i^T P = 0

    with ``S = S_i`` from :func:`network_mixed_gain`.  The small margins
    ``tau`` and ``eps_i`` make the local inequality strict while keeping the
    equation solvable.  The supply rate of subsystem ``i`` is
    ``Y11 = phi_ii I``, ``Y12 = 0``, ``Y22 = (S S^T + tau I)^{-1}``.
    The assembled ``P`` is verified against the closed-loop bounded-real
    inequality.

    Raises
    ------
    ComparisonUnstableError
        The comparison matrix is not Hurwitz (inconclusive).
    DeltaTooSmallError
        ``delta`` does not exceed the comparison norm.
    CertificateError
        Verification failed.
    """
    import time

    t0 = time.perf_counter()
    ps = network_comparison_decoupled(net) if decoupled else network_comparison_system(net)
    alpha = spectral_abscissa(ps.F)
    if not alpha < -HURWITZ_GUARD:
        raise ComparisonUnstableError(
            f"network comparison matrix is not Hurwitz (spectral abscissa {alpha:.6g}); inconclusive",
            abscissa=alpha)
    cnorm = positive_hinf_norm(ps)
    if delta is None:
        delta = 1.001 * cnorm if cnorm > 0 else 1.0
    delta = float(delta)
    if not delta > cnorm:
        raise DeltaTooSmallError(f"delta {delta:.10g} does not exceed the comparison norm {cnorm:.10g}")
    t1 = time.perf_counter()
    sv = solve_scaling_lp(ps, delta)
    if sv is None:
        raise DeltaTooSmallError(f"scaling LP infeasible at delta {delta:.10g}")
    t2 = time.perf_counter()
    d, e, f = sv.d, sv.e, sv.f
    phi = np.abs(ps.F) * e[:, None] / d[None, :]
    gamma = ps.G * e[:, None] / f[None, :]

    def local(i):
        A, B, C = net.subsystems[i]
        k, m = A.shape[0], B.shape[1]
        S = _stacked_weights(net, i, phi, gamma)
        rho = phi[i, i] * network_mixed_gain(net, i, phi, gamma)
        if not rho < 1:
            raise CertificateError(f"local gain condition fails for subsystem {i + 1} (rho = {rho:.6g})")
        gi = hinf_norm(A, B, C)
        tau = (1 - rho) / (4 * phi[i, i] * gi ** 2) if gi > 0 else 1.0
        I = np.eye(k)
        rs = hinf_norm(A, B @ S, I) ** 2 if np.any(S) else 0.0
        rb = hinf_norm(A, B, I) ** 2 if np.any(B) else 0.0
        den = rs + tau * rb
        eps = (1 - rho) / (4 * den) if den > 0 else 1.0
        W = S @ S.T + tau * np.eye(m)
        P = solve_riccati(A, B @ W @ B.T, phi[i, i] * C.T @ C + eps * I)
        Y11 = phi[i, i] * np.eye(C.shape[0])
        Y22 = np.linalg.inv(W)
        res = local_dissipativity_check((A, B, C), (Y11, np.zeros((C.shape[0], m)), Y22), P)
        return P, (Y11, Y22), res

    out = parallel_map(local, range(net.n))
    blocks = [o[0] for o in out]
    t3 = time.perf_counter()
    sys = assemble(net)
    P = assemble_blockdiag(blocks)
    lyap = verify_lyapunov_lmi(sys.A, P)
    ric = verify_riccati_lmi(sys, P, delta)
    local_res = [o[2] for o in out]
    t4 = time.perf_counter()
    cert = NetworkCertificate(blocks=blocks, delta=delta, comparison_norm=cnorm, lyapunov_residual=lyap,
                              riccati_residual=ric, supply=[o[1] for o in out], local_residuals=local_res,
                              scaling=sv, comparison=ps, closed_loop=sys, decoupled=decoupled,
                              timings={"comparison": t1 - t0, "lp": t2 - t1, "riccati": t3 - t2,
                                       "verify": t4 - t3, "total": t4 - t0})
    tol = strict_tolerance(P, sys.A)
    min_eig = min(float(np.linalg.eigvalsh(b)[0]) for b in blocks)
    if not (min_eig > 0 and ric < -tol and lyap < -tol and max(local_res) <= tol):
        raise CertificateError(f"network certificate failed verification (Riccati {ric:.3g}, "
                               f"local {max(local_res):.3g})", residual=ric)
    return cert
