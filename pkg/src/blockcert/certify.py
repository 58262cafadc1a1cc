"""Block-diagonal Lyapunov and bounded-real certificates from comparison systems.

The pipeline is

1. build the comparison system of a partitioned system and its exact
   H-infinity norm,
2. solve the scaling LP at a level ``delta`` above that norm,
3. turn the scaling vectors into scalar multipliers,
4. solve one small Riccati equation per diagonal block,
5. assemble ``P = diag(P_1, ..., P_n)`` and verify the full-size
   Lyapunov and Riccati inequalities by eigenvalue checks.

Steps 3 and 4 only touch one block row at a time, so the per-block work
can run in parallel (see ``BLOCKCERT_THREADS``).
"""

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from ._parallel import parallel_map
from .comparison import comparison_system_hard, is_zero_block, require_hurwitz_blocks
from .exceptions import (CertificateError, ComparisonUnstableError, DeltaTooSmallError,
                         NotHurwitzError)
from .linalg import HURWITZ_GUARD, max_singular_value, solve_riccati, spectral_abscissa
from .partition import Partition, PartitionedSystem
from .positive import positive_hinf_norm, solve_scaling_lp, strict_tolerance

__all__ = [
    "DEFAULT_DELTA_FACTOR",
    "MultiplierScalars",
    "MultiplierMatrices",
    "MultiplierResiduals",
    "BlockDiagonalCertificate",
    "multipliers_from_scalings",
    "block_riccati_solutions",
    "assemble_blockdiag",
    "verify_lyapunov_lmi",
    "verify_riccati_lmi",
    "riccati_lmi_matrix",
    "lift_multipliers",
    "verify_multiplier_lmis",
    "certify_hinf",
    "certify_lyapunov",
]

DEFAULT_DELTA_FACTOR = 1.001


@dataclass
class MultiplierScalars:
    """Scalar multipliers derived from scaling vectors.

    ``phi[i, j] = |F_ij| e_i / d_j`` (so ``phi[i, i] = e_i / d_i`` when
    ``F_ii = -1``), ``gamma[i, l] = G_il e_i / f_l``,
    ``eta[k, j] = H_kj d_j / g_k``, ``lam[k, l] = J_kl f_l / g_k`` and
    ``mu[k, l] = J_kl g_k / f_l``.
    """

    phi: np.ndarray
    gamma: np.ndarray
    eta: np.ndarray
    lam: np.ndarray
    mu: np.ndarray


@dataclass
class MultiplierMatrices:
    """Matrix multipliers keyed by block indices.

    ``Phi[(i, j)]`` is ``k_j x k_j``, ``Xi[(k, i)]`` is ``p_k x p_k``,
    ``Gamma[(i, l)]`` is ``m_l x m_l``, ``Upsilon[(k, l)]`` is ``m_l x m_l``
    and ``Lambda[(k, l)]`` is ``p_k x p_k``, where ``p_k`` and ``m_l`` are the
    output and input block sizes.  Missing keys mean zero.
    """

    Phi: dict = field(default_factory=dict)
    Xi: dict = field(default_factory=dict)
    Gamma: dict = field(default_factory=dict)
    Upsilon: dict = field(default_factory=dict)
    Lambda: dict = field(default_factory=dict)


@dataclass
class MultiplierResiduals:
    """Residuals of the four multiplier conditions (``<= 0`` means satisfied).

    ``block`` holds the largest eigenvalue of each per-block Riccati
    expression (must be strictly negative), ``coupling`` the negated
    smallest eigenvalue of each ``[[Upsilon, -D^T], [-D, Lambda]]``,
    ``output`` the largest eigenvalue of ``sum Xi + sum Lambda - I`` per
    output block and ``input`` that of ``sum Gamma + sum Upsilon - delta^2 I``
    per input block (strict).
    """

    block: list
    coupling: dict
    output: list
    input: list
    tolerance: float = 1e-10

    def satisfied(self):
        tol = self.tolerance
        return bool(all(r < -tol for r in self.block)
                    and all(r <= tol for r in self.coupling.values())
                    and all(r <= tol for r in self.output)
                    and all(r < -tol for r in self.input))

    def worst(self):
        vals = list(self.block) + list(self.coupling.values()) + list(self.output) + list(self.input)
        return max(vals) if vals else -np.inf


@dataclass
class BlockDiagonalCertificate:
    """Verified block-diagonal solution of the Lyapunov/Riccati inequalities.

    Attributes
    ----------
    blocks : list of ndarray
        Symmetric positive definite diagonal blocks ``P_i``.
    delta : float
        Certified bound on the H-infinity norm.
    lyapunov_residual, riccati_residual : float
        Largest eigenvalues of ``P A + A^T P`` and of the bounded-real
        Riccati expression (both negative for a valid certificate).
    comparison_norm : float
        H-infinity norm of the comparison system.
    """

    blocks: list
    delta: float
    lyapunov_residual: float
    riccati_residual: float
    comparison_norm: float
    min_eigenvalue: float = np.nan
    scaling: object = None
    multipliers: MultiplierScalars = None
    comparison: object = None
    multiplier_residuals: MultiplierResiduals = None
    timings: dict = field(default_factory=dict)

    @property
    def P(self):
        return assemble_blockdiag(self.blocks)

    @property
    def valid(self):
        return bool(self.min_eigenvalue > 0 and self.lyapunov_residual < 0 and self.riccati_residual < 0)


def multipliers_from_scalings(ps, sv):
    """Scalar multipliers from a positive system and its scaling vectors.

    Entries belonging to zero blocks are exactly zero.  Raises
    ``ValueError`` if some ``g_k = 0`` while row ``k`` of ``H`` or ``J`` is
    nonzero.
    """
    F, G, H, J = ps.F, ps.G, ps.H, ps.J
    d, e, g, f = (np.asarray(v, dtype=float) for v in (sv.d, sv.e, sv.g, sv.f))
    if np.any(d <= 0) or np.any(e <= 0) or np.any(f <= 0) or np.any(g < 0):
        raise ValueError("scaling vectors must be positive (g nonnegative)")
    zero_g = g == 0
    if np.any(zero_g & (np.any(H != 0, axis=1) | np.any(J != 0, axis=1))):
        bad = np.flatnonzero(zero_g & (np.any(H != 0, axis=1) | np.any(J != 0, axis=1)))
        raise ValueError(f"g is zero at outputs {bad.tolist()} whose rows of H/J are nonzero")
    g_safe = np.where(zero_g, 1.0, g)
    phi = np.abs(F) * e[:, None] / d[None, :]
    gamma = G * e[:, None] / f[None, :]
    eta = H * d[None, :] / g_safe[:, None]
    lam = J * f[None, :] / g_safe[:, None]
    mu = J * g[:, None] / f[None, :]
    return MultiplierScalars(phi=phi, gamma=gamma, eta=eta, lam=lam, mu=mu)


def _block_R(sys, ms, i):
    sp, ip = sys.state_partition, sys.input_partition
    si = sp.slices[i]
    k = sp.block_sizes[i]
    R = np.zeros((k, k))
    for j, sj in enumerate(sp.slices):
        Aij = sys.A[si, sj]
        if j == i or is_zero_block(Aij):
            continue
        if not ms.phi[i, j] > 0:
            raise ValueError(f"phi[{i}, {j}] must be positive for a nonzero block")
        R += Aij @ Aij.T / ms.phi[i, j]
    for l, sl in enumerate(ip.slices):
        Bil = sys.B[si, sl]
        if is_zero_block(Bil):
            continue
        if not ms.gamma[i, l] > 0:
            raise ValueError(f"gamma[{i}, {l}] must be positive for a nonzero block")
        R += Bil @ Bil.T / ms.gamma[i, l]
    return R


def block_riccati_solutions(sys, ms):
    """Solve one Riccati equation per diagonal block.

    Block ``i`` solves ``P A_ii + A_ii^T P + phi_ii I + P R_i P = 0`` with
    ``R_i = sum_j A_ij A_ij^T / phi_ij + sum_l B_il B_il^T / gamma_il`` over
    the nonzero off-diagonal and input blocks; ``R_i = 0`` reduces to a
    Lyapunov equation.
    """
    sp = sys.state_partition
    require_hurwitz_blocks(sys.A, sp)

    def one(i):
        si = sp.slices[i]
        k = sp.block_sizes[i]
        R = _block_R(sys, ms, i)
        return solve_riccati(sys.A[si, si], R, ms.phi[i, i] * np.eye(k))

    return parallel_map(one, range(sp.n))


def assemble_blockdiag(blocks):
    """Block-diagonal matrix from a list of square blocks."""
    blocks = [np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks]
    if not blocks:
        return np.zeros((0, 0))
    return block_diag(*blocks)


def _max_eig(X):
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return -np.inf
    return float(np.linalg.eigvalsh(0.5 * (X + X.T))[-1])


def verify_lyapunov_lmi(A, P):
    """Largest eigenvalue of ``P A + A^T P``."""
    A = np.asarray(A, dtype=float)
    P = np.asarray(P, dtype=float)
    return _max_eig(P @ A + A.T @ P)


def _abcd(sys):
    if isinstance(sys, PartitionedSystem):
        return sys.A, sys.B, sys.C, sys.D
    A, B, C, D = sys
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    D = np.zeros((C.shape[0], B.shape[1])) if D is None else np.atleast_2d(np.asarray(D, dtype=float))
    return A, B, C, D


def riccati_lmi_matrix(sys, P, delta):
    """Bounded-real Riccati expression at level ``delta``.

    ``P A + A^T P + C^T C - (P B + C^T D)(D^T D - delta^2 I)^{-1}(D^T C + B^T P)``
    """
    A, B, C, D = _abcd(sys)
    P = np.asarray(P, dtype=float)
    if not delta > max_singular_value(D):
        raise DeltaTooSmallError(f"delta {delta} must exceed sigma_max(D) = {max_singular_value(D):.6g}")
    R = D.T @ D - delta ** 2 * np.eye(D.shape[1])
    L = P @ B + C.T @ D
    return P @ A + A.T @ P + C.T @ C - L @ np.linalg.solve(R, L.T)


def verify_riccati_lmi(sys, P, delta):
    """Largest eigenvalue of the bounded-real Riccati expression.

    ``sys`` is a :class:`PartitionedSystem` or a tuple ``(A, B, C, D)``.
    A negative value together with ``P > 0`` proves
    ``||C (sI - A)^{-1} B + D||_inf < delta``.
    """
    return _max_eig(riccati_lmi_matrix(sys, P, delta))


def lift_multipliers(sys, ms):
    """Lift scalar multipliers to matrices ``phi * I`` of the right sizes."""
    sp, ip, op = sys.state_partition, sys.input_partition, sys.output_partition
    mm = MultiplierMatrices()
    for i in range(sp.n):
        for j in range(sp.n):
            if i != j and ms.phi[i, j] != 0:
                mm.Phi[(i, j)] = ms.phi[i, j] * np.eye(sp.block_sizes[j])
        for l in range(ip.n):
            if ms.gamma[i, l] != 0:
                mm.Gamma[(i, l)] = ms.gamma[i, l] * np.eye(ip.block_sizes[l])
    for k in range(op.n):
        for i in range(sp.n):
            if ms.eta[k, i] != 0:
                mm.Xi[(k, i)] = ms.eta[k, i] * np.eye(op.block_sizes[k])
        for l in range(ip.n):
            if ms.mu[k, l] != 0:
                mm.Upsilon[(k, l)] = ms.mu[k, l] * np.eye(ip.block_sizes[l])
            if ms.lam[k, l] != 0:
                mm.Lambda[(k, l)] = ms.lam[k, l] * np.eye(op.block_sizes[k])
    return mm


def _get(store, key, size):
    X = store.get(key)
    return np.zeros((size, size)) if X is None else np.asarray(X, dtype=float)


def _inverse_required(X, what):
    if np.size(X) == 0:
        return X
    w = np.linalg.eigvalsh(0.5 * (X + X.T))
    if not w[0] > 0:
        raise ValueError(f"{what} must be positive definite (its block is nonzero)")
    return np.linalg.inv(X)


def verify_multiplier_lmis(sys, blocks, mm, delta):
    """Check the four multiplier conditions for given ``P_i`` and multipliers.

    Returns a :class:`MultiplierResiduals`.  Raises ``ValueError`` if a
    multiplier paired with a nonzero system block is singular.
    """
    if isinstance(mm, MultiplierScalars):
        mm = lift_multipliers(sys, mm)
    sp, ip, op = sys.state_partition, sys.input_partition, sys.output_partition
    A, B, C, D = sys.A, sys.B, sys.C, sys.D
    ks, ms_, ps_ = sp.block_sizes, ip.block_sizes, op.block_sizes

    block_res = []
    for i, si in enumerate(sp.slices):
        P = np.asarray(blocks[i], dtype=float)
        L = P @ A[si, si] + A[si, si].T @ P
        for j in range(sp.n):
            if j != i:
                L = L + _get(mm.Phi, (j, i), ks[i])
        for k, sk in enumerate(op.slices):
            Cki = C[sk, si]
            if not is_zero_block(Cki):
                L = L + Cki.T @ _inverse_required(_get(mm.Xi, (k, i), ps_[k]), f"Xi[{k},{i}]") @ Cki
        R = np.zeros((ks[i], ks[i]))
        for j, sj in enumerate(sp.slices):
            Aij = A[si, sj]
            if j != i and not is_zero_block(Aij):
                R += Aij @ _inverse_required(_get(mm.Phi, (i, j), ks[j]), f"Phi[{i},{j}]") @ Aij.T
        for l, sl in enumerate(ip.slices):
            Bil = B[si, sl]
            if not is_zero_block(Bil):
                R += Bil @ _inverse_required(_get(mm.Gamma, (i, l), ms_[l]), f"Gamma[{i},{l}]") @ Bil.T
        block_res.append(_max_eig(L + P @ R @ P))

    coupling = {}
    for k, sk in enumerate(op.slices):
        for l, sl in enumerate(ip.slices):
            Dkl = D[sk, sl]
            Y = _get(mm.Upsilon, (k, l), ms_[l])
            Lm = _get(mm.Lambda, (k, l), ps_[k])
            W = np.block([[Y, -Dkl.T], [-Dkl, Lm]])
            coupling[(k, l)] = -float(np.linalg.eigvalsh(0.5 * (W + W.T))[0])

    out_res = []
    for k in range(op.n):
        S = -np.eye(ps_[k])
        for i in range(sp.n):
            S = S + _get(mm.Xi, (k, i), ps_[k])
        for l in range(ip.n):
            S = S + _get(mm.Lambda, (k, l), ps_[k])
        out_res.append(_max_eig(S))

    in_res = []
    for l in range(ip.n):
        S = -delta ** 2 * np.eye(ms_[l])
        for i in range(sp.n):
            S = S + _get(mm.Gamma, (i, l), ms_[l])
        for k in range(op.n):
            S = S + _get(mm.Upsilon, (k, l), ms_[l])
        in_res.append(_max_eig(S))

    scale = max([np.max(np.abs(b)) for b in blocks] + [np.max(np.abs(A)), delta ** 2, 1.0])
    return MultiplierResiduals(block_res, coupling, out_res, in_res, tolerance=1e-10 * (1.0 + scale))


def _strictly_negative(residual, *mats):
    return residual < -strict_tolerance(*mats)


def certify_hinf(sys, delta=None):
    """Block-diagonal certificate that ``||C (sI - A)^{-1} B + D||_inf < delta``.

    Parameters
    ----------
    sys : PartitionedSystem
        Every diagonal block of ``A`` must be Hurwitz.
    delta : float, optional
        Level to certify.  Defaults to ``1.001`` times the comparison norm
        (``1.0`` when that norm is zero).

    Raises
    ------
    NotHurwitzError
        A diagonal block is not Hurwitz.
    ComparisonUnstableError
        The comparison matrix is not Hurwitz.  This is inconclusive, not a
        proof of instability.
    DeltaTooSmallError
        ``delta`` does not exceed the comparison norm (or the scaling LP is
        infeasible at ``delta``).
    CertificateError
        The assembled certificate failed verification.
    """
    timings = {}
    t0 = time.perf_counter()
    require_hurwitz_blocks(sys.A, sys.state_partition)
    ps = comparison_system_hard(sys)
    t1 = time.perf_counter()
    timings["comparison"] = t1 - t0

    alpha = spectral_abscissa(ps.F)
    if not alpha < -HURWITZ_GUARD:
        raise ComparisonUnstableError(
            f"comparison matrix is not Hurwitz (spectral abscissa {alpha:.6g}); inconclusive",
            abscissa=alpha)
    cnorm = positive_hinf_norm(ps)
    if delta is None:
        delta = DEFAULT_DELTA_FACTOR * cnorm if cnorm > 0 else 1.0
    delta = float(delta)
    if not delta > cnorm:
        raise DeltaTooSmallError(f"delta {delta:.10g} does not exceed the comparison norm {cnorm:.10g}")
    t2 = time.perf_counter()
    timings["comparison_norm"] = t2 - t1

    sv = solve_scaling_lp(ps, delta)
    if sv is None:
        raise DeltaTooSmallError(
            f"scaling LP infeasible at delta {delta:.10g} (comparison norm {cnorm:.10g})")
    t3 = time.perf_counter()
    timings["lp"] = t3 - t2

    ms = multipliers_from_scalings(ps, sv)
    blocks = block_riccati_solutions(sys, ms)
    t4 = time.perf_counter()
    timings["riccati"] = t4 - t3

    P = assemble_blockdiag(blocks)
    min_eig = min(float(np.linalg.eigvalsh(b)[0]) for b in blocks)
    lyap = verify_lyapunov_lmi(sys.A, P)
    ric = verify_riccati_lmi(sys, P, delta)
    mres = verify_multiplier_lmis(sys, blocks, lift_multipliers(sys, ms), delta)
    t5 = time.perf_counter()
    timings["verify"] = t5 - t4
    timings["total"] = t5 - t0

    cert = BlockDiagonalCertificate(
        blocks=blocks, delta=delta, lyapunov_residual=lyap, riccati_residual=ric,
        comparison_norm=cnorm, min_eigenvalue=min_eig, scaling=sv, multipliers=ms,
        comparison=ps, multiplier_residuals=mres, timings=timings)
    if not (min_eig > 0 and _strictly_negative(lyap, P, sys.A) and _strictly_negative(ric, P, sys.A)):
        raise CertificateError(
            f"certificate failed verification (min eig P {min_eig:.3g}, "
            f"Lyapunov {lyap:.3g}, Riccati {ric:.3g})", residual=max(lyap, ric))
    return cert


def certify_lyapunov(A, partition):
    """Block-diagonal ``P > 0`` with ``P A + A^T P < 0`` from ``M^alpha(A)``.

    Raises :class:`ComparisonUnstableError` when ``M^alpha(A)`` is not
    Hurwitz and :class:`NotHurwitzError` for non-Hurwitz diagonal blocks.
    """
    A = np.asarray(A, dtype=float)
    if not isinstance(partition, Partition):
        partition = Partition(tuple(partition))
    N = A.shape[0]
    sys = PartitionedSystem(A, np.zeros((N, 1)), np.zeros((1, N)), np.zeros((1, 1)), partition)
    return certify_hinf(sys)
