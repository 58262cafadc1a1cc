"""Comparison matrices and comparison systems of partitioned systems.

A comparison system replaces each block of a partitioned system by a
nonnegative scalar (a norm), giving a positive system with one state per
block.  Its stability and H-infinity performance bound those of the
original system.
"""

from enum import Enum

import numpy as np

from ._parallel import parallel_map
from .exceptions import NotHurwitzError
from .linalg import HURWITZ_GUARD, hinf_norm, log_norm_mu2, max_singular_value, spectral_abscissa
from .partition import PartitionedSystem, Partition
from .positive import PositiveSystem

__all__ = [
    "ComparisonVariant",
    "comparison_matrix",
    "comparison_system_hard",
    "comparison_system_simple",
    "is_zero_block",
    "require_hurwitz_blocks",
]


class ComparisonVariant(Enum):
    """Which comparison matrix to build.

    ``M_ALPHA``: diagonal -1, off-diagonal ``||(sI - A_ii)^{-1} A_ij||_inf``.
    ``MTILDE_ALPHA``: diagonal ``-1/||(sI - A_ii)^{-1}||_inf``, off-diagonal ``||A_ij||_2``.
    ``N_ALPHA``: diagonal ``min(mu_2(A_ii), 0)``, off-diagonal ``||A_ij||_2``.
    """

    M_ALPHA = "M"
    MTILDE_ALPHA = "Mtilde"
    N_ALPHA = "N"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip()
        for v in cls:
            if key in (v.value, v.name) or key.lower() == v.value.lower():
                return v
        raise ValueError(f"unknown comparison variant {value!r} (use M, Mtilde or N)")


def is_zero_block(X):
    """Exact zero test (no tolerance): users control sparsity in the input."""
    return np.size(X) == 0 or not np.any(X)


def require_hurwitz_blocks(A, partition):
    """Raise :class:`NotHurwitzError` naming the first non-Hurwitz ``A_ii``."""
    for i, s in enumerate(partition.slices):
        alpha = spectral_abscissa(A[s, s])
        if not alpha < -HURWITZ_GUARD:
            raise NotHurwitzError(
                f"diagonal block {i + 1} is not Hurwitz (spectral abscissa {alpha:.6g})",
                abscissa=alpha, block=i)


def _resolvent_gain(Aii, X):
    """``||(sI - A_ii)^{-1} X||_inf``, exactly 0 for a zero block."""
    if is_zero_block(X):
        return 0.0
    return hinf_norm(Aii, X, np.eye(Aii.shape[0]))


def comparison_matrix(A, partition, variant=ComparisonVariant.M_ALPHA):
    """Build the ``n x n`` Metzler comparison matrix of ``A``."""
    variant = ComparisonVariant.parse(variant)
    A = np.asarray(A, dtype=float)
    if not isinstance(partition, Partition):
        partition = Partition(tuple(partition))
    if A.shape != (partition.total, partition.total):
        raise ValueError(f"A has shape {A.shape}, partition total is {partition.total}")
    sl = partition.slices
    n = partition.n
    if variant is not ComparisonVariant.N_ALPHA:
        require_hurwitz_blocks(A, partition)

    def row(i):
        si = sl[i]
        Aii = A[si, si]
        out = np.zeros(n)
        for j in range(n):
            if j == i:
                continue
            Aij = A[si, sl[j]]
            if variant is ComparisonVariant.M_ALPHA:
                out[j] = _resolvent_gain(Aii, Aij)
            else:
                out[j] = 0.0 if is_zero_block(Aij) else max_singular_value(Aij)
        if variant is ComparisonVariant.M_ALPHA:
            out[i] = -1.0
        elif variant is ComparisonVariant.MTILDE_ALPHA:
            k = Aii.shape[0]
            out[i] = -1.0 / hinf_norm(Aii, np.eye(k), np.eye(k))
        else:
            out[i] = min(log_norm_mu2(Aii), 0.0)
        return out

    return np.vstack(parallel_map(row, range(n)))


def _norm_matrix(X, rows, cols, norm):
    out = np.zeros((rows.n, cols.n))
    for k, sk in enumerate(rows.slices):
        for j, sj in enumerate(cols.slices):
            blk = X[sk, sj]
            out[k, j] = 0.0 if is_zero_block(blk) else norm(blk)
    return out


def comparison_system_hard(sys):
    """Comparison system with ``F = M^alpha(A)`` and resolvent-weighted ``G``.

    ``G_il = ||(sI - A_ii)^{-1} B_il||_inf``, ``H_kj = ||C_kj||_2`` and
    ``J_kl = ||D_kl||_2``.
    """
    if not isinstance(sys, PartitionedSystem):
        raise TypeError("expected a PartitionedSystem")
    sp, ip, op = sys.state_partition, sys.input_partition, sys.output_partition
    F = comparison_matrix(sys.A, sp, ComparisonVariant.M_ALPHA)

    def grow(i):
        si = sp.slices[i]
        return [_resolvent_gain(sys.A[si, si], sys.B[si, sl]) for sl in ip.slices]

    G = np.array(parallel_map(grow, range(sp.n)), dtype=float).reshape(sp.n, ip.n)
    H = _norm_matrix(sys.C, op, sp, max_singular_value)
    J = _norm_matrix(sys.D, op, ip, max_singular_value)
    return PositiveSystem(F, G, H, J)


def comparison_system_simple(sys):
    """Comparison system with ``F = N^alpha(A)`` and ``G_il = ||B_il||_2``.

    Needs no Hurwitz blocks; it dominates trajectories rather than
    transfer functions.
    """
    if not isinstance(sys, PartitionedSystem):
        raise TypeError("expected a PartitionedSystem")
    sp, ip, op = sys.state_partition, sys.input_partition, sys.output_partition
    F = comparison_matrix(sys.A, sp, ComparisonVariant.N_ALPHA)
    G = _norm_matrix(sys.B, sp, ip, max_singular_value)
    H = _norm_matrix(sys.C, op, sp, max_singular_value)
    J = _norm_matrix(sys.D, op, ip, max_singular_value)
    return PositiveSystem(F, G, H, J)
