"""Block partitions of state, input and output vectors.

Block indices are 0-based throughout the Python API.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import PartitionError
from .linalg import HURWITZ_GUARD, as_matrix, spectral_abscissa

__all__ = [
    "Partition",
    "PartitionedSystem",
    "ValidationReport",
    "validate",
    "extract_block",
    "block_row_without_diagonal",
]


@dataclass(frozen=True)
class Partition:
    """Split of a vector of length ``total`` into consecutive blocks."""

    block_sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(k) for k in np.atleast_1d(np.asarray(self.block_sizes)).ravel())
        if len(sizes) == 0:
            raise PartitionError("a partition needs at least one block")
        bad = [i for i, k in enumerate(sizes) if k < 1]
        if bad:
            raise PartitionError(f"block sizes must be >= 1 (offending blocks {bad})")
        object.__setattr__(self, "block_sizes", sizes)

    @classmethod
    def trivial(cls, total):
        """Partition with ``total`` blocks of size one."""
        return cls((1,) * int(total))

    @property
    def n(self):
        """Number of blocks."""
        return len(self.block_sizes)

    @property
    def total(self):
        return sum(self.block_sizes)

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.block_sizes)]).astype(int)

    @property
    def slices(self):
        o = self.offsets
        return [slice(int(o[i]), int(o[i + 1])) for i in range(self.n)]

    def slice(self, i):
        if not 0 <= i < self.n:
            raise IndexError(f"block index {i} out of range for {self.n} blocks")
        o = self.offsets
        return slice(int(o[i]), int(o[i + 1]))

    def split(self, v):
        """Split a vector into its blocks."""
        v = np.asarray(v, dtype=float).ravel()
        if v.size != self.total:
            raise PartitionError(f"vector of length {v.size} does not match partition total {self.total}")
        return [v[s] for s in self.slices]

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.block_sizes)


def _as_partition(p, total=None):
    if p is None:
        return Partition((total,))
    if isinstance(p, Partition):
        return p
    return Partition(tuple(p))


@dataclass(frozen=True)
class PartitionedSystem:
    """State-space system ``x' = A x + B u``, ``y = C x + D u`` with block partitions.

    ``B``, ``C`` and ``D`` default to a single zero input/output channel and
    the input/output partitions default to one block.
    """

    A: np.ndarray
    B: np.ndarray = None
    C: np.ndarray = None
    D: np.ndarray = None
    state_partition: Partition = None
    input_partition: Partition = None
    output_partition: Partition = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        N = A.shape[0]
        B = np.zeros((N, 1)) if self.B is None else as_matrix(self.B, "B")
        C = np.zeros((1, N)) if self.C is None else as_matrix(self.C, "C")
        D = np.zeros((C.shape[0], B.shape[1])) if self.D is None else np.asarray(self.D, dtype=float)
        if D.ndim < 2:
            D = D.reshape(C.shape[0], B.shape[1]) if D.size > 1 else np.full((C.shape[0], B.shape[1]), float(D))
        sp = _as_partition(self.state_partition, N)
        ip = _as_partition(self.input_partition, B.shape[1])
        op = _as_partition(self.output_partition, C.shape[0])
        errors = _dimension_errors(A, B, C, D, sp, ip, op)
        if errors:
            raise PartitionError("; ".join(errors))
        for name, X in (("A", A), ("B", B), ("C", C), ("D", D)):
            if not np.all(np.isfinite(X)):
                raise ValueError(f"{name} has non-finite entries")
            object.__setattr__(self, name, X)
        object.__setattr__(self, "state_partition", sp)
        object.__setattr__(self, "input_partition", ip)
        object.__setattr__(self, "output_partition", op)

    @property
    def n(self):
        return self.state_partition.n

    @property
    def N(self):
        return self.A.shape[0]

    def block(self, which, i, j):
        """Block ``(i, j)`` of ``A``, ``B``, ``C`` or ``D`` (given by letter)."""
        rows, cols = {
            "A": (self.state_partition, self.state_partition),
            "B": (self.state_partition, self.input_partition),
            "C": (self.output_partition, self.state_partition),
            "D": (self.output_partition, self.input_partition),
        }[which]
        return extract_block(getattr(self, which), rows, cols, i, j)


def _dimension_errors(A, B, C, D, sp, ip, op):
    errors = []
    N = A.shape[0]
    if A.shape[0] != A.shape[1]:
        errors.append(f"A must be square, got {A.shape}")
    if sp.total != N:
        errors.append(f"state partition total {sp.total} != state dimension {N}")
    if B.shape[0] != N:
        errors.append(f"B has {B.shape[0]} rows, expected {N}")
    if C.shape[1] != N:
        errors.append(f"C has {C.shape[1]} columns, expected {N}")
    if ip.total != B.shape[1]:
        errors.append(f"input partition total {ip.total} != number of inputs {B.shape[1]}")
    if op.total != C.shape[0]:
        errors.append(f"output partition total {op.total} != number of outputs {C.shape[0]}")
    if D.shape != (C.shape[0], B.shape[1]):
        errors.append(f"D has shape {D.shape}, expected {(C.shape[0], B.shape[1])}")
    return errors


@dataclass
class ValidationReport:
    ok: bool
    errors: list
    warnings: list
    block_abscissae: list

    def __bool__(self):
        return self.ok


def validate(sys):
    """Check dimensions and report the spectral abscissa of each ``A_ii``.

    Accepts a :class:`PartitionedSystem` or a tuple
    ``(A, B, C, D, state_partition, input_partition, output_partition)``
    so that inconsistent data can be diagnosed without raising.  Non-Hurwitz
    diagonal blocks are warnings: only comparison construction needs them.
    """
    if isinstance(sys, PartitionedSystem):
        A, B, C, D = sys.A, sys.B, sys.C, sys.D
        sp, ip, op = sys.state_partition, sys.input_partition, sys.output_partition
    else:
        A, B, C, D, sp, ip, op = sys
        A = as_matrix(A, "A")
        B = np.zeros((A.shape[0], 1)) if B is None else as_matrix(B, "B")
        C = np.zeros((1, A.shape[1])) if C is None else as_matrix(C, "C")
        D = np.zeros((C.shape[0], B.shape[1])) if D is None else np.atleast_2d(np.asarray(D, dtype=float))
        try:
            sp = _as_partition(sp, A.shape[0])
            ip = _as_partition(ip, B.shape[1])
            op = _as_partition(op, C.shape[0])
        except PartitionError as exc:
            return ValidationReport(False, [str(exc)], [], [])
    errors = _dimension_errors(A, B, C, D, sp, ip, op)
    if errors:
        return ValidationReport(False, errors, [], [])
    warnings, abscissae = [], []
    for i, s in enumerate(sp.slices):
        alpha = spectral_abscissa(A[s, s])
        abscissae.append(alpha)
        if not alpha < -HURWITZ_GUARD:
            warnings.append(f"block {i + 1} not Hurwitz (spectral abscissa {alpha:.6g})")
    return ValidationReport(True, [], warnings, abscissae)


def extract_block(M, row_partition, col_partition, i, j):
    """Block ``(i, j)`` (0-based) of ``M`` under the given partitions."""
    M = np.asarray(M)
    row_partition = _as_partition(row_partition, M.shape[0])
    col_partition = _as_partition(col_partition, M.shape[1])
    if M.shape != (row_partition.total, col_partition.total):
        raise PartitionError(f"matrix shape {M.shape} does not match partitions "
                             f"({row_partition.total}, {col_partition.total})")
    return M[row_partition.slice(i), col_partition.slice(j)]


def block_row_without_diagonal(M, partition, i):
    """Concatenate the blocks ``M_i1 ... M_in`` of row ``i`` except ``M_ii``."""
    M = np.asarray(M)
    partition = _as_partition(partition, M.shape[0])
    rows = partition.slice(i)
    parts = [M[rows, s] for j, s in enumerate(partition.slices) if j != i]
    if not parts:
        return np.zeros((partition.block_sizes[i], 0))
    return np.hstack(parts)
