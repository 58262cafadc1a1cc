"""Small reference systems used by the tests, demos and CLI examples."""

import numpy as np

from .partition import Partition, PartitionedSystem

__all__ = [
    "two_block_system",
    "two_block_state_matrix",
    "witness_matrices",
    "five_state_system",
]

_A11 = np.array([[-60.0, 30.0], [20.0, -50.0]])
_A12 = np.array([[6.0, 6.0, 5.0], [0.0, 3.0, 1.0]])
_A21 = np.array([[4.0, 2.0], [7.0, -5.0], [-1.0, 1.0]])
_A22_PRINTED = np.array([[-90.0, 20.0, 20.0], [0.0, -10.0, 5.0], [-1.0, 1.0, 50.0]])
_B = np.array([[3.0, 2.0, 5.0, 1.0, 0.0]]).T
_C = {1: np.array([[2.0, 1.0, 5.0, 1.0, 2.0]]), 2: np.array([[-2.0, 1.0, 5.0, 1.0, 2.0]])}


def two_block_state_matrix(variant=1, corrected=True):
    """State matrix of the 5-state, {2, 3}-partitioned example.

    ``variant=2`` divides the leading 2x2 block by four.  As printed, the
    trailing 3x3 block has ``+50`` in its corner and is not Hurwitz (an
    eigenvalue near +49.9), so no comparison system exists.  With
    ``corrected=True`` that entry is ``-50``, which makes every diagonal
    block Hurwitz.
    """
    if variant not in (1, 2):
        raise ValueError("variant must be 1 or 2")
    A11 = _A11 if variant == 1 else _A11 / 4.0
    A22 = _A22_PRINTED.copy()
    if corrected:
        A22[2, 2] = -50.0
    return np.block([[A11, _A12], [_A21, A22]])


def two_block_system(variant=1, output=1, corrected=True):
    """Single-input single-output {2, 3}-partitioned example system.

    ``output`` selects between the two output rows, which differ in the
    sign of their first entry.
    """
    if output not in (1, 2):
        raise ValueError("output must be 1 or 2")
    A = two_block_state_matrix(variant, corrected)
    return PartitionedSystem(A, _B.copy(), _C[output].copy(), np.zeros((1, 1)),
                             Partition((2, 3)), Partition((1,)), Partition((1,)),
                             name=f"two-block A{variant} C{output}" + ("" if corrected else " (printed)"))


_WITNESS = {
    "I": [[-2, 6, 6, 2, 0, 2],
          [0, -8, -5, -4, 1, 0],
          [2, -1, -12, -8, 0, 2],
          [1, -1, -5, -6, 1, 1],
          [0, 1, -1, 0, -11, -7],
          [0, 1, 1, -2, -9, -10]],
    "II": [[-4, 2, -1, -1, 0, -1],
           [9, -16, 3, 8, -1, -1],
           [1, -1, -3, -1, 1, -2],
           [-1, 1, 4, -2, -2, 1],
           [-1, 2, 0, 1, -9, 4],
           [-2, 2, -1, 0, -3, -4]],
    "III": [[-5, 3, -1, -1, -1, -1],
            [9, -14, 8, 1, -1, 0],
            [2, -1, -7, -7, 0, 1],
            [1, -1, 4, -9, -1, 2],
            [1, -1, 1, 0, 0, 4],
            [0, -1, -1, 1, -4, -5]],
    "IV": [[-9, 7, -3, 3, 1, 2],
           [-6, -4, 2, -3, -1, 0],
           [-1, -1, -2, 5, 1, 0],
           [2, 2, -4, -4, -2, 1],
           [2, -1, 0, 3, -9, -4],
           [0, 2, 0, 0, 2, -7]],
}


def witness_matrices():
    """Four 6x6 matrices, {2, 2, 2}-partitioned, keyed ``"I"`` to ``"IV"``.

    Matrix ``k`` passes stability test ``k`` and fails the other three.
    """
    return {k: np.array(v, dtype=float) for k, v in _WITNESS.items()}


_A5 = np.array([[-5, -2, -1, 0, 4],
                [0, -5, -3, -1, 0],
                [0, -2, -9, 0, 0],
                [0, 0, -2, -5, 1],
                [1, 3, 0, 0, -4]], dtype=float)


def five_state_system(flip=False):
    """Five-state SISO system with unit feedthrough, trivially partitioned.

    ``flip=True`` negates the ``(5, 1)`` entry of the state matrix, which
    changes the frequency response drastically.
    """
    A = _A5.copy()
    if flip:
        A[4, 0] = -A[4, 0]
    B = np.array([[3.0, 0.0, 1.0, 0.0, 1.0]]).T
    C = np.array([[1.0, 2.0, 0.0, 0.0, 8.0]])
    D = np.array([[1.0]])
    return PartitionedSystem(A, B, C, D, Partition.trivial(5), Partition((1,)), Partition((1,)),
                             name="five-state" + (" flipped" if flip else ""))
