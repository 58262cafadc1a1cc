"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves small dense linear programs of the form

    maximize    c^T x
    subject to  A_ub x <= b_ub
                A_eq x == b_eq
                x >= 0

The scaling LPs built by :mod:`blockcert.positive` have O(n) variables,
so a dense tableau is cheap, and a deterministic pivoting rule keeps the
certificates reproducible.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["LPResult", "linprog_max"]


@dataclass
class LPResult:
    status: str          # "optimal", "infeasible" or "unbounded"
    x: np.ndarray
    objective: float
    iterations: int

    @property
    def success(self):
        return self.status == "optimal"


def _pivot(T, row, col):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def _run(T, basis, n_cols, tol, max_iter, counter):
    """Maximize the objective stored (negated) in the last row of ``T``.

    Only the first ``n_cols`` columns may enter.  Returns "optimal" or
    "unbounded".
    """
    m = T.shape[0] - 1
    while True:
        if counter[0] >= max_iter:
            raise RuntimeError("simplex iteration limit reached")
        obj = T[-1, :n_cols]
        # Bland: smallest index with negative reduced cost
        cand = np.flatnonzero(obj < -tol)
        if cand.size == 0:
            return "optimal"
        col = int(cand[0])
        column = T[:m, col]
        pos = column > tol
        if not np.any(pos):
            return "unbounded"
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / column[pos]
        rmin = ratios.min()
        ties = np.flatnonzero(ratios <= rmin + tol * max(1.0, abs(rmin)))
        # Bland: among tied rows leave the basic variable with smallest index
        row = int(ties[np.argmin(np.asarray(basis)[ties])])
        _pivot(T, row, col)
        basis[row] = col
        counter[0] += 1


def linprog_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tol=1e-11, max_iter=50000):
    """Maximize ``c^T x`` over ``x >= 0`` subject to the given constraints.

    Returns an :class:`LPResult`.  ``x`` is the optimal vertex when
    ``status == "optimal"``, otherwise zeros.
    """
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if A_ub.shape != (b_ub.size, n) or A_eq.shape != (b_eq.size, n):
        raise ValueError("constraint shapes do not match")

    m_ub, m_eq = b_ub.size, b_eq.size
    m = m_ub + m_eq
    # columns: x (n) | slacks (m_ub) | artificials (m) | rhs
    n_slack = m_ub
    T = np.zeros((m + 1, n + n_slack + m + 1))
    T[:m_ub, :n] = A_ub
    T[:m_ub, n:n + m_ub] = np.eye(m_ub)
    T[:m_ub, -1] = b_ub
    T[m_ub:m, :n] = A_eq
    T[m_ub:m, -1] = b_eq
    neg = T[:m, -1] < 0
    T[:m][neg] *= -1.0

    basis = [0] * m
    art_start = n + n_slack
    need_art = []
    for i in range(m):
        if i < m_ub and not neg[i]:
            basis[i] = n + i
        else:
            basis[i] = art_start + i
            T[i, art_start + i] = 1.0
            need_art.append(i)

    counter = [0]
    if need_art:
        # phase 1: maximize -sum(artificials)
        T[-1, :] = 0.0
        for i in need_art:
            T[-1, :] -= T[i, :]
        for i in need_art:
            T[-1, art_start + i] = 0.0
        _run(T, basis, art_start, tol, max_iter, counter)
        scale = 1.0 + np.max(np.abs(T[:m, -1]), initial=0.0)
        if -T[-1, -1] > 1e-9 * scale:
            return LPResult("infeasible", np.zeros(n), np.nan, counter[0])
        # drive remaining artificials out of the basis
        for i in range(m):
            if basis[i] >= art_start:
                row = T[i, :art_start]
                nz = np.flatnonzero(np.abs(row) > tol)
                if nz.size:
                    _pivot(T, i, int(nz[0]))
                    basis[i] = int(nz[0])
        T[:, art_start:-1] = 0.0

    # phase 2
    T[-1, :] = 0.0
    T[-1, :n] = -c
    for i, b in enumerate(basis):
        if b < art_start and T[-1, b] != 0.0:
            T[-1, :] -= T[-1, b] * T[i, :]
    status = _run(T, basis, art_start, tol, max_iter, counter)
    if status == "unbounded":
        return LPResult("unbounded", np.zeros(n), np.inf, counter[0])
    x = np.zeros(n + n_slack + m)
    for i, b in enumerate(basis):
        x[b] = T[i, -1]
    x = np.maximum(x[:n], 0.0)
    return LPResult("optimal", x, float(c @ x), counter[0])
