"""Analysis of internally positive systems.

A positive system ``xi' = F xi + G v, nu = H xi + J v`` has Metzler ``F``
and entrywise nonnegative ``G``, ``H``, ``J``.  For such systems stability
and H-infinity performance reduce to vector inequalities, so certificates
come from a matrix inverse or a small linear program and diagonal
solutions of the Lyapunov/Riccati inequalities can be written down
directly.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import CertificateError, NotHurwitzError
from .linalg import HURWITZ_GUARD, as_matrix, max_singular_value, spectral_abscissa
from .simplex import linprog_max

__all__ = [
    "LP_EPSILON",
    "PositiveSystem",
    "ScalingVectors",
    "is_metzler",
    "metzler_stability_certificate",
    "positive_hinf_norm",
    "solve_scaling_lp",
    "positive_riccati_lhs",
    "diagonal_riccati_certificate",
    "lyapunov_diag_from_vectors",
    "strict_tolerance",
]

# optimal LP slack must exceed this for a feasible verdict
LP_EPSILON = 1e-9


def strict_tolerance(*mats):
    """Margin used for strict matrix inequalities: ``1e-10 (1 + scale)``."""
    scale = max((np.max(np.abs(M)) if np.size(M) else 0.0) for M in mats) if mats else 0.0
    return 1e-10 * (1.0 + scale)


def is_metzler(F):
    F = as_matrix(F, "F")
    if F.shape[0] != F.shape[1]:
        return False
    off = F[~np.eye(F.shape[0], dtype=bool)]
    return bool(np.all(off >= 0))


@dataclass(frozen=True)
class PositiveSystem:
    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    J: np.ndarray

    def __post_init__(self):
        F = as_matrix(self.F, "F")
        n = F.shape[0]
        G = as_matrix(self.G, "G") if np.size(self.G) else np.zeros((n, 0))
        H = as_matrix(self.H, "H") if np.size(self.H) else np.zeros((0, n))
        J = np.asarray(self.J, dtype=float)
        J = J.reshape(H.shape[0], G.shape[1]) if J.size else np.zeros((H.shape[0], G.shape[1]))
        if F.shape != (n, n) or G.shape[0] != n or H.shape[1] != n:
            raise ValueError(f"inconsistent shapes F{F.shape} G{G.shape} H{H.shape} J{J.shape}")
        if not is_metzler(F):
            raise ValueError("F must be Metzler")
        for name, X in (("G", G), ("H", H), ("J", J)):
            if np.any(X < 0):
                raise ValueError(f"{name} must be entrywise nonnegative")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "J", J)

    @property
    def n(self):
        return self.F.shape[0]

    @property
    def n_inputs(self):
        return self.G.shape[1]

    @property
    def n_outputs(self):
        return self.H.shape[0]


@dataclass(frozen=True)
class ScalingVectors:
    """Vectors ``d, e > 0``, ``g >= 0``, ``f > 0`` certifying performance ``delta``.

    They satisfy ``F d + G f < 0``, ``H d + J f <= g``, ``F^T e + H^T g < 0``
    and ``G^T e + J^T g < delta^2 f``; ``slack`` is the optimal LP margin.
    """

    d: np.ndarray
    e: np.ndarray
    g: np.ndarray
    f: np.ndarray
    delta: float
    slack: float = field(default=0.0)

    def residuals(self, ps):
        """Left-minus-right sides of the four inequalities (all should be <= 0)."""
        F, G, H, J = ps.F, ps.G, ps.H, ps.J
        return (F @ self.d + G @ self.f,
                H @ self.d + J @ self.f - self.g,
                F.T @ self.e + H.T @ self.g,
                G.T @ self.e + J.T @ self.g - self.delta ** 2 * self.f)

    def is_valid(self, ps):
        r1, r2, r3, r4 = self.residuals(ps)
        positive = (np.all(self.d > 0) and np.all(self.e > 0) and np.all(self.f > 0)
                    and np.all(self.g >= 0))
        tol = 1e-12 * (1.0 + np.max(np.abs(np.concatenate([self.d, self.e, self.f, self.g]))))
        return bool(positive and np.all(r1 < 0) and np.all(r2 <= tol)
                    and np.all(r3 < 0) and np.all(r4 < 0))


def metzler_stability_certificate(F):
    """Return ``(d, e)`` with ``d = -F^{-1} 1`` and ``e = -F^{-T} 1``.

    Both are entrywise positive exactly when the Metzler matrix ``F`` is
    Hurwitz.  Raises :class:`NotHurwitzError` (with the spectral abscissa)
    otherwise.
    """
    F = as_matrix(F, "F")
    if not is_metzler(F):
        raise ValueError("F is not Metzler")
    alpha = spectral_abscissa(F)
    if not alpha < -HURWITZ_GUARD:
        raise NotHurwitzError(f"F is not Hurwitz (spectral abscissa {alpha:.6g})", abscissa=alpha)
    ones = np.ones(F.shape[0])
    d = -np.linalg.solve(F, ones)
    e = -np.linalg.solve(F.T, ones)
    if not (np.all(d > 0) and np.all(e > 0) and np.all(-F @ d > 0) and np.all(-F.T @ e > 0)):
        raise CertificateError("Metzler certificate failed verification (ill-conditioned F)")
    return d, e


def _require_hurwitz_metzler(F):
    alpha = spectral_abscissa(F)
    if not alpha < -HURWITZ_GUARD:
        raise NotHurwitzError(f"F is not Hurwitz (spectral abscissa {alpha:.6g})", abscissa=alpha)


def positive_hinf_norm(ps):
    """H-infinity norm of a positive system: ``sigma_max(-H F^{-1} G + J)``."""
    _require_hurwitz_metzler(ps.F)
    if ps.n_inputs == 0 or ps.n_outputs == 0:
        return 0.0
    return max_singular_value(ps.J - ps.H @ np.linalg.solve(ps.F, ps.G))


def solve_scaling_lp(ps, delta):
    """Scaling vectors certifying ``||H (sI - F)^{-1} G + J||_inf < delta``.

    The strict inequalities are written with a common slack ``t`` which is
    maximized subject to ``sum(d) + sum(e) + sum(f) <= 1`` on a rescaled
    copy of the data with ``max|F| = 1``, ``max G = 1`` and ``delta = 1``,
    so ``slack`` is scale free.  Returns ``None``
    when the optimal slack is not above :data:`LP_EPSILON` (infeasible).
    ``g`` is reset to ``H d + J f`` after the solve, which only loosens the
    other two inequalities.
    """
    _require_hurwitz_metzler(ps.F)
    if not delta > 0:
        raise ValueError("delta must be positive")
    n, ni, no = ps.n, ps.n_inputs, ps.n_outputs
    # The inequalities are invariant under diagonal state scaling
    # (F, G, H -> D^-1 F D, D^-1 G, H D), time scaling (F, G -> cF, cG),
    # input scaling (G, J, delta -> ./a) and output scaling (H, J, delta -> ./h).
    # Solve a balanced unit-scale instance and map the vectors back.
    d0, e0 = metzler_stability_certificate(ps.F)
    D = np.sqrt(d0 / e0)
    F = ps.F * D[None, :] / D[:, None]
    c = np.max(np.sqrt(d0 * e0))   # unit-size Metzler certificate after scaling
    a = np.max(c * ps.G / D[:, None], initial=0.0) or 1.0
    h = delta / a
    F, G, H, J = c * F, c * ps.G / D[:, None] / a, ps.H * D[None, :] / h, ps.J / (a * h)
    # variable layout: d | e | g | f | t
    nv = 2 * n + no + ni + 1
    sd, se, sg, sf, st = (slice(0, n), slice(n, 2 * n), slice(2 * n, 2 * n + no),
                          slice(2 * n + no, 2 * n + no + ni), nv - 1)
    rows = []

    def block(nr):
        R = np.zeros((nr, nv))
        rows.append(R)
        return R

    R = block(n)            # F d + G f + t <= 0
    R[:, sd], R[:, sf], R[:, st] = F, G, 1.0
    R = block(no)           # H d + J f - g <= 0
    R[:, sd], R[:, sf], R[:, sg] = H, J, -np.eye(no)
    R = block(n)            # F^T e + H^T g + t <= 0
    R[:, se], R[:, sg], R[:, st] = F.T, H.T, 1.0
    R = block(ni)           # G^T e + J^T g - delta^2 f + t <= 0
    R[:, se], R[:, sg], R[:, sf], R[:, st] = G.T, J.T, -np.eye(ni), 1.0
    R = block(1)            # normalization
    R[0, sd], R[0, se], R[0, sf] = 1.0, 1.0, 1.0
    A_ub = np.vstack(rows)
    b_ub = np.zeros(A_ub.shape[0])
    b_ub[-1] = 1.0
    obj = np.zeros(nv)
    obj[st] = 1.0

    res = linprog_max(obj, A_ub, b_ub)
    if not res.success:
        raise RuntimeError(f"scaling LP failed: {res.status}")
    t = res.x[st]
    if not t > LP_EPSILON:
        return None
    d, e, f = D * res.x[sd], c * h ** 2 * res.x[se] / D, res.x[sf] / a
    g = ps.H @ d + ps.J @ f
    sv = ScalingVectors(d=d, e=e, g=g, f=f, delta=float(delta), slack=float(t))
    if not sv.is_valid(ps):
        return None
    return sv


def positive_riccati_lhs(ps, P, delta):
    """Left side of the positive-system Riccati inequality at level ``delta``."""
    F, G, H, J = ps.F, ps.G, ps.H, ps.J
    R = J.T @ J - delta ** 2 * np.eye(ps.n_inputs)
    L = P @ G + H.T @ J
    return P @ F + F.T @ P + H.T @ H - L @ np.linalg.solve(R, L.T)


def diagonal_riccati_certificate(ps, sv):
    """Diagonal ``P = diag(e_i / d_i)`` solving the positive Riccati inequality.

    Raises :class:`CertificateError` carrying the residual (largest
    eigenvalue of the left side) if the inequality is not verified.
    """
    if max_singular_value(ps.J) >= sv.delta:
        raise ValueError("delta must exceed sigma_max(J)")
    P = np.diag(sv.e / sv.d)
    lhs = positive_riccati_lhs(ps, P, sv.delta)
    lhs = 0.5 * (lhs + lhs.T)
    residual = float(np.linalg.eigvalsh(lhs)[-1])
    if not residual < 0:
        raise CertificateError(f"diagonal Riccati certificate not verified (max eig {residual:.3g})",
                               residual=residual)
    return P


def lyapunov_diag_from_vectors(F, M, d, e, mode="observability"):
    """Diagonal Lyapunov solutions for positive systems from vectors ``d, e``.

    ``mode="observability"``: needs ``F d < 0`` and ``e > -F^{-T} M^T M d``
    (``M`` plays the role of ``H``); returns ``Q = diag(e/d)`` with
    ``F^T Q + Q F + M^T M < 0``.

    ``mode="controllability"``: needs ``F^T d < 0`` and ``e > -F^{-1} M M^T d``
    (``M`` plays the role of ``G``); returns ``P = diag(e/d)`` with
    ``F P + P F^T + M M^T < 0``.
    """
    F = as_matrix(F, "F")
    n = F.shape[0]
    d = np.asarray(d, dtype=float).ravel()
    e = np.asarray(e, dtype=float).ravel()
    if np.size(M) == 0:
        M = np.zeros((0, n)) if mode == "observability" else np.zeros((n, 0))
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if mode == "observability":
        W = M.T @ M
        Fx = F
    elif mode == "controllability":
        W = M @ M.T
        Fx = F.T
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not is_metzler(F):
        raise ValueError("F is not Metzler")
    problems = []
    if not np.all(d > 0):
        problems.append(f"d not positive at {np.flatnonzero(d <= 0).tolist()}")
    if not np.all(e > 0):
        problems.append(f"e not positive at {np.flatnonzero(e <= 0).tolist()}")
    bad = np.flatnonzero(Fx @ d >= 0)
    if bad.size:
        problems.append(f"{'F d' if mode == 'observability' else 'F^T d'} not negative at {bad.tolist()}")
    if not problems:
        need = -np.linalg.solve(Fx.T, W @ d)
        bad = np.flatnonzero(e <= need)
        if bad.size:
            problems.append(f"e below lower bound at {bad.tolist()}")
    if problems:
        raise ValueError("; ".join(problems))
    X = np.diag(e / d)
    lhs = Fx.T @ X + X @ Fx + W
    residual = float(np.linalg.eigvalsh(0.5 * (lhs + lhs.T))[-1])
    if not residual < 0:
        raise CertificateError(f"diagonal Lyapunov certificate not verified (max eig {residual:.3g})",
                               residual=residual)
    return X
