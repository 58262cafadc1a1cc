"""Dense linear algebra kernels.

Spectra, Lyapunov and Riccati solvers, the H-infinity norm of a
state-space realization, the logarithmic 2-norm and a fixed-step RK4
simulator for LTI systems.  Everything here is a pure function of its
arguments.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .exceptions import NotHurwitzError, RiccatiError

__all__ = [
    "HURWITZ_GUARD",
    "Spectrum",
    "as_matrix",
    "eigenvalues",
    "spectral_abscissa",
    "is_hurwitz",
    "max_singular_value",
    "solve_lyapunov",
    "solve_riccati",
    "riccati_residual",
    "hinf_norm",
    "frequency_gain",
    "log_norm_mu2",
    "static_gain",
    "simulate_lti",
]

# Guard band on the spectral abscissa used by every Hurwitz test.
HURWITZ_GUARD = 1e-10


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray

    @property
    def spectral_abscissa(self):
        return float(np.max(self.eigenvalues.real))

    def __len__(self):
        return len(self.eigenvalues)


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float array."""
    X = np.asarray(M, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        X = X.reshape(1, -1)
    elif X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} has non-finite entries")
    return X


def _square(A, name="A"):
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def eigenvalues(A):
    """Eigenvalues of a square matrix sorted by (real part, imaginary part)."""
    A = _square(A)
    lam = np.linalg.eigvals(A)
    if not np.all(np.isfinite(lam)):
        raise np.linalg.LinAlgError("eigenvalue iteration returned non-finite values")
    order = np.lexsort((lam.imag, lam.real))
    return Spectrum(lam[order])


def spectral_abscissa(A):
    return eigenvalues(A).spectral_abscissa


def is_hurwitz(A, margin=0.0):
    """True iff the spectral abscissa is below ``-margin - HURWITZ_GUARD``."""
    return spectral_abscissa(A) < -margin - HURWITZ_GUARD


def _require_hurwitz(A, what="A"):
    alpha = spectral_abscissa(A)
    if not alpha < -HURWITZ_GUARD:
        raise NotHurwitzError(f"{what} is not Hurwitz (spectral abscissa {alpha:.6g})",
                              abscissa=alpha)


def max_singular_value(A):
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(np.atleast_2d(A), 2))


def _symmetric(X):
    return 0.5 * (X + X.T)


def solve_lyapunov(A, Q):
    """Solve ``A X + X A^T + Q = 0`` for Hurwitz ``A``.

    Bartels-Stewart (via scipy) followed by up to three steps of iterative
    refinement until the max-abs residual is below ``1e-9 (1 + ||Q||)``.
    """
    A = _square(A, "A")
    Q = _square(Q, "Q")
    if A.shape != Q.shape:
        raise ValueError(f"A {A.shape} and Q {Q.shape} are incompatible")
    _require_hurwitz(A)
    Q = _symmetric(Q)
    X = _symmetric(sla.solve_continuous_lyapunov(A, -Q))
    bound = 1e-9 * (1.0 + np.linalg.norm(Q, 2))
    for _ in range(3):
        E = A @ X + X @ A.T + Q
        if np.max(np.abs(E)) <= bound:
            break
        X = _symmetric(X + sla.solve_continuous_lyapunov(A, -E))
    return X


def riccati_residual(P, A, R, Q):
    """Residual ``P A + A^T P + Q + P R P``."""
    return P @ A + A.T @ P + Q + P @ R @ P


def _riccati_bound(P, R, Q):
    return 1e-8 * (1.0 + np.linalg.norm(Q, 2) + np.linalg.norm(P, 2) ** 2 * np.linalg.norm(R, 2))


def _newton_kleinman(A, R, Q, P, max_iter=200):
    """Newton iterations on ``P A + A^T P + Q + P R P = 0`` from a stabilizing ``P``.

    Stops when the residual stagnates or is at round-off level.
    """
    n = A.shape[0]
    scale = 1.0 + np.linalg.norm(Q, 2) + np.linalg.norm(A, 2)
    best = P
    best_res = np.max(np.abs(riccati_residual(P, A, R, Q)))
    for _ in range(max_iter):
        Acl = A + R @ P
        if not spectral_abscissa(Acl) < -HURWITZ_GUARD:
            break
        E = riccati_residual(P, A, R, Q)
        dP = sla.solve_continuous_lyapunov(Acl.T, -E)
        P = _symmetric(P + dP)
        res = np.max(np.abs(riccati_residual(P, A, R, Q)))
        if not np.isfinite(res):
            break
        if res < best_res:
            best, best_res = P, res
        if res <= 1e-15 * scale * (1.0 + np.linalg.norm(P, 2)) ** 2 or \
                np.max(np.abs(dP)) <= 1e-15 * (1.0 + np.max(np.abs(P))) * n:
            break
    return best, best_res


def solve_riccati(A, R, Q):
    """Stabilizing solution of ``P A + A^T P + Q + P R P = 0``.

    ``A`` must be Hurwitz and ``R``, ``Q`` symmetric positive semidefinite.
    The returned ``P`` is the solution for which ``A + R P`` is Hurwitz,
    computed from the ordered real Schur form of the Hamiltonian

        [[A, R], [-Q, -A^T]]

    and polished by Newton-Kleinman steps.  When the Hamiltonian has
    eigenvalues on (or numerically at) the imaginary axis the Newton
    iteration started from ``P = 0`` is used instead; a ``RiccatiError``
    is raised if neither route meets the residual bound
    ``1e-8 (1 + ||Q|| + ||P||^2 ||R||)``.
    """
    A = _square(A, "A")
    R = _symmetric(_square(R, "R"))
    Q = _symmetric(_square(Q, "Q"))
    n = A.shape[0]
    if R.shape != (n, n) or Q.shape != (n, n):
        raise ValueError("A, R and Q must have the same shape")
    _require_hurwitz(A)

    if not np.any(R):
        # R = 0: Lyapunov equation A^T P + P A + Q = 0
        return solve_lyapunov(A.T, Q)

    H = np.block([[A, R], [-Q, -A.T]])
    lam = np.linalg.eigvals(H)
    hscale = np.linalg.norm(H, 1)
    near_axis = np.min(np.abs(lam.real)) <= 1e-9 * (1.0 + hscale)

    P = None
    if not near_axis:
        T, Z, sdim = sla.schur(H, output="real", sort="lhp")
        if sdim == n:
            X1, X2 = Z[:n, :n], Z[n:, :n]
            if np.linalg.cond(X1) < 1e12:
                P = _symmetric(np.linalg.solve(X1.T, X2.T).T)
    if P is None:
        P = np.zeros((n, n))

    res = np.max(np.abs(riccati_residual(P, A, R, Q)))
    if near_axis or res > 1e-12 * (1.0 + hscale) ** 2 * (1.0 + np.linalg.norm(P, 2)) ** 2:
        P, res = _newton_kleinman(A, R, Q, P)
    if not (np.isfinite(res) and res <= _riccati_bound(P, R, Q)):
        raise RiccatiError(
            "no stabilizing solution: Hamiltonian has imaginary-axis eigenvalues"
            if near_axis else f"Riccati solver did not converge (residual {res:.3g})")
    return P


def frequency_gain(A, B, C, D, omega):
    """Largest singular value of ``C (i omega I - A)^{-1} B + D`` (``D=None`` is zero)."""
    A, B, C = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (A, B, C))
    n = A.shape[0]
    G = C @ np.linalg.solve(1j * omega * np.eye(n) - A, B)
    if D is not None:
        G = G + np.asarray(D, dtype=float)
    return float(np.linalg.norm(G, 2))


def _hamiltonian_crossings(A, B, C, D, gamma):
    """Frequencies where some singular value of G(i w) may equal ``gamma``."""
    m, p = B.shape[1], C.shape[0]
    Rg = gamma * gamma * np.eye(m) - D.T @ D
    Ri = np.linalg.inv(Rg)
    Ak = A + B @ Ri @ D.T @ C
    H = np.block([[Ak, B @ Ri @ B.T],
                  [-C.T @ (np.eye(p) + D @ Ri @ D.T) @ C, -Ak.T]])
    lam = np.linalg.eigvals(H)
    tol = 1e-7 * (1.0 + np.abs(lam))
    w = np.abs(lam.imag[np.abs(lam.real) <= tol])
    return np.unique(np.round(w, 14))


def hinf_norm(A, B, C, D=None, tol=1e-8):
    """H-infinity norm of ``C (sI - A)^{-1} B + D`` for Hurwitz ``A``.

    Bisection on ``gamma`` with the imaginary-eigenvalue test of the
    Hamiltonian matrix.  Gains evaluated at detected crossing frequencies
    (and midpoints between them) lift the lower bound, so the bracket
    shrinks faster than plain halving.  The initial bracket is
    ``[max(sigma(D), sigma(D - C A^{-1} B), coarse grid), 2 * that]`` and the
    upper end is doubled until it is certified.  Returns the certified upper
    end of the final bracket, within relative ``tol`` of the norm.
    """
    A = _square(A, "A")
    B = as_matrix(B, "B")
    C = as_matrix(C, "C")
    n = A.shape[0]
    if B.shape[0] != n or C.shape[1] != n:
        raise ValueError(f"incompatible shapes A{A.shape} B{B.shape} C{C.shape}")
    if D is None or np.size(D) == 0 or np.all(np.asarray(D) == 0):
        D = np.zeros((C.shape[0], B.shape[1]))
    D = as_matrix(D, "D")
    if D.shape != (C.shape[0], B.shape[1]):
        raise ValueError(f"D has shape {D.shape}, expected {(C.shape[0], B.shape[1])}")
    _require_hurwitz(A)

    sd = max_singular_value(D)
    if not np.any(B) or not np.any(C):
        return sd

    gain = lambda w: frequency_gain(A, B, C, D, w)
    lo = max(sd, max_singular_value(D - C @ np.linalg.solve(A, B)))
    mags = np.abs(np.linalg.eigvals(A))
    grid = np.unique(np.concatenate([
        mags, np.abs(np.linalg.eigvals(A).imag),
        np.logspace(np.log10(mags.min()) - 2, np.log10(mags.max()) + 2, 40)]))
    lo = max(lo, max(gain(w) for w in grid))
    if lo == 0.0:
        lo = np.finfo(float).tiny
    hi = 2.0 * lo

    def probe(gamma):
        """Largest gain found at the crossings for ``gamma`` (0.0 if none)."""
        w = _hamiltonian_crossings(A, B, C, D, gamma)
        if w.size == 0:
            return 0.0
        cand = np.concatenate([w, 0.5 * (w[1:] + w[:-1])]) if w.size > 1 else w
        return max(gain(x) for x in cand)

    def below_norm(gamma):
        # a crossing only counts if some evaluated gain actually reaches gamma
        nonlocal lo
        g = probe(gamma)
        lo = max(lo, g)
        return g >= gamma * (1 - 1e-12)

    for _ in range(200):
        if not below_norm(hi):
            break
        hi = 2.0 * max(hi, lo)
    else:
        raise np.linalg.LinAlgError("could not bracket the H-infinity norm")

    for _ in range(500):
        if hi - lo <= tol * hi:
            break
        mid = np.sqrt(lo * hi)
        if mid <= sd:
            mid = 0.5 * (lo + hi)
        if not below_norm(mid):
            hi = mid
        hi = max(hi, lo)
    return float(hi)


def log_norm_mu2(X):
    """Logarithmic 2-norm: largest eigenvalue of ``(X + X^T) / 2``."""
    X = _square(X, "X")
    return float(np.linalg.eigvalsh(_symmetric(X))[-1])


def static_gain(F, G, H, J):
    """``sigma_max(-H F^{-1} G + J)``."""
    F = _square(F, "F")
    G, H, J = as_matrix(G, "G"), as_matrix(H, "H"), as_matrix(J, "J")
    if np.linalg.cond(F) > 1e14:
        raise np.linalg.LinAlgError("F is singular")
    return max_singular_value(J - H @ np.linalg.solve(F, G))


def _rk4_matrices(A, B, h):
    """One-step maps of classical RK4 for ``x' = A x + B u`` with ``u`` held."""
    n = A.shape[0]
    hA = h * A
    hA2 = hA @ hA
    hA3 = hA2 @ hA
    I = np.eye(n)
    Phi = I + hA + hA2 / 2 + hA3 / 6 + hA3 @ hA / 24
    Gam = h * (I + hA / 2 + hA2 / 6 + hA3 / 24) @ B
    return Phi, Gam


def simulate_lti(A, B, x0, inputs=None, step=1e-3, horizon=1.0):
    """Classical 4th-order Runge-Kutta trajectory of ``x' = A x + B u``.

    Parameters
    ----------
    A, B : array_like
        State and input matrices.
    x0 : array_like
        Initial state.
    inputs : None, array_like or callable
        ``None`` means ``u = 0``.  An array of shape ``(n_steps + 1, m)``
        (or ``(n_steps, m)``) holds samples at the grid times, held
        constant over each step.  A callable ``u(t)`` is evaluated at the
        RK4 stage times.
    step, horizon : float
        ``step`` must divide ``horizon``.

    Returns
    -------
    times : ndarray, shape (n_steps + 1,)
    states : ndarray, shape (n_steps + 1, n)
    """
    A = _square(A, "A")
    n = A.shape[0]
    B = np.zeros((n, 1)) if B is None else as_matrix(B, "B")
    if B.shape[0] != n:
        raise ValueError(f"B has {B.shape[0]} rows, expected {n}")
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.size != n:
        raise ValueError(f"x0 has length {x0.size}, expected {n}")
    if not (step > 0 and horizon > 0):
        raise ValueError("step and horizon must be positive")
    n_steps = int(round(horizon / step))
    if n_steps < 1 or abs(n_steps * step - horizon) > 1e-9 * horizon:
        raise ValueError(f"step {step} does not divide horizon {horizon}")
    h = horizon / n_steps
    times = h * np.arange(n_steps + 1)
    X = np.empty((n_steps + 1, n))
    X[0] = x0
    m = B.shape[1]

    if callable(inputs):
        u = lambda t: np.asarray(inputs(t), dtype=float).reshape(m)
        f = lambda t, x: A @ x + B @ u(t)
        x = x0
        for k in range(n_steps):
            t = times[k]
            k1 = f(t, x)
            k2 = f(t + h / 2, x + h / 2 * k1)
            k3 = f(t + h / 2, x + h / 2 * k2)
            k4 = f(t + h, x + h * k3)
            x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            X[k + 1] = x
        return times, X

    Phi, Gam = _rk4_matrices(A, B, h)
    if inputs is None:
        U = None
    else:
        U = np.asarray(inputs, dtype=float)
        if U.ndim == 1:
            U = U.reshape(-1, 1) if m == 1 else U.reshape(1, -1)
        if U.shape[1] != m or U.shape[0] < n_steps:
            raise ValueError(f"inputs must have shape ({n_steps + 1}, {m}), got {U.shape}")
    x = x0
    for k in range(n_steps):
        x = Phi @ x if U is None else Phi @ x + Gam @ U[k]
        X[k + 1] = x
    return times, X
