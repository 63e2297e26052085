"""The modified-measure kernel, its determinant, and the second moments.

The modified Gaussian measure over a record of N increments has the
real symmetric Toeplitz kernel

    M_{kl} = delta_{kl} - kappa dt e^{-2 kappa dt |k-l|},

positive definite in the working regime kappa dt < 1.  Its inverse
fixes the increment correlations <dw_k* dw_l> = dt (M^-1)_{kl}, its
determinant the path-weight normalization, and quadratic forms in
M^-1 the three nonzero second moments (n, m, q) of the endpoint phase
points.  The same moments solve a closed Riccati system in continuous
time, which this module integrates and also evaluates in closed form.
"""

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

__all__ = [
    "RegimeError",
    "Kernel",
    "MomentTriple",
    "build_kernel",
    "direct_moments",
    "recursive_determinant",
    "riccati_integrate",
    "analytic_moments",
    "analytic_sum_difference",
    "analytic_determinant",
]


class RegimeError(ValueError):
    """Kernel parameters outside the positive-definite working regime."""


class MomentTriple(NamedTuple):
    """Second moments n = <|nu|^2>, m = <|mu|^2>, q = Re<nu* mu>."""

    n: float
    m: float
    q: float


@dataclass(frozen=True)
class Kernel:
    """The N x N modified-measure kernel and its parameters."""

    N: int
    dt: float
    kappa: float
    matrix: np.ndarray


def build_kernel(N, dt, kappa):
    """Assemble M_{kl} = delta_{kl} - kappa dt e^{-2 kappa dt |k-l|}.

    Raises RegimeError for kappa dt >= 0.5 (positivity margin) and
    warns above 0.1, where continuum-limit fidelity starts to degrade.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    if dt <= 0 or kappa < 0:
        raise ValueError("need dt > 0 and kappa >= 0")
    kdt = kappa * dt
    if kdt >= 0.5:
        raise RegimeError(f"kappa*dt = {kdt:.3g} outside working regime (< 0.5)")
    if kdt > 0.1:
        warnings.warn(f"kappa*dt = {kdt:.3g} > 0.1: coarse time step degrades "
                      "the continuum limit", stacklevel=2)
    k = np.arange(N)
    matrix = np.eye(N) - kdt * np.exp(-2 * kdt * np.abs(k[:, None] - k[None, :]))
    return Kernel(N=N, dt=dt, kappa=kappa, matrix=matrix)


def _load_vectors(kernel):
    """Discrete load vectors weighting recent and early increments."""
    k = np.arange(kernel.N)
    decay = 2 * kernel.kappa * kernel.dt
    u_recent = np.exp(-decay * (kernel.N - 1 - k))
    u_early = np.exp(-decay * k)
    return u_recent, u_early


def direct_moments(kernel):
    """Second moments (n, m, q) as quadratic forms in the kernel inverse.

    n = kappa dt <u+|M^-1|u+>, m likewise with the early-weighted load,
    q mixed; computed with a Cholesky factor and triangular solves, not
    an explicit inverse.
    """
    if kernel.N == 0:
        return MomentTriple(0.0, 0.0, 0.0)
    u_recent, u_early = _load_vectors(kernel)
    try:
        factor = scipy.linalg.cho_factor(kernel.matrix, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise RegimeError("kernel is not positive definite") from exc
    loads = np.column_stack([u_recent, u_early])
    solved = scipy.linalg.cho_solve(factor, loads)
    kdt = kernel.kappa * kernel.dt
    n = kdt * (u_recent @ solved[:, 0])
    m = kdt * (u_early @ solved[:, 1])
    q = kdt * (u_recent @ solved[:, 1])
    return MomentTriple(n, m, q)


def recursive_determinant(N, dt, kappa):
    """Determinants of all leading kernel blocks by Schur complements.

    Growing the kernel by one increment appends a column
    b_j = -kappa dt e^{-2 kappa dt (k - j)} and a diagonal 1 - kappa dt;
    the determinant advances by the Schur complement
    s = (1 - kappa dt) - b^T M_k^-1 b = 1 - kappa dt (1 + n_k),
    and the block inverse is updated exactly alongside.  Returns the
    N+1 values det M_0 (= 1) through det M_N.
    """
    kdt = kappa * dt
    if kdt >= 0.5:
        raise RegimeError(f"kappa*dt = {kdt:.3g} outside working regime (< 0.5)")
    dets = np.empty(N + 1)
    dets[0] = 1.0
    if N == 0:
        return dets
    inv = np.empty((N, N))
    inv[0, 0] = 1 / (1 - kdt)
    dets[1] = 1 - kdt
    decay = np.exp(-2 * kdt)
    for k in range(1, N):
        b = -kdt * decay ** np.arange(k, 0, -1)
        y = inv[:k, :k] @ b
        s = (1 - kdt) - b @ y
        if s <= 0:
            raise RegimeError("Schur complement lost positivity")
        dets[k + 1] = dets[k] * s
        inv[:k, :k] += np.outer(y, y) / s
        inv[:k, k] = -y / s
        inv[k, :k] = -y / s
        inv[k, k] = 1 / s
    return dets


def riccati_integrate(kappa, T, steps):
    """Integrate the coupled moment Riccati system with classical RK4.

        dn/dt = kappa (1 - n)^2
        dm/dt = kappa (q + e^{-2 kappa t})^2
        dq/dt = kappa (-q (1 - n) + e^{-2 kappa t} (1 + n))

    from (0, 0, 0) at t = 0.  Returns (times, n, m, q) arrays of
    length steps + 1.  Use at least ~100 steps per unit kappa*T.
    """
    if steps < 1:
        raise ValueError("need at least one step")
    h = T / steps
    times = h * np.arange(steps + 1)

    def rhs(t, y):
        n, m, q = y
        e = np.exp(-2 * kappa * t)
        return np.array([
            kappa * (1 - n) ** 2,
            kappa * (q + e) ** 2,
            kappa * (-q * (1 - n) + e * (1 + n)),
        ])

    out = np.zeros((steps + 1, 3))
    y = np.zeros(3)
    for i in range(steps):
        t = times[i]
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = y
    return times, out[:, 0], out[:, 1], out[:, 2]


def analytic_moments(kT):
    """Closed-form moments n = m = kT/(1+kT), q = 1/(1+kT) - e^{-2kT}."""
    kT = np.asarray(kT, dtype=float)
    n = kT / (1 + kT)
    q = 1 / (1 + kT) - np.exp(-2 * kT)
    if kT.ndim == 0:
        return MomentTriple(float(n), float(n), float(q))
    return MomentTriple(n, n.copy(), q)


def analytic_sum_difference(kT):
    """Closed forms of (n + q, n - q), the sum/difference-variable moments.

    n + q = 2 e^{-kT} sinh kT and
    n - q = 2 e^{-kT} cosh kT (kT - tanh kT)/(1 + kT), showing the
    slow cubic growth of the difference variable at early times.
    """
    kT = np.asarray(kT, dtype=float)
    plus = 2 * np.exp(-kT) * np.sinh(kT)
    minus = 2 * np.exp(-kT) * np.cosh(kT) * (kT - np.tanh(kT)) / (1 + kT)
    return plus, minus


def analytic_determinant(kT):
    """Closed-form continuum kernel determinant e^{-2kT}(1 + kT)."""
    kT = np.asarray(kT, dtype=float)
    return np.exp(-2 * kT) * (1 + kT)
