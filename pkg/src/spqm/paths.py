"""Wiener paths and the stochastic flow they drive on the group.

The measurement record is a sequence of complex increments
dw = (dW^q + i dW^p)/sqrt(2) with <|dw|^2> = dt under the plain Wiener
measure.  This module draws such records (plain and modified measure),
integrates the resulting SDEs in either chart, evaluates the
stochastic-integral closed forms for the endpoint, and forms the
time-ordered Kraus product in a truncated Fock representation.

Increment arrays may carry leading batch axes: shape (..., N) with the
step index last.  All closed forms broadcast over the batch.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import fock, group

__all__ = [
    "WienerPath",
    "Trajectory",
    "sample_wiener",
    "sample_modified",
    "propagate_sde",
    "closed_form_hc",
    "closed_form_cartan",
    "kraus_time_ordered",
    "refine_path",
]


@dataclass(frozen=True)
class WienerPath:
    """A discretized measurement record.

    Attributes
    ----------
    dt : float
        Time step, > 0.
    kappa : float
        Measurement rate, > 0.
    increments : ndarray
        Complex array of shape (..., N); leading axes index a batch of
        independent paths.
    """

    dt: float
    kappa: float
    increments: np.ndarray

    def __post_init__(self):
        if self.dt <= 0 or self.kappa <= 0:
            raise ValueError("dt and kappa must be positive")

    @property
    def n_steps(self):
        return self.increments.shape[-1]

    @property
    def t_final(self):
        return self.n_steps * self.dt


@dataclass(frozen=True)
class Trajectory:
    """Coordinates along a single simulated path.

    `times` has length N+1 (HC chart, starting at the identity) or N
    (Cartan chart, starting at t = dt where the chart is regular).
    `hc` and `cartan` are parallel lists of coordinate objects; only the
    chart that was integrated is populated.
    """

    times: np.ndarray
    hc: list | None = None
    cartan: list | None = None


def _rng(seed, stream=0):
    return np.random.default_rng(np.random.SeedSequence([seed, stream]))


def sample_wiener(N, dt, kappa, seed, n_paths=None, stream=0):
    """Draw plain-measure increments dw = (dW^q + i dW^p)/sqrt(2).

    Deterministic for a given (seed, stream); `stream` selects an
    independent substream so that chunked Monte Carlo stays
    reproducible under any chunking.
    """
    if N < 1:
        raise ValueError("need at least one increment")
    rng = _rng(seed, stream)
    shape = (N,) if n_paths is None else (n_paths, N)
    scale = np.sqrt(dt / 2)
    dw = rng.normal(scale=scale, size=shape) + 1j * rng.normal(scale=scale,
                                                               size=shape)
    return WienerPath(dt=dt, kappa=kappa, increments=dw)


def sample_modified(N, dt, kappa, seed, n_paths=None, stream=0):
    """Draw increments under the modified (correlated) Gaussian measure.

    The real and imaginary increment vectors each carry covariance
    (dt/2) M^-1, so <dw_k* dw_l> = dt (M^-1)_{kl} with M the
    exponential-Toeplitz kernel of `moments.build_kernel`.  Sampling
    goes through the Cholesky factor of M itself: if M = L L^T then
    x = sqrt(dt/2) L^-T z has the required covariance.
    """
    from . import moments

    kernel = moments.build_kernel(N, dt, kappa)
    try:
        chol = scipy.linalg.cholesky(kernel.matrix, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise fock.NumericalDomainError(
            "modified-measure kernel is not positive definite") from exc
    rng = _rng(seed, stream)
    cols = 1 if n_paths is None else n_paths
    z = rng.normal(size=(N, cols)) + 1j * rng.normal(size=(N, cols))
    x = scipy.linalg.solve_triangular(chol.T, z, lower=False)
    dw = (np.sqrt(dt / 2) * x).T
    if n_paths is None:
        dw = dw[0]
    return WienerPath(dt=dt, kappa=kappa, increments=dw)


def propagate_sde(path, chart="hc"):
    """Integrate the measurement SDEs along a single path.

    The HC chart iterates the exact one-increment recursion
    (`group.increment_left_multiply`), keeping the literal |dw|^2 term
    in the center.  The Cartan chart is seeded at t = dt by transforming
    the exact one-step HC state (the chart is singular at t = 0) and
    then advanced with discretely consistent kernels: the singular
    csch/coth coefficients of the continuum SDEs are replaced by their
    exact one-increment counterparts, which agree with the continuum
    forms to O(dt) at fixed t but stay finite and consistent through the
    early steps where 2 kappa t is itself O(dt).  A naive Euler scheme
    with step-start coefficients accumulates an O(1) endpoint error in
    ell from that region no matter how small dt is.
    """
    dw = np.asarray(path.increments)
    if dw.ndim != 1:
        raise ValueError("propagate_sde integrates one path at a time")
    kappa, dt = path.kappa, path.dt
    N = dw.shape[0]
    if chart == "hc":
        x = group.HCCoords.identity()
        states = [x]
        for k in range(N):
            x = group.increment_left_multiply(x, dw[k], kappa, dt)
            states.append(x)
        return Trajectory(times=dt * np.arange(N + 1), hc=states)
    if chart != "cartan":
        raise ValueError(f"unknown chart {chart!r}")

    y = group.hc_to_cartan(group.increment_left_multiply(
        group.HCCoords.identity(), dw[0], kappa, dt))
    beta, phi, r, ell, alpha = y.beta, y.phi, y.r, y.ell, y.alpha
    states = [y]
    d = np.exp(-2 * kappa * dt)
    for k in range(1, N):
        r_next = r + 2 * kappa * dt
        root = np.sqrt(kappa) * dw[k]
        sinh_r, sinh_next = np.sinh(r), np.sinh(r_next)
        u, v = np.exp(-r), np.exp(-r_next)

        beta_next = (beta * sinh_r / sinh_next
                     + root * (np.exp(r_next) + u) / (2 * sinh_next))
        alpha_next = (alpha - beta * np.sinh(2 * kappa * dt) / sinh_next
                      + root * (np.exp(2 * kappa * dt) + 1) / (2 * sinh_next))

        # The singular continuum kernels coth/csch(2 kappa t) appear in
        # the center increments through these discrete counterparts,
        # written in the phase-plane difference variables p = nu + mu,
        # m = nu - mu of the equivalent HC point.
        nu = beta - u * alpha
        mu = alpha - u * beta
        plus, minus = nu + mu, nu - mu
        plus_next = plus - (1 - d) * nu
        minus_next = minus - (1 - d) * nu
        coth_disc = (u + v) ** 2 / (2 * (1 - v ** 2)) + 1
        b_noise = ((1 + u) * plus_next / (4 * (1 - v))
                   + (1 - u) * minus_next / (4 * (1 + v)) + nu / 2)
        drift = (np.abs(plus_next) ** 2 / (4 * (1 - v))
                 - np.abs(plus) ** 2 / (4 * (1 - u))
                 + np.abs(minus_next) ** 2 / (4 * (1 + v))
                 - np.abs(minus) ** 2 / (4 * (1 + u)))
        d_ell = -(coth_disc * kappa * np.abs(dw[k]) ** 2 + drift
                  + 2 * np.real(np.conj(b_noise) * root))
        d_phi = (np.imag(nu * np.conj(root)) * (1 + d * u / (2 * sinh_next))
                 - np.imag(mu * np.conj(root)) / (2 * sinh_next)
                 - np.imag(np.conj(nu) * mu) * (d / (2 * sinh_next)
                                                - 1 / (2 * sinh_r)))
        beta, alpha = beta_next, alpha_next
        ell = ell + d_ell
        phi = phi + d_phi
        r = r_next
        states.append(group.CartanCoords(beta=beta, phi=phi, r=r, ell=ell,
                                         alpha=alpha))
    return Trajectory(times=dt * np.arange(1, N + 1), cartan=states)


def closed_form_hc(path):
    """Endpoint HC coordinates as explicit stochastic-integral sums.

    nu is the Ornstein-Uhlenbeck sum weighting recent increments, mu
    the heterodyne-style sum weighting early increments, and z a
    quadratic functional of the record:

        nu_N = sum_k sqrt(kappa) dw_k e^{-2 kappa dt (N-1-k)}
        mu_N = sum_k sqrt(kappa) dw_k e^{-2 kappa dt k}
        z_N  = sum_k (kappa/2)|dw_k|^2
               + kappa sum_{k>l} dw_k* dw_l e^{-2 kappa dt (k-l-1)}

    The exponents carry the one-increment offsets of the exact discrete
    recursion, so the result equals the iterated
    `group.increment_left_multiply` to floating-point accuracy, not
    just to O(dt).  Broadcasts over batch axes of the increments.
    """
    dw = np.asarray(path.increments)
    kappa, dt = path.kappa, path.dt
    N = dw.shape[-1]
    k = np.arange(N)
    root = np.sqrt(kappa)
    decay = 2 * kappa * dt

    nu = root * np.sum(dw * np.exp(-decay * (N - 1 - k)), axis=-1)
    mu = root * np.sum(dw * np.exp(-decay * k), axis=-1)

    # Off-diagonal double sum via a running sum: the inner factor
    # sum_{l<k} dw_l e^{-decay (k-1-l)} is the pre-step value of nu.
    grow = np.cumsum(dw * np.exp(decay * k), axis=-1)
    inner = np.zeros_like(dw)
    inner[..., 1:] = grow[..., :-1] * np.exp(-decay * (k[1:] - 1))
    z = (0.5 * kappa * np.sum(np.abs(dw) ** 2, axis=-1)
         + kappa * np.sum(np.conj(dw) * inner, axis=-1))
    return group.HCCoords(nu=nu, r=decay * N, z=z, mu=mu)


def closed_form_cartan(path):
    """Endpoint Cartan coordinates as stochastic-integral sums.

    beta and alpha are the sinh-kernel combinations of the HC sums
    (recent/early increments weighted by cosh-type kernels), and the
    center follows from the gauge functions: ell = s - f, phi = psi - xi.
    Agrees with hc_to_cartan(closed_form_hc(path)) to floating-point
    accuracy; requires at least one step (the chart is singular at T=0).
    """
    dw = np.asarray(path.increments)
    kappa, dt = path.kappa, path.dt
    N = dw.shape[-1]
    k = np.arange(N)
    r = 2 * kappa * dt * N
    denom = 2 * np.sinh(r)
    root = np.sqrt(kappa)
    w_recent = np.exp(-2 * kappa * dt * (N - 1 - k))
    w_early = np.exp(-2 * kappa * dt * k)
    beta = root * np.sum(dw * (np.exp(r) * w_recent + w_early), axis=-1) / denom
    alpha = root * np.sum(dw * (np.exp(r) * w_early + w_recent), axis=-1) / denom

    hc = closed_form_hc(path)
    f, xi = group.gauge_functions(hc)
    return group.CartanCoords(beta=beta, phi=hc.psi - xi, r=r,
                              ell=hc.s - f, alpha=alpha)


def kraus_time_ordered(path, dim):
    """Time-ordered product of one-increment Kraus factors.

    Each factor is exp(-Ho 2 kappa dt + a sqrt(kappa) dw* +
    a_dag sqrt(kappa) dw); the latest factor stands leftmost.  As
    dt -> 0 at fixed record the product converges (at order sqrt(dt))
    to represent(closed_form_hc(path)).

    The truncation should keep the state support interior; as a
    guideline dim >= 8 (1 + max(|nu_t|, |mu_t|))^2.
    """
    dw = np.asarray(path.increments)
    if dw.ndim != 1:
        raise ValueError("kraus_time_ordered takes one path at a time")
    ops = fock.canonical_operators(dim)
    kappa, dt = path.kappa, path.dt
    root = np.sqrt(kappa)
    product = np.eye(dim, dtype=complex)
    drift = -2 * kappa * dt * ops.h_osc
    for w in dw:
        generator = drift + ops.a * (root * np.conj(w)) + ops.a_dag * (root * w)
        product = fock.matrix_exponential(generator) @ product
        if not np.all(np.isfinite(product)):
            raise fock.NumericalDomainError("Kraus product overflowed")
    return product


def refine_path(path, factor, seed):
    """Split each increment into `factor` conditioned sub-increments.

    Brownian-bridge refinement: within each original step the
    sub-increments are i.i.d. Gaussians re-centered so that they sum
    exactly to the original dw.  The refined path lives on the same
    Brownian record, which makes fixed-record convergence checks
    (dt vs dt/factor) meaningful.
    """
    if factor < 2:
        raise ValueError("refinement factor must be at least 2")
    dw = np.asarray(path.increments)
    dt_fine = path.dt / factor
    rng = _rng(seed, stream=1)
    shape = dw.shape + (factor,)
    scale = np.sqrt(dt_fine / 2)
    g = rng.normal(scale=scale, size=shape) + 1j * rng.normal(scale=scale,
                                                              size=shape)
    g = g - g.mean(axis=-1, keepdims=True) + dw[..., None] / factor
    fine = g.reshape(dw.shape[:-1] + (dw.shape[-1] * factor,))
    return WienerPath(dt=dt_fine, kappa=path.kappa, increments=fine)
