"""End-to-end verification suite.

Each check exercises one headline identity of the library at fixed
parameters and tolerances and reports pass/fail with a short detail
string.  The suite is deterministic: every Monte Carlo check derives
its randomness from a fixed seed.  `run_all` executes everything
(about two to four minutes); the CLI `verify` subcommand and the
acceptance tests both drive this module.
"""

import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import dists, fock, group, moments, paths, povm

__all__ = ["CheckResult", "CHECKS", "run_all", "format_report"]


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float


def _random_coset(rng, r):
    scale = 1.0
    beta = (rng.normal(scale=scale) + 1j * rng.normal(scale=scale))
    alpha = (rng.normal(scale=scale) + 1j * rng.normal(scale=scale))
    return dists.ReducedPoint(r=r, beta=beta, alpha=alpha)


def check_direct_moments():
    """Kernel quadratic forms reproduce (n, m, q) at kT=1, order-dt."""
    target = np.array([0.5, 0.5, 0.364665])
    errors = {}
    for dt in (1e-3, 5e-4):
        kernel = moments.build_kernel(int(round(1 / dt)), dt, 1.0)
        triple = np.array(moments.direct_moments(kernel))
        errors[dt] = np.max(np.abs(triple - target))
    ratio = errors[1e-3] / errors[5e-4]
    passed = errors[1e-3] <= 5e-3 and 1.5 <= ratio <= 2.6
    return passed, (f"max error {errors[1e-3]:.2e} at dt=1e-3 (tol 5e-3), "
                    f"halving ratio {ratio:.2f} (want ~2)")


def check_riccati():
    """RK4 matches the closed-form moment solutions over kT in [0, 5]."""
    times, n, m, q = moments.riccati_integrate(1.0, 5.0, 5000)
    ref = moments.analytic_moments(times)
    err = max(np.max(np.abs(n - ref.n)), np.max(np.abs(m - ref.m)),
              np.max(np.abs(q - ref.q)))
    return err <= 1e-8, f"max error {err:.2e} over kT in [0,5] (tol 1e-8)"


def check_determinant():
    """Schur-complement determinants vs dense and closed form at kT=1."""
    N, dt = 1000, 1e-3
    dets = moments.recursive_determinant(N, dt, 1.0)
    kernel = moments.build_kernel(N, dt, 1.0)
    sign, logdet = np.linalg.slogdet(kernel.matrix)
    dense = sign * np.exp(logdet)
    rel_dense = abs(dets[-1] - dense) / abs(dense)
    closed = float(moments.analytic_determinant(1.0))
    rel_closed = abs(dets[-1] - closed) / closed
    passed = rel_dense <= 1e-10 and rel_closed <= 5e-3
    return passed, (f"vs dense {rel_dense:.2e} (tol 1e-10), "
                    f"vs closed form {rel_closed:.2e} (tol 5e-3)")


def check_persymmetry():
    """n = m and anti-diagonal symmetry of the kernel inverse at N=2000."""
    kernel = moments.build_kernel(2000, 1e-3, 1.0)
    triple = moments.direct_moments(kernel)
    inv = scipy.linalg.cho_solve(
        scipy.linalg.cho_factor(kernel.matrix, lower=True), np.eye(2000))
    persym = np.max(np.abs(inv - inv[::-1, ::-1].T))
    passed = abs(triple.n - triple.m) <= 1e-12 and persym <= 1e-12
    return passed, (f"|n-m| = {abs(triple.n - triple.m):.2e}, "
                    f"persymmetry defect {persym:.2e} (tol 1e-12)")


def check_recursion_vs_sums():
    """Iterated one-step recursion equals the stochastic-integral sums."""
    n_paths, N, dt = 1000, 1000, 1e-3
    batch = paths.sample_wiener(N, dt, 1.0, seed=20230, n_paths=n_paths)
    dw = batch.increments
    x = group.HCCoords(nu=np.zeros(n_paths, complex), r=0.0,
                       z=np.zeros(n_paths, complex),
                       mu=np.zeros(n_paths, complex))
    for k in range(N):
        x = group.increment_left_multiply(x, dw[:, k], 1.0, dt)
    closed = paths.closed_form_hc(batch)
    err = max(np.max(np.abs(x.nu - closed.nu)),
              np.max(np.abs(x.mu - closed.mu)),
              np.max(np.abs(x.z - closed.z)))
    return err <= 1e-10, f"max per-path deviation {err:.2e} (tol 1e-10)"


def check_cross_chart():
    """Cartan-integrated SDE matches the transformed HC trajectory."""
    dt, N = 1e-3, 2000  # kT = 2
    tol = 10 * dt
    worst = 0.0
    for seed in (11, 12, 13):
        path = paths.sample_wiener(N, dt, 1.0, seed=seed)
        hc_end = paths.propagate_sde(path, chart="hc").hc[-1]
        ref = group.hc_to_cartan(hc_end)
        got = paths.propagate_sde(path, chart="cartan").cartan[-1]
        f, _ = group.gauge_functions(hc_end)
        errs = [abs(got.beta - ref.beta), abs(got.alpha - ref.alpha),
                abs(got.ell - ref.ell), abs(got.phi - ref.phi),
                abs(got.ell - (hc_end.s - f))]
        worst = max(worst, max(errs))
    return worst <= tol, f"worst endpoint error {worst:.2e} (tol {tol:.0e})"


def check_plain_isometry():
    """Plain-measure MC second moments match the Ito-isometry values."""
    kw = dict(n_paths=100_000, N=1000, dt=1e-3, kappa=1.0, seed=77,
              chunk=10000)
    nu2 = dists.feynman_kac_estimate("plain", "none", "nu_abs2", **kw)
    numu = dists.feynman_kac_estimate("plain", "none", "numu_real", **kw)
    t_nu2, t_numu = (1 - np.exp(-4)) / 4, np.exp(-2)
    d1, d2 = abs(nu2.mean - t_nu2), abs(numu.mean - t_numu)
    passed = d1 <= 3 * nu2.stderr and d2 <= 3 * numu.stderr
    return passed, (f"<|nu|^2> off by {d1:.1e} (3SE {3 * nu2.stderr:.1e}); "
                    f"<nu*mu> off by {d2:.1e} (3SE {3 * numu.stderr:.1e})")


def check_modified_measure():
    """Modified-measure increments carry covariance dt M^-1; n hits 1/2."""
    # Increment covariance at N=200, dt=0.01.
    N, dt, n_paths = 200, 0.01, 100_000
    kernel = moments.build_kernel(N, dt, 1.0)
    expected = dt * scipy.linalg.cho_solve(
        scipy.linalg.cho_factor(kernel.matrix, lower=True), np.eye(N))
    acc = np.zeros((N, N), dtype=complex)
    mean = np.zeros(N, dtype=complex)
    chunk, stream = 20000, 0
    for start in range(0, n_paths, chunk):
        dw = paths.sample_modified(N, dt, 1.0, seed=88, n_paths=chunk,
                                   stream=stream).increments
        acc += dw.conj().T @ dw
        mean += dw.sum(axis=0)
        stream += 1
    mean /= n_paths
    cov = acc / n_paths - np.outer(mean.conj(), mean)
    # Entrywise tolerance relative to the largest entry of dt M^-1; the
    # far off-diagonal entries are orders of magnitude below the Monte
    # Carlo floor, so a per-entry relative test would be vacuous there.
    cov_err = np.max(np.abs(cov - expected)) / np.max(np.abs(expected))

    # Endpoint moment at kT = 1.
    est = dists.feynman_kac_estimate("modified", "none", "nu_abs2",
                                     n_paths=100_000, N=1000, dt=1e-3,
                                     kappa=1.0, seed=89, chunk=10000)
    d = abs(est.mean - 0.5)
    passed = cov_err <= 0.05 and d <= 3 * est.stderr
    return passed, (f"covariance error {cov_err:.3f} of max entry (tol 0.05); "
                    f"<|nu|^2> off by {d:.1e} (3SE {3 * est.stderr:.1e})")


def check_feynman_kac():
    """Weighted path average reproduces the total normalization.

    E[e^{-2s}] over the plain Wiener measure equals N(kT): the weight
    e^{-2s} is a Gaussian functional of the record whose expectation is
    the reciprocal kernel determinant.  (Jensen gives the sanity bound
    E[e^{-2s}] >= e^{-2 E[s]} = e^{kT} > 1, so the target sits above 1.)
    """
    est = dists.feynman_kac_estimate("plain", "exp_neg_2s", "one",
                                     n_paths=100_000, N=50, dt=1e-2,
                                     kappa=1.0, seed=99, chunk=50000)
    target = dists.normalization_factor(0.5)
    d = abs(est.mean - target)
    passed = d <= 3 * est.stderr
    return passed, (f"E[e^(-2s)] off by {d:.1e} (3SE {3 * est.stderr:.1e}, "
                    f"ESS {est.ess:.0f})")


def check_gauge_relation():
    """C = e^{2f} B pointwise on random cosets at three times."""
    rng = np.random.default_rng(123)
    worst = 0.0
    for kT in (0.2, 1.0, 5.0):
        for _ in range(1000):
            point = _random_coset(rng, r=2 * kT)
            worst = max(worst, dists.gauge_relation_residual(point, kT))
    return worst <= 1e-12, f"worst relative residual {worst:.2e} (tol 1e-12)"


def check_sigma_width():
    """Sigma value, growth-rate ODE, and small-time cubic behavior."""
    v1 = abs(dists.sigma_width(1.0) - 0.2384058)
    ts = np.linspace(0.05, 3.0, 60)
    h = 1e-4
    fd = (dists.sigma_width(ts + h) - dists.sigma_width(ts - h)) / (2 * h)
    v2 = np.max(np.abs(fd - dists.sigma_width_rate(ts)))
    v3 = abs(dists.sigma_width(0.1) / (0.1 ** 3 / 3) - 1)
    passed = v1 <= 1e-6 and v2 <= 1e-6 and v3 <= 0.02
    return passed, (f"Sigma(1) off by {v1:.1e}; dSigma/dt off by {v2:.1e} "
                    f"(tol 1e-6); cubic law off by {v3:.1%} (tol 2%)")


def check_partition_function():
    """tr e^{-4kT Ho} 2 sinh 2kT = 1 at dim 60."""
    worst = 0.0
    for kT in (0.5, 1.0, 2.0):
        worst = max(worst, povm.partition_function_check(kT, 60)["residual"])
    return worst <= 1e-10, f"worst residual {worst:.2e} (tol 1e-10)"


def check_completeness():
    """Phase-space completeness integral hits the identity at dim 16."""
    dev = povm.completeness_quadrature(1.0, 16, radial_nodes=40,
                                       angular_nodes=64)
    return dev <= 1e-3, f"top-block deviation {dev:.2e} (tol 1e-3)"


def check_channel():
    """MC Kraus average matches the dense channel exponential at dim 8."""
    dim = 8
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    report = povm.channel_monte_carlo(rho, kT=0.3, n_paths=20_000, dt=1e-3,
                                      dim=dim, seed=314)
    trace_dev = abs(report.trace_mean - 1.0)
    passed = (report.trace_distance <= 0.02
              and trace_dev <= 3 * report.trace_stderr)
    return passed, (f"trace distance {report.trace_distance:.3f} (tol 0.02); "
                    f"trace off by {trace_dev:.1e} "
                    f"(3SE {3 * report.trace_stderr:.1e})")


def _kraus_error(path, dim):
    product = paths.kraus_time_ordered(path, dim)
    reference = group.represent(paths.closed_form_hc(path), dim)
    diff = fock.interior_block(product - reference)
    return np.linalg.norm(diff) / np.linalg.norm(fock.interior_block(reference))


def check_kraus_product():
    """Time-ordered product converges to the closed-form representation.

    The error must shrink by at least 2x under dt -> dt/4 (half-order
    convergence would give exactly 2x).  Measured behavior is in fact
    first order -- ratio 4.0, stable across seeds and across a further
    dt/4 -> dt/16 refinement -- because the per-step coordinate defects
    of the discrete recursion are deterministic O(dt) multiples of the
    increments rather than fluctuating O(dt^{3/2}) terms, so the
    product beats the generic sqrt(dt) strong-convergence rate here.
    """
    dim = 24
    path = paths.sample_wiener(500, 1e-3, 1.0, seed=555)
    coarse = _kraus_error(path, dim)
    fine = _kraus_error(paths.refine_path(path, 4, seed=556), dim)
    ratio = coarse / fine
    passed = coarse <= 0.05 and ratio >= 2.0
    return passed, (f"relative error {coarse:.2e} at dt=1e-3 (tol 0.05), "
                    f"dt -> dt/4 error ratio {ratio:.2f} "
                    "(want >= 2; ~4 = first order)")


def check_frame_derivatives():
    """All 14 frame directions match their analytic generators."""
    dim = 24
    rng = np.random.default_rng(246)
    worst = -np.inf
    for _ in range(10):
        r = rng.uniform(0.3, 1.5)
        x = group.HCCoords(
            nu=0.4 * (rng.normal() + 1j * rng.normal()), r=r,
            z=0.3 * (rng.normal() + 1j * rng.normal()),
            mu=0.4 * (rng.normal() + 1j * rng.normal()))
        y = group.CartanCoords(
            beta=0.4 * (rng.normal() + 1j * rng.normal()),
            phi=rng.normal(), r=rng.uniform(0.3, 1.5), ell=0.3 * rng.normal(),
            alpha=0.4 * (rng.normal() + 1j * rng.normal()))
        for point, directions in ((x, group.HC_DIRECTIONS),
                                  (y, group.CARTAN_DIRECTIONS)):
            scale = np.linalg.norm(
                fock.interior_block(group.represent(point, dim)))
            for direction in directions:
                res = group.frame_derivative_residual(point, dim, direction)
                worst = max(worst, res / scale)
    return worst <= 1e-6, f"worst residual {worst:.2e} of ||R|| (tol 1e-6)"


def check_haar_jacobian():
    """Chart-transform Jacobian ties the two Haar densities together."""
    rng = np.random.default_rng(369)
    worst = 0.0
    for _ in range(20):
        x = group.HCCoords(
            nu=0.5 * (rng.normal() + 1j * rng.normal()),
            r=rng.uniform(0.2, 5.0),
            z=0.5 * (rng.normal() + 1j * rng.normal()),
            mu=0.5 * (rng.normal() + 1j * rng.normal()))
        worst = max(worst, group.jacobian_consistency_residual(x))
    return worst <= 1e-6, f"worst residual {worst:.2e} (tol 1e-6)"


CHECKS = [
    (1, "direct moments (n, m, q) at kT=1, order-dt", check_direct_moments),
    (2, "Riccati RK4 vs closed-form moments", check_riccati),
    (3, "Schur determinant vs dense and closed form", check_determinant),
    (4, "kernel-inverse persymmetry and n=m", check_persymmetry),
    (5, "recursion vs stochastic-integral sums", check_recursion_vs_sums),
    (6, "cross-chart SDE integration", check_cross_chart),
    (7, "plain-measure Ito isometry (MC)", check_plain_isometry),
    (8, "modified-measure covariance and moment (MC)", check_modified_measure),
    (9, "Feynman-Kac normalization E[e^(-2s)] = N(kT) (MC)",
     check_feynman_kac),
    (10, "gauge relation C = e^(2f) B", check_gauge_relation),
    (11, "Sigma width value, rate, and cubic law", check_sigma_width),
    (12, "partition-function identity", check_partition_function),
    (13, "completeness quadrature", check_completeness),
    (14, "channel MC vs dense superoperator", check_channel),
    (15, "time-ordered Kraus product convergence", check_kraus_product),
    (16, "frame derivatives, both charts", check_frame_derivatives),
    (17, "Haar/Jacobian consistency", check_haar_jacobian),
]


def run_check(number):
    """Run a single numbered check and wrap its outcome."""
    for num, name, func in CHECKS:
        if num == number:
            start = time.perf_counter()
            passed, detail = func()
            return CheckResult(number=num, name=name, passed=passed,
                               detail=detail,
                               elapsed=time.perf_counter() - start)
    raise ValueError(f"no check numbered {number}")


def run_all():
    """Run every check, in order; returns the list of results."""
    return [run_check(num) for num, _, _ in CHECKS]


def format_report(results):
    """One pass/fail line per check, plus a summary line."""
    lines = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        lines.append(f"[{status}] {res.number:2d} {res.name}: {res.detail} "
                     f"({res.elapsed:.1f}s)")
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines)
