"""Tests for path sampling, SDE integration, and the Kraus product."""

import numpy as np
import pytest

from spqm import fock, group, moments, paths


def test_sample_wiener_statistics():
    batch = paths.sample_wiener(100, 1e-3, 1.0, seed=1, n_paths=10_000)
    dw = batch.increments.ravel()  # 1e6 increments
    dt = 1e-3
    assert abs(dw.mean()) <= 3 * np.sqrt(dt / len(dw))
    assert abs(np.mean(np.abs(dw) ** 2) / dt - 1) <= 0.01


def test_sample_wiener_deterministic():
    a = paths.sample_wiener(50, 1e-3, 1.0, seed=9)
    b = paths.sample_wiener(50, 1e-3, 1.0, seed=9)
    assert np.array_equal(a.increments, b.increments)
    c = paths.sample_wiener(50, 1e-3, 1.0, seed=10)
    assert not np.array_equal(a.increments, c.increments)


def test_sample_modified_small_kappa_is_plain():
    # kappa -> 0 collapses the kernel to the identity, so the modified
    # increments carry the plain variance dt.
    kernel = moments.build_kernel(20, 1e-3, 0.0)
    assert np.array_equal(kernel.matrix, np.eye(20))
    batch = paths.sample_modified(20, 1e-3, 1e-12, seed=2, n_paths=50_000)
    var = np.mean(np.abs(batch.increments) ** 2)
    assert abs(var / 1e-3 - 1) <= 0.01


def test_sample_modified_endpoint_moment():
    batch = paths.sample_modified(500, 2e-3, 1.0, seed=3, n_paths=100_000)
    end = paths.closed_form_hc(batch)
    n_est = np.mean(np.abs(end.nu) ** 2)
    m_est = np.mean(np.abs(end.mu) ** 2)
    assert abs(n_est - 0.5) <= 0.02 * 0.5  # kT=1 -> n = 1/2 within 2%
    se = np.std(np.abs(end.nu) ** 2 - np.abs(end.mu) ** 2) / np.sqrt(100_000)
    assert abs(n_est - m_est) <= 3 * se


def test_propagate_hc_zero_noise():
    path = paths.WienerPath(dt=1e-2, kappa=1.0, increments=np.zeros(50, complex))
    end = paths.propagate_sde(path, chart="hc").hc[-1]
    assert end.nu == 0 and end.mu == 0 and end.z == 0
    assert abs(end.r - 1.0) <= 1e-12


def test_propagate_trajectory_shapes():
    path = paths.sample_wiener(10, 1e-3, 1.0, seed=4)
    hc = paths.propagate_sde(path, chart="hc")
    assert len(hc.hc) == 11 and hc.times[0] == 0.0
    cartan = paths.propagate_sde(path, chart="cartan")
    assert len(cartan.cartan) == 10 and cartan.times[0] == 1e-3
    rs = [y.r for y in cartan.cartan]
    assert np.allclose(np.diff(rs), 2e-3)


def test_cross_chart_endpoint():
    dt, N = 1e-3, 500
    path = paths.sample_wiener(N, dt, 1.0, seed=21)
    hc_end = paths.propagate_sde(path, chart="hc").hc[-1]
    ref = group.hc_to_cartan(hc_end)
    got = paths.propagate_sde(path, chart="cartan").cartan[-1]
    f, _ = group.gauge_functions(hc_end)
    tol = 10 * dt
    assert abs(got.beta - ref.beta) <= tol
    assert abs(got.alpha - ref.alpha) <= tol
    assert abs(got.ell - ref.ell) <= tol
    assert abs(got.phi - ref.phi) <= tol
    assert abs(got.ell - (hc_end.s - f)) <= tol


def test_closed_form_single_increment():
    dw = np.array([0.03 - 0.02j])
    path = paths.WienerPath(dt=1e-3, kappa=2.0, increments=dw)
    end = paths.closed_form_hc(path)
    assert abs(end.nu - np.sqrt(2.0) * dw[0]) <= 1e-16
    assert abs(end.mu - np.sqrt(2.0) * dw[0]) <= 1e-16
    assert abs(end.z - 0.5 * 2.0 * abs(dw[0]) ** 2) <= 1e-18


def test_closed_form_equals_recursion():
    batch = paths.sample_wiener(300, 1e-3, 1.0, seed=6, n_paths=100)
    closed = paths.closed_form_hc(batch)
    for p in range(0, 100, 17):
        single = paths.WienerPath(dt=1e-3, kappa=1.0,
                                  increments=batch.increments[p])
        end = paths.propagate_sde(single, chart="hc").hc[-1]
        assert abs(end.nu - closed.nu[p]) <= 1e-10
        assert abs(end.mu - closed.mu[p]) <= 1e-10
        assert abs(end.z - closed.z[p]) <= 1e-10


def test_closed_form_cartan_matches_transform():
    path = paths.sample_wiener(400, 1e-3, 1.0, seed=8)
    direct = paths.closed_form_cartan(path)
    via_hc = group.hc_to_cartan(paths.closed_form_hc(path))
    assert abs(direct.beta - via_hc.beta) <= 1e-10
    assert abs(direct.alpha - via_hc.alpha) <= 1e-10
    assert abs(direct.ell - via_hc.ell) <= 1e-10
    assert abs(direct.phi - via_hc.phi) <= 1e-10


def test_closed_form_cartan_zero_path():
    path = paths.WienerPath(dt=1e-2, kappa=1.0, increments=np.zeros(30, complex))
    end = paths.closed_form_cartan(path)
    assert end.beta == 0 and end.alpha == 0
    assert end.ell == 0 and end.phi == 0
    assert abs(end.r - 0.6) <= 1e-12


def test_ito_isometry_plain_measure():
    kT = 1.0
    batch = paths.sample_wiener(500, 2e-3, 1.0, seed=12, n_paths=50_000)
    end = paths.closed_form_hc(batch)
    nu2 = np.abs(end.nu) ** 2
    cross = np.real(np.conj(end.nu) * end.mu)
    t_nu2 = (1 - np.exp(-4 * kT)) / 4
    t_cross = kT * np.exp(-2 * kT)
    assert abs(nu2.mean() - t_nu2) <= 3 * nu2.std() / np.sqrt(nu2.size)
    assert abs(cross.mean() - t_cross) <= 3 * cross.std() / np.sqrt(cross.size)


def test_pfaffian_per_step_combinations():
    # Two per-step coordinate combinations that close at O(dt): the
    # Cartan pair differences and the HC center-vs-mu pairing, whose
    # residual is exactly the -k|dw|^2/2 center term.
    dt, kappa, N = 1e-3, 1.0, 1000
    path = paths.sample_wiener(N, dt, kappa, seed=42)
    traj = paths.propagate_sde(path, chart="hc")
    cartan = [group.hc_to_cartan(x) for x in traj.hc[1:]]
    for k in range(1, N):
        a, b = cartan[k - 1], cartan[k]
        assert abs((b.beta - a.beta) - np.cosh(a.r) * (b.alpha - a.alpha)) <= dt
    for k in range(1, N + 1):
        a, b = traj.hc[k - 1], traj.hc[k]
        combo = ((b.s - a.s)
                 + 0.5 * np.exp(a.r) * 2 * np.real(np.conj(a.nu) * (b.mu - a.mu)))
        assert abs(combo + 0.5 * kappa * np.abs(path.increments[k - 1]) ** 2) <= dt ** 1.5


def test_kraus_zero_path_diagonal():
    path = paths.WienerPath(dt=1e-2, kappa=1.0, increments=np.zeros(25, complex))
    product = paths.kraus_time_ordered(path, 12)
    want = np.diag(np.exp(-(np.arange(12) + 0.5) * 0.5))
    assert np.linalg.norm(product - want) <= 1e-12


def test_kraus_convergence_under_refinement():
    dim = 16
    path = paths.sample_wiener(250, 2e-3, 1.0, seed=30)

    def err(p):
        product = paths.kraus_time_ordered(p, dim)
        ref = group.represent(paths.closed_form_hc(p), dim)
        diff = fock.interior_block(product - ref)
        return np.linalg.norm(diff) / np.linalg.norm(fock.interior_block(ref))

    coarse = err(path)
    fine = err(paths.refine_path(path, 4, seed=31))
    assert coarse <= 0.05
    assert coarse / fine >= 2.0


def test_refine_path_preserves_record():
    path = paths.sample_wiener(40, 1e-3, 1.0, seed=13)
    fine = paths.refine_path(path, 4, seed=14)
    assert fine.dt == path.dt / 4
    assert fine.n_steps == 4 * path.n_steps
    sums = fine.increments.reshape(40, 4).sum(axis=1)
    assert np.max(np.abs(sums - path.increments)) <= 1e-15


def test_refine_path_rejects_factor_one():
    path = paths.sample_wiener(10, 1e-3, 1.0, seed=1)
    with pytest.raises(ValueError):
        paths.refine_path(path, 1, seed=2)
