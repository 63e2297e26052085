"""Tests for the truncated Fock-space operator kernels."""

import numpy as np
import pytest

from spqm import fock


def test_canonical_operators_smallest():
    ops = fock.canonical_operators(2)
    assert np.array_equal(ops.a, np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert np.array_equal(ops.a_dag, ops.a.conj().T)


def test_h_osc_diagonal():
    ops = fock.canonical_operators(8)
    assert np.allclose(np.diag(ops.h_osc), np.arange(8) + 0.5)
    assert np.allclose(ops.h_osc, ops.a_dag @ ops.a + 0.5 * np.eye(8))


def test_commutator_truncation_artifact():
    ops = fock.canonical_operators(8)
    comm = ops.a @ ops.a_dag - ops.a_dag @ ops.a
    expected = np.eye(8)
    expected[-1, -1] = -7.0
    assert np.allclose(comm, expected, atol=1e-14)


def test_quadratures_hermitian_exact():
    ops = fock.canonical_operators(12)
    for x in (ops.q, ops.p, ops.h_osc):
        assert np.array_equal(x, x.conj().T)
    assert np.allclose(ops.q, (ops.a + ops.a_dag) / np.sqrt(2))
    assert np.allclose(ops.p, -1j * (ops.a - ops.a_dag) / np.sqrt(2))


def test_dimension_guard():
    with pytest.raises(ValueError):
        fock.canonical_operators(1)


def test_displacement_zero_is_identity():
    assert np.allclose(fock.displacement_operator(6, 0.0), np.eye(6))


def test_displacement_unitary_interior():
    d = fock.displacement_operator(30, 1.0)
    block = (d.conj().T @ d)[:15, :15]
    assert np.linalg.norm(block - np.eye(15)) <= 1e-8


def test_displacement_normal_ordered_form():
    # D_alpha = e^{-|alpha|^2/2} e^{alpha a_dag} e^{-alpha* a}
    dim, alpha = 30, 1.0
    ops = fock.canonical_operators(dim)
    d = fock.displacement_operator(dim, alpha)
    ordered = (np.exp(-0.5 * abs(alpha) ** 2)
               * fock.matrix_exponential(alpha * ops.a_dag)
               @ fock.matrix_exponential(-np.conj(alpha) * ops.a))
    assert np.linalg.norm((d - ordered)[:15, :15]) <= 1e-8


def test_displacement_composition():
    # D_a D_b = e^{(a b* - a* b)/2} D_{a+b} on the interior block.
    dim = 30
    rng = np.random.default_rng(7)
    for _ in range(3):
        a = rng.normal(scale=0.5) + 1j * rng.normal(scale=0.5)
        b = rng.normal(scale=0.5) + 1j * rng.normal(scale=0.5)
        lhs = fock.displacement_operator(dim, a) @ fock.displacement_operator(dim, b)
        rhs = (np.exp((a * np.conj(b) - np.conj(a) * b) / 2)
               * fock.displacement_operator(dim, a + b))
        assert np.linalg.norm(fock.interior_block(lhs - rhs)) <= 1e-8


def test_matrix_exponential_trivial_cases():
    assert np.allclose(fock.matrix_exponential(np.zeros((3, 3))), np.eye(3))
    x = np.diag([-1.0, -2.0])
    assert np.allclose(fock.matrix_exponential(x), np.diag(np.exp([-1.0, -2.0])))


def test_matrix_exponential_nilpotent_taylor():
    a = fock.canonical_operators(3).a * 0.7
    taylor = np.eye(3) + a + a @ a / 2  # a^3 = 0 at dim 3
    assert np.allclose(fock.matrix_exponential(a), taylor, atol=1e-15)


def test_matrix_exponential_rejects_nonfinite():
    x = np.zeros((2, 2))
    x[0, 1] = np.inf
    with pytest.raises(fock.NumericalDomainError):
        fock.matrix_exponential(x)


def test_conjugation_identity():
    # e^{-r Ho} a e^{r Ho} = a e^r on the top-left half block.
    dim = 30
    ops = fock.canonical_operators(dim)
    for r in (0.0, 1.0, 3.0):
        lhs = (fock.matrix_exponential(-r * ops.h_osc) @ ops.a
               @ fock.matrix_exponential(r * ops.h_osc))
        assert np.linalg.norm((lhs - ops.a * np.exp(r))[:15, :15]) <= 1e-8


def test_matrix_exponential_apply_matches_dense():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(5, 4, 4)) + 1j * rng.normal(size=(5, 4, 4))
    v = rng.normal(size=(5, 4, 2)) + 1j * rng.normal(size=(5, 4, 2))
    got = fock.matrix_exponential_apply(x, v)
    want = np.stack([fock.matrix_exponential(xi) @ vi for xi, vi in zip(x, v)])
    assert np.max(np.abs(got - want)) <= 1e-10


def test_interior_block_shape():
    assert fock.interior_dim(8) == 4
    assert fock.interior_dim(7) == 4
    m = np.arange(16.0).reshape(4, 4)
    assert np.array_equal(fock.interior_block(m), m[:2, :2])
