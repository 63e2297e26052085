"""Truncated Fock-space operators and dense matrix kernels.

All operators are dense complex matrices on the truncated number basis
|0>, ..., |dim-1>.  The truncation dimension is always an explicit
argument; there is no hidden default.  Comparisons that must tolerate
the truncation artifact in the bottom rows are restricted to the
top-left "interior" block of size ``interior_dim(dim)``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "NumericalDomainError",
    "CanonicalOperators",
    "canonical_operators",
    "displacement_operator",
    "matrix_exponential",
    "matrix_exponential_apply",
    "interior_dim",
    "interior_block",
]


class NumericalDomainError(ValueError):
    """Raised when a matrix kernel receives non-finite input."""


def interior_dim(dim):
    """Size of the truncation-tolerant comparison block, ceil(dim/2)."""
    return -(-dim // 2)


def interior_block(mat, size=None):
    """Top-left block of a square matrix, default size ``interior_dim``.

    The bottom rows and columns of truncated operators carry the
    truncation artifact (e.g. the corner of [a, a_dag]), so tolerance
    comparisons are made on this block only.
    """
    if size is None:
        size = interior_dim(mat.shape[-1])
    return mat[..., :size, :size]


@dataclass(frozen=True)
class CanonicalOperators:
    """The canonical operator set on a truncated Fock space.

    Attributes
    ----------
    dim : int
        Truncation dimension.
    a, a_dag : ndarray
        Annihilation operator a|n> = sqrt(n)|n-1> and its adjoint.
    q, p : ndarray
        Quadratures Q = (a + a_dag)/sqrt(2), P = -i(a - a_dag)/sqrt(2).
    h_osc : ndarray
        Oscillator operator with diagonal n + 1/2 (a_dag a + I/2).
    """

    dim: int
    a: np.ndarray
    a_dag: np.ndarray
    q: np.ndarray
    p: np.ndarray
    h_osc: np.ndarray


def canonical_operators(dim):
    """Build a, a_dag, Q, P, and the oscillator operator at dimension `dim`.

    Parameters
    ----------
    dim : int
        Truncation dimension, at least 2.

    Returns
    -------
    CanonicalOperators
    """
    if dim < 2:
        raise ValueError(f"truncation dimension must be at least 2, got {dim}")
    n = np.arange(dim)
    a = np.diag(np.sqrt(n[1:]).astype(complex), k=1)
    a_dag = a.conj().T
    q = (a + a_dag) / np.sqrt(2)
    p = -1j * (a - a_dag) / np.sqrt(2)
    h_osc = np.diag((n + 0.5).astype(complex))
    return CanonicalOperators(dim=dim, a=a, a_dag=a_dag, q=q, p=p, h_osc=h_osc)


def displacement_operator(dim, alpha):
    """Displacement operator D_alpha = exp(a_dag*alpha - a*conj(alpha)).

    Exactly unitary at any truncation (the truncated exponent stays
    anti-Hermitian), but it only acts like the untruncated displacement
    on states whose displaced support stays well inside the basis;
    keep |alpha|^2 small relative to dim.
    """
    ops = canonical_operators(dim)
    return matrix_exponential(ops.a_dag * alpha - ops.a * np.conj(alpha))


def matrix_exponential(x):
    """Dense matrix exponential.

    Scaling-and-squaring with a degree-13 Pade core and squaring count
    chosen from the 1-norm (scipy.linalg.expm).

    Raises
    ------
    NumericalDomainError
        If the input contains non-finite entries.
    """
    x = np.asarray(x)
    if not np.all(np.isfinite(x)):
        raise NumericalDomainError("matrix exponential of non-finite input")
    return scipy.linalg.expm(x)


def matrix_exponential_apply(x, v, max_norm=0.5, order=16):
    """Action exp(x) @ v without forming exp(x), batched over leading axes.

    Substeps keep the scaled 1-norm below `max_norm`; each substep is a
    truncated Taylor series applied by repeated matrix-vector products.
    Intended for the small per-increment generators of the time-ordered
    Kraus product, whose norms are O(sqrt(dt)).

    Parameters
    ----------
    x : (..., d, d) ndarray
    v : (..., d, k) ndarray

    Returns
    -------
    (..., d, k) ndarray
    """
    x = np.asarray(x)
    v = np.asarray(v).astype(complex)
    if not np.all(np.isfinite(x)):
        raise NumericalDomainError("matrix exponential of non-finite input")
    norm = np.abs(x).sum(axis=-2).max() if x.size else 0.0
    n_sub = max(1, int(np.ceil(norm / max_norm)))
    xs = x / n_sub
    for _ in range(n_sub):
        term = v
        total = v.copy()
        for j in range(1, order + 1):
            term = (xs @ term) / j
            total += term
        v = total
    if not np.all(np.isfinite(v)):
        raise NumericalDomainError("matrix exponential action overflowed")
    return v
