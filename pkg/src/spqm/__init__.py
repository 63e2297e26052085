"""Numerics for the simultaneous P&Q measurement (SPQM) process.

The package simulates the Kraus-operator diffusion of a continual weak
measurement of both quadratures on the seven-dimensional instrumental
Weyl-Heisenberg group, and verifies the closed-form structure of that
diffusion: coordinate decompositions, stochastic-integral solutions,
Toeplitz-kernel moments and their Riccati equations, reduced
distribution functions, and POVM completeness in a truncated Fock
representation.
"""

from . import dists, fock, group, moments, paths, povm, verify

__version__ = "0.1.0"

__all__ = ["dists", "fock", "group", "moments", "paths", "povm", "verify",
           "__version__"]
