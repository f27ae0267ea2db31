"""Seeded random states and observables."""

import numpy as np


def _complex_gaussian(dim, rng):
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """``G G^dagger / tr(G G^dagger)`` with standard complex Gaussian ``G``."""
    G = _complex_gaussian(dim, rng)
    rho = G @ G.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Complex Gaussian matrix symmetrized to ``(A + A^dagger) / 2``."""
    A = _complex_gaussian(dim, rng)
    return 0.5 * (A + A.conj().T)


def random_observable(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Complex Gaussian matrix with no symmetry imposed."""
    return _complex_gaussian(dim, rng)
