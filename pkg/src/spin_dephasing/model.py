"""Truncated spin chain, the collective coupling operator Q and basis conventions.

Basis states are labelled by 1-based indices ``i = 1 + sum_m bits_m * 2**(n - m)``,
i.e. lexicographic order with site 1 as the most significant bit. Bit value 0 is
spin up (sigma^3 eigenvalue +1), bit value 1 is spin down (-1).

With this ordering the eigenvalues of ``Q = sum_m sigma^3_m / 2**m`` satisfy
``q_i - q_j = (j - i) / 2**(n - 1)``, which is what makes the dephasing exponent
quadratic in the distance from the diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_SITES = 12


class DimensionError(ValueError):
    """Raised for mismatched shapes or chains too large to store densely."""


@dataclass(frozen=True)
class SpinChainModel:
    """Physical scenario: ``n_sites`` spins, coupling ``lam`` and inverse temperature ``beta``.

    Units are hbar = c = k_B = 1. ``gamma`` (the dephasing rate pi*lam/beta) is
    always recomputed from ``lam`` and ``beta``.
    """

    n_sites: int
    lam: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if isinstance(self.n_sites, bool) or int(self.n_sites) != self.n_sites or self.n_sites < 1:
            raise ValueError(f"n_sites must be a positive integer, got {self.n_sites!r}")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"coupling must be positive, got {self.lam!r}")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive, got {self.beta!r}")
        object.__setattr__(self, "n_sites", int(self.n_sites))

    @property
    def gamma(self) -> float:
        return math.pi * self.lam / self.beta

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta

    @property
    def dim(self) -> int:
        return 2**self.n_sites

    def check_size(self, max_sites: int = MAX_SITES) -> None:
        if self.n_sites > max_sites:
            raise DimensionError(
                f"n_sites={self.n_sites} needs {self.dim}x{self.dim} dense matrices; "
                f"the limit is n_sites <= {max_sites}"
            )


@dataclass(frozen=True)
class SpinConfiguration:
    """An up/down assignment to every site; ``bits[m-1]`` is the bit at site m."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("a configuration needs at least one site")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @property
    def n_sites(self) -> int:
        return len(self.bits)

    @property
    def spins(self) -> tuple[int, ...]:
        """sigma^3 eigenvalues, +1 for up and -1 for down."""
        return tuple(1 - 2 * b for b in self.bits)

    @property
    def index(self) -> int:
        n = self.n_sites
        return 1 + sum(b << (n - m) for m, b in enumerate(self.bits, start=1))

    @classmethod
    def from_index(cls, index: int, n_sites: int) -> SpinConfiguration:
        _check_index(index, n_sites)
        k = index - 1
        return cls(tuple((k >> (n_sites - m)) & 1 for m in range(1, n_sites + 1)))


def _check_index(index, n_sites):
    if not 1 <= index <= 2**n_sites:
        raise IndexError(f"basis index {index} outside 1..{2**n_sites}")


def q_eigenvalue(config: SpinConfiguration) -> float:
    """Eigenvalue of Q on a configuration: ``sum_m s_m / 2**m``."""
    # dyadic terms, so the float sum is exact for any realistic n
    return sum(s / 2**m for m, s in enumerate(config.spins, start=1))


def q_eigenvalues(n_sites: int) -> np.ndarray:
    """All 2**n eigenvalues of Q in basis-index order (vectorized ``q_eigenvalue``)."""
    k = np.arange(2**n_sites)
    q = np.zeros(2**n_sites)
    for m in range(1, n_sites + 1):
        bit = (k >> (n_sites - m)) & 1
        q += (1 - 2 * bit) / 2.0**m
    return q


def eigenvalue_gap(i: int, j: int, n_sites: int) -> float:
    """``q_i - q_j`` for 1-based basis indices; equals ``(j - i) / 2**(n-1)``."""
    _check_index(i, n_sites)
    _check_index(j, n_sites)
    qi = q_eigenvalue(SpinConfiguration.from_index(i, n_sites))
    qj = q_eigenvalue(SpinConfiguration.from_index(j, n_sites))
    return qi - qj


def build_q_matrix(model: SpinChainModel, max_sites: int = MAX_SITES) -> np.ndarray:
    model.check_size(max_sites)
    return np.diag(q_eigenvalues(model.n_sites)).astype(complex)
