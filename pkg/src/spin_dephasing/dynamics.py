"""Reduced Markovian dynamics ``T_t = exp(t L)`` of chain observables (Heisenberg picture).

The generator is ``L(X) = i[H', X] + L_D(X)`` with ``H' = b Q^2`` and the
dephasing dissipator ``L_D(X) = 2 gamma (Q X Q - {Q^2, X}/2)``. Both parts are
diagonal in the sigma^3 product basis and commute, so the semigroup acts
entrywise:

    T_t(X)_ij = x_ij * exp(-gamma t (j-i)^2 / 4^(n-1)) * exp(i b t (q_i^2 - q_j^2))

Observables and density matrices are plain complex ``numpy`` arrays of shape
``(2^n, 2^n)``; leading batch axes are allowed wherever noted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bath import BathCoefficients, CutoffFunction
from .model import DimensionError, SpinChainModel, build_q_matrix, q_eigenvalues


@dataclass(frozen=True)
class GeneratorCoefficients:
    """Dephasing rate ``gamma`` and Hamiltonian coefficient ``b`` of the generator."""

    gamma: float
    b: float = 0.0
    source: str = "closed_form"

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be nonnegative, got {self.gamma!r}")
        if not math.isfinite(self.b):
            raise ValueError(f"b must be finite, got {self.b!r}")
        if self.source not in ("closed_form", "bath_numerical"):
            raise ValueError(f"unknown coefficient source {self.source!r}")

    @classmethod
    def closed_form(cls, model: SpinChainModel, cutoff: CutoffFunction | None = None, b: float | None = None):
        """``gamma = pi lam / beta``; ``b`` defaults to ``-int_0^inf chi^2`` for ``cutoff``."""
        if b is None:
            b = -(cutoff or CutoffFunction()).squared_integral()
        return cls(model.gamma, b, "closed_form")

    @classmethod
    def from_bath(cls, model: SpinChainModel, coeffs: BathCoefficients, b: float | None = None):
        """Rate from a numerically obtained ``a``: the dissipator prefactor is ``lam * a = 2 gamma``."""
        return cls(0.5 * model.lam * coeffs.a, coeffs.b if b is None else b, "bath_numerical")


def _check_square(X, model):
    X = np.asarray(X)
    if X.shape[-2:] != (model.dim, model.dim):
        raise DimensionError(f"expected trailing shape {(model.dim, model.dim)}, got {X.shape}")
    return X


@lru_cache(maxsize=64)
def _dephasing_exponents(n_sites):
    idx = np.arange(1, 2**n_sites + 1)
    d = np.subtract.outer(idx, idx).astype(float)
    out = d * d / 4.0 ** (n_sites - 1)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=64)
def _phase_differences(n_sites):
    q2 = q_eigenvalues(n_sites) ** 2
    out = np.subtract.outer(q2, q2)
    out.flags.writeable = False
    return out


def dephasing_exponents(model: SpinChainModel) -> np.ndarray:
    """``(j - i)^2 / 4^(n-1)`` for every pair of basis indices."""
    return _dephasing_exponents(model.n_sites)


def phase_differences(model: SpinChainModel) -> np.ndarray:
    """``q_i^2 - q_j^2`` for every pair of basis indices."""
    return _phase_differences(model.n_sites)


def max_rate(model: SpinChainModel, coeffs: GeneratorCoefficients) -> float:
    n = model.n_sites
    return coeffs.gamma * (2**n - 1) ** 2 / 4.0 ** (n - 1) + abs(coeffs.b) * float(
        np.abs(phase_differences(model)).max()
    )


@lru_cache(maxsize=64)
def _generator_symbol(model, coeffs):
    sym = 1j * coeffs.b * phase_differences(model) - coeffs.gamma * dephasing_exponents(model)
    sym.flags.writeable = False
    return sym


def apply_generator(X, model: SpinChainModel, coeffs: GeneratorCoefficients, route: str = "entrywise"):
    """``L(X)``.

    ``entrywise`` multiplies ``x_ij`` by ``i b (q_i^2 - q_j^2) - gamma (j-i)^2/4^(n-1)``;
    ``matrix`` evaluates ``i[bQ^2, X] + 2 gamma (QXQ - {Q^2, X}/2)`` with dense products.
    """
    X = _check_square(X, model)
    if route == "entrywise":
        return _generator_symbol(model, coeffs) * X
    if route == "matrix":
        Q = build_q_matrix(model)
        Q2 = Q @ Q
        H = coeffs.b * Q2
        return 1j * (H @ X - X @ H) + 2.0 * coeffs.gamma * (Q @ X @ Q - 0.5 * (Q2 @ X + X @ Q2))
    raise ValueError(f"unknown route {route!r}")


def _check_time(t):
    if not t >= 0:
        raise ValueError(f"time must be nonnegative (the semigroup is not invertible), got {t!r}")


def dissipative_factor(X, t: float, model: SpinChainModel, coeffs: GeneratorCoefficients):
    """``exp(t L_D) X``."""
    _check_time(t)
    return np.exp(-coeffs.gamma * t * dephasing_exponents(model)) * _check_square(X, model)


def hamiltonian_factor(X, t: float, model: SpinChainModel, coeffs: GeneratorCoefficients):
    """``exp(i t H') X exp(-i t H')`` with ``H' = b Q^2``."""
    _check_time(t)
    return np.exp(1j * coeffs.b * t * phase_differences(model)) * _check_square(X, model)


def evolve_closed_form(X, t: float, model: SpinChainModel, coeffs: GeneratorCoefficients):
    """``T_t(X)`` from the exact entrywise solution."""
    _check_time(t)
    X = _check_square(X, model)
    return X * np.exp(t * _generator_symbol(model, coeffs))


def evolve_trajectory(X, times, model: SpinChainModel, coeffs: GeneratorCoefficients):
    """``T_t(X)`` for every ``t`` in ``times``, stacked along a new leading axis."""
    X = _check_square(X, model)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(~(times >= 0)):
        raise ValueError("times must be a 1-d array of nonnegative values")
    sym = _generator_symbol(model, coeffs)
    out = np.empty((len(times),) + X.shape, dtype=complex)
    for k, t in enumerate(times):
        np.multiply(X, np.exp(t * sym), out=out[k])
    return out


def evolve_entry(x: complex, i: int, j: int, times, model: SpinChainModel, coeffs: GeneratorCoefficients):
    """Closed-form trajectory of the single entry ``x_ij`` (1-based indices), without forming matrices."""
    for idx in (i, j):
        if not 1 <= idx <= model.dim:
            raise IndexError(f"basis index {idx} outside 1..{model.dim}")
    times = np.asarray(times, dtype=float)
    if np.any(~(times >= 0)):
        raise ValueError("times must be nonnegative")
    q = q_eigenvalues(model.n_sites)
    exponent = (j - i) ** 2 / 4.0 ** (model.n_sites - 1)
    phase = q[i - 1] ** 2 - q[j - 1] ** 2
    return x * np.exp(times * (1j * coeffs.b * phase - coeffs.gamma * exponent))


def evolve_state(Lambda, t: float, model: SpinChainModel, coeffs: GeneratorCoefficients):
    """Schrodinger-picture dual of ``T_t``: ``tr(T_t^*(Lambda) X) = tr(Lambda T_t(X))``.

    The same dephasing factors apply, with the phases conjugated.
    """
    _check_time(t)
    Lambda = _check_square(Lambda, model)
    return Lambda * np.exp(t * _generator_symbol(model, coeffs).T)


def evolve_ode(X, t: float, model: SpinChainModel, coeffs: GeneratorCoefficients, step: float = 1e-3):
    """Integrate ``dX/dt = L(X)`` with fixed-step classical RK4, using only :func:`apply_generator`.

    The number of steps is ``ceil(t / step)``, so the step actually taken never
    exceeds ``step``. Requires ``step * max_rate <= 0.05``.
    """
    _check_time(t)
    if not step > 0:
        raise ValueError(f"step must be positive, got {step!r}")
    rate = max_rate(model, coeffs)
    if step * rate > 0.05:
        raise ValueError(
            f"step {step:g} too large: step * max_rate = {step * rate:.3g} > 0.05 "
            f"(use step <= {0.05 / rate:.3g})"
        )
    Y = np.array(_check_square(X, model), dtype=complex)
    n_steps = math.ceil(t / step - 1e-12) if t > 0 else 0
    if n_steps == 0:
        return Y
    h = t / n_steps

    def L(Z):
        return apply_generator(Z, model, coeffs)

    for _ in range(n_steps):
        k1 = L(Y)
        k2 = L(Y + 0.5 * h * k1)
        k3 = L(Y + 0.5 * h * k2)
        k4 = L(Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return Y


def decoherence_time(i: int, j: int, epsilon: float, model: SpinChainModel, coeffs: GeneratorCoefficients) -> float:
    """Time after which ``|x_ij(t) / x_ij(0)| = epsilon``."""
    if i == j:
        raise ValueError("diagonal entries do not decohere")
    for idx in (i, j):
        if not 1 <= idx <= model.dim:
            raise IndexError(f"basis index {idx} outside 1..{model.dim}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if coeffs.gamma == 0:
        return math.inf
    return math.log(1.0 / epsilon) * 4.0 ** (model.n_sites - 1) / (coeffs.gamma * (j - i) ** 2)


def expectation_trajectory(Lambda, X, times, model: SpinChainModel, coeffs: GeneratorCoefficients):
    """``tr(Lambda T_t(X))`` for each time."""
    Lambda = _check_square(Lambda, model)
    traj = evolve_trajectory(X, times, model, coeffs)
    # tr(Lambda Y) = sum_ij Lambda_ji Y_ij
    return np.einsum("ji,kij->k", Lambda, traj)


def validate_density_matrix(Lambda, atol: float = 1e-12):
    """Return ``Lambda`` as a complex array, raising ``ValueError`` if it is not a state."""
    Lambda = np.asarray(Lambda, dtype=complex)
    if Lambda.ndim != 2 or Lambda.shape[0] != Lambda.shape[1]:
        raise DimensionError(f"density matrix must be square, got {Lambda.shape}")
    if not np.all(np.isfinite(Lambda)):
        raise ValueError("density matrix has non-finite entries")
    if np.abs(Lambda - Lambda.conj().T).max() > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(Lambda) - 1) > atol:
        raise ValueError(f"density matrix trace is {np.trace(Lambda)}, not 1")
    if np.linalg.eigvalsh(0.5 * (Lambda + Lambda.conj().T)).min() < -atol:
        raise ValueError("density matrix has a negative eigenvalue")
    return Lambda
