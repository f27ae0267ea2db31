"""The commutative pointer algebra: diagonal observables in the sigma^3 basis.

A diagonal observable is a function on spin configurations. Its normalized
trace is the integral against the fair-coin product measure, and projections
with normalized trace ``k / 2^n`` exist for every ``k``. At finite ``n`` these
traces are a dyadic grid whose spacing halves with each added site; that is the
finite-size counterpart of a pointer with continuous readings (minimal
projections do exist at finite ``n``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import GeneratorCoefficients, _check_square, dephasing_exponents, expectation_trajectory
from .model import DimensionError, SpinChainModel

PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


class HorizonExceeded(RuntimeError):
    """The requested tolerance was not reached within the sampled times."""

    def __init__(self, message, distance):
        super().__init__(message)
        self.distance = distance


@dataclass(frozen=True)
class DiagonalObservable:
    """A function ``X(eta)`` on the ``2^n`` configurations, in basis-index order."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1 or v.size == 0 or v.size & (v.size - 1):
            raise DimensionError(f"need a vector of length 2^n, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.size

    @property
    def n_sites(self) -> int:
        return self.dim.bit_length() - 1

    def to_matrix(self) -> np.ndarray:
        return np.diag(self.values)


@dataclass(frozen=True)
class PointerProjection:
    """Diagonal 0/1 projection onto a set of configurations (1-based indices)."""

    subset: frozenset
    dim: int
    _sorted: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        subset = frozenset(int(i) for i in self.subset)
        if any(not 1 <= i <= self.dim for i in subset):
            raise IndexError("projection subset has indices outside 1..dim")
        object.__setattr__(self, "subset", subset)
        object.__setattr__(self, "_sorted", tuple(sorted(subset)))

    @property
    def rank(self) -> int:
        return len(self.subset)

    @property
    def trace(self) -> float:
        """Normalized trace ``|subset| / 2^n``."""
        return self.rank / self.dim

    def values(self) -> np.ndarray:
        v = np.zeros(self.dim)
        v[np.asarray(self._sorted, dtype=int) - 1] = 1.0
        return v

    def to_matrix(self) -> np.ndarray:
        return np.diag(self.values()).astype(complex)


def diagonal_projection(X) -> DiagonalObservable:
    """Conditional expectation onto the diagonal algebra: drop off-diagonal entries."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionError(f"observable must be square, got {X.shape}")
    return DiagonalObservable(np.diagonal(X).copy())


def measure_trace(X) -> float | complex:
    """``int X(eta) dmu(eta)`` for the fair product measure on configurations."""
    if not isinstance(X, DiagonalObservable):
        X = DiagonalObservable(np.asarray(X))
    n = X.n_sites
    # mu(eta) = prod over sites of mu_0 = 1/2, identical for every configuration
    weight = math.prod([0.5] * n)
    v = X.values
    if np.iscomplexobj(v):
        return complex(math.fsum(v.real) * weight, math.fsum(v.imag) * weight)
    return math.fsum(v) * weight


def projection_with_trace(s: float, model: SpinChainModel) -> PointerProjection:
    """Projection onto the first ``round(s 2^n)`` configurations (round half up).

    Its normalized trace is within ``2^-(n+1)`` of ``s``; the choice of an index
    prefix keeps the result deterministic and nested in ``s``.
    """
    if not 0 <= s <= 1:
        raise ValueError(f"s must lie in [0, 1], got {s!r}")
    k = math.floor(s * model.dim + 0.5)
    return PointerProjection(frozenset(range(1, k + 1)), model.dim)


def site_observable(site: int, axis: int, model: SpinChainModel) -> np.ndarray:
    """``sigma^axis`` at ``site`` (1-based), identity elsewhere; site 1 is the leftmost factor."""
    if not 1 <= site <= model.n_sites:
        raise IndexError(f"site {site} outside 1..{model.n_sites}")
    if axis not in PAULI:
        raise ValueError(f"axis must be 1, 2 or 3, got {axis!r}")
    model.check_size()
    out = np.ones((1, 1), dtype=complex)
    for m in range(1, model.n_sites + 1):
        out = np.kron(out, PAULI[axis] if m == site else np.eye(2))
    return out


@dataclass(frozen=True)
class LimitTheoremResult:
    """Distances ``|<T_t X> - <P X>|`` on a time grid with their exponential envelope."""

    t_tol: float
    times: np.ndarray
    distances: np.ndarray
    envelope: np.ndarray
    slowest_rate: float


def limit_distance(Lambda, X, times, model, coeffs):
    """``|<T_t X>_Lambda - <P X>_Lambda|`` at each time."""
    Lambda = _check_square(Lambda, model)
    X = _check_square(X, model)
    # same contraction for both terms, so a diagonal X gives exactly zero
    target = expectation_trajectory(Lambda, diagonal_projection(X).to_matrix(), [0.0], model, coeffs)[0]
    return np.abs(expectation_trajectory(Lambda, X, times, model, coeffs) - target)


def verify_limit_theorem(
    Lambda,
    X,
    model: SpinChainModel,
    coeffs: GeneratorCoefficients,
    tol: float,
    times=None,
    horizon: float | None = None,
    points: int = 2001,
) -> LimitTheoremResult:
    """Check that ``<T_t X>_Lambda`` approaches ``<P X>_Lambda`` under the envelope
    ``exp(-gamma t / 4^(n-1)) * sum_{i != j} |Lambda_ji| |x_ij|``.

    ``t_tol`` is the first time the distance drops to ``tol``: found on the
    sampled grid and then refined by bisection inside the bracketing interval.

    Raises:
        HorizonExceeded: if no sampled time reaches ``tol``.
        AssertionError: if a sampled distance exceeds the envelope.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    Lambda = _check_square(Lambda, model)
    X = _check_square(X, model)
    slowest = coeffs.gamma / 4.0 ** (model.n_sites - 1)
    if times is None:
        if horizon is None:
            horizon = 50.0 / slowest if slowest > 0 else 1.0
        times = np.linspace(0.0, horizon, points)
    times = np.asarray(times, dtype=float)

    dist = limit_distance(Lambda, X, times, model, coeffs)
    off = ~np.eye(model.dim, dtype=bool)
    amplitude = float(np.sum(np.abs(Lambda.T[off]) * np.abs(X[off])))
    envelope = np.exp(-slowest * times) * amplitude
    excess = dist - envelope * (1 + 1e-12) - 1e-14
    if np.any(excess > 0):
        k = int(np.argmax(excess))
        raise AssertionError(f"distance {dist[k]:.3g} exceeds envelope {envelope[k]:.3g} at t={times[k]:g}")

    hit = np.nonzero(dist <= tol)[0]
    if hit.size == 0:
        raise HorizonExceeded(
            f"distance {dist[-1]:.3g} still above tol={tol:g} at horizon t={times[-1]:g}", float(dist[-1])
        )
    k = int(hit[0])
    t_tol = float(times[k])
    if k > 0:
        lo, hi = float(times[k - 1]), t_tol
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if limit_distance(Lambda, X, [mid], model, coeffs)[0] <= tol:
                hi = mid
            else:
                lo = mid
        t_tol = hi
    return LimitTheoremResult(t_tol, times, dist, envelope, slowest)
