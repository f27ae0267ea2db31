"""Phonon bath: cutoff families, spectral density, thermal correlation function
and the generator coefficients ``a`` and ``b``.

Fourier convention: ``C(t) = int F(k) exp(-i k t) dk`` over the whole line with
``F = f1 + f2/2 + f3/2``. With this sign the half-line time integral of ``C``
equals ``a/2 + i b`` with ``a = 2 pi / beta > 0`` and ``b = -int_0^inf chi^2 < 0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

FAMILIES = ("gaussian", "exponential", "algebraic")
METHODS_A = ("closed_form", "numerical", "correlation_integral")
METHODS_B = ("closed_form", "quadrature", "correlation_integral")

DEFAULT_TAIL = 1e-12
DEFAULT_QUAD_TOL = 1e-10


class QuadratureError(RuntimeError):
    """Numerical integration did not reach the requested tolerance."""

    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3g})")
        self.error_estimate = error_estimate


class TailBoundError(QuadratureError):
    """The truncated time integral has a tail larger than the tolerance."""


@dataclass(frozen=True)
class CutoffFunction:
    """Even, real cutoff ``chi`` with ``chi(0) = 1``.

    * ``gaussian``: ``exp(-k^2 / (2 k0^2))``
    * ``exponential``: ``sech(k / k0)``, a smooth stand-in for ``exp(-|k|/k0)``
    * ``algebraic``: ``(1 + (k/k0)^2)^(-p/2)`` with ``p > 2``
    """

    family: str = "gaussian"
    scale: float = 1.0
    exponent: float = 3.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown cutoff family {self.family!r}; expected one of {FAMILIES}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"cutoff scale must be positive, got {self.scale!r}")
        if self.family == "algebraic" and not (math.isfinite(self.exponent) and self.exponent > 2):
            raise ValueError(f"algebraic exponent must exceed 2, got {self.exponent!r}")

    def __call__(self, k):
        x = np.abs(np.asarray(k, dtype=float)) / self.scale
        if self.family == "gaussian":
            out = np.exp(-0.5 * x * x)
        elif self.family == "exponential":
            e = np.exp(-x)
            out = 2.0 * e / (1.0 + e * e)
        else:
            out = (1.0 + x * x) ** (-0.5 * self.exponent)
        return out if out.ndim else float(out)

    def squared(self, k):
        return self(k) ** 2

    def scalar_squared(self):
        """``chi^2`` as a plain-float function, for quadrature inner loops."""
        k0 = self.scale
        if self.family == "gaussian":
            return lambda k: math.exp(-((k / k0) ** 2))
        if self.family == "exponential":

            def sech2(k):
                e = math.exp(-2.0 * abs(k) / k0)
                return 4.0 * e / (1.0 + e) ** 2

            return sech2
        p = self.exponent
        return lambda k: (1.0 + (k / k0) ** 2) ** (-p)

    def squared_integral(self) -> float:
        """Closed form of ``int_0^inf chi(k)^2 dk``."""
        k0 = self.scale
        if self.family == "gaussian":
            return k0 * math.sqrt(math.pi) / 2.0
        if self.family == "exponential":
            return k0
        p = self.exponent
        return k0 * math.sqrt(math.pi) * special.gamma(p - 0.5) / (2.0 * special.gamma(p))

    def k_max(self, tail: float = DEFAULT_TAIL) -> float:
        """Momentum cutoff beyond which the integrands are negligible (below ``tail``)."""
        k0 = self.scale
        if self.family == "gaussian":
            return k0 * math.sqrt(2.0 * math.log(1.0 / tail))
        if self.family == "exponential":
            return k0 * math.log(2.0 / tail)
        # int_K^inf k chi^2 dk <= k0^2 (k0/K)^(2p-2) / (2p-2)
        q = 2.0 * self.exponent - 2.0
        return k0 * max(10.0, (1.0 / (tail * q)) ** (1.0 / q))

    def squared_tail(self, K: float) -> float:
        """Upper bound on ``int_K^inf chi(k)^2 dk``."""
        k0 = self.scale
        if self.family == "gaussian":
            return k0 * k0 / (2.0 * K) * math.exp(-((K / k0) ** 2))
        if self.family == "exponential":
            return 2.0 * k0 * math.exp(-2.0 * K / k0)
        p = self.exponent
        return k0 * (k0 / K) ** (2.0 * p - 1.0) / (2.0 * p - 1.0)


@dataclass(frozen=True)
class SpectralFunctions:
    """The three spectral functions whose Fourier transforms build ``C(t)``.

    ``f1`` carries the Planck occupation ``1/(exp(beta|k|) - 1)``; its removable
    singularity at ``k = 0`` is filled with the limit ``1/beta``.
    """

    beta: float
    cutoff: CutoffFunction = CutoffFunction()

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive, got {self.beta!r}")

    def planck(self, k):
        """Thermal occupation ``1/(exp(beta|k|) - 1)`` (infinite at ``k = 0``)."""
        with np.errstate(divide="ignore", over="ignore"):
            return 1.0 / np.expm1(self.beta * np.abs(np.asarray(k, dtype=float)))

    def f1(self, k):
        k = np.abs(np.asarray(k, dtype=float))
        safe = np.where(k > 0, k, 1.0)
        with np.errstate(over="ignore"):
            ratio = safe / np.expm1(self.beta * safe)
        out = np.where(k > 0, ratio, 1.0 / self.beta) * self.cutoff.squared(k)
        return out if out.ndim else float(out)

    def f2(self, k):
        k = np.asarray(k, dtype=float)
        out = np.abs(k) * self.cutoff.squared(k)
        return out if out.ndim else float(out)

    def f3(self, k):
        k = np.asarray(k, dtype=float)
        out = k * self.cutoff.squared(k)
        return out if out.ndim else float(out)

    def weight(self, k):
        """``f1 + f2/2 + f3/2``, the function whose Fourier transform is ``C``."""
        return self.f1(k) + 0.5 * self.f2(k) + 0.5 * self.f3(k)

    def scalar_weight(self):
        """Plain-float version of :meth:`weight`, same terms, no numpy overhead."""
        chi2 = self.cutoff.scalar_squared()
        beta = self.beta

        def weight(k):
            c = chi2(k)
            a = abs(k)
            x = beta * a
            f1 = c / beta if a == 0.0 else (a * c / math.expm1(x) if x < 700.0 else 0.0)
            return f1 + 0.5 * a * c + 0.5 * k * c

        return weight


@dataclass(frozen=True)
class Estimate:
    value: float
    error: float = 0.0


@dataclass(frozen=True)
class BathCoefficients:
    """Dissipative coefficient ``a`` and Hamiltonian coefficient ``b``."""

    a: float
    b: float
    a_error: float = 0.0
    b_error: float = 0.0


@dataclass(frozen=True)
class CorrelationIntegral:
    """``int_0^t_max C(t) dt`` with the bound on the neglected tail and the quadrature error."""

    value: complex
    t_max: float
    tail_bound: float
    quadrature_error: float

    @property
    def error(self) -> float:
        return self.tail_bound + self.quadrature_error


def _quad(f, lo, hi, tol, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(f, lo, hi, epsabs=tol, epsrel=tol, limit=1000, **kwargs)
    return value, err


def spectral_density(omega: float, cutoff: CutoffFunction) -> float:
    """``J(omega) = 2 omega chi(omega)^2``, linear (ohmic) at small ``omega``."""
    if omega < 0:
        raise ValueError(f"omega must be nonnegative, got {omega!r}")
    return 2.0 * omega * cutoff.squared(omega)


def correlation_function(t: float, spec: SpectralFunctions, tol: float = DEFAULT_QUAD_TOL) -> complex:
    """Thermal correlation function ``C(t) = int F(k) exp(-ikt) dk`` by adaptive quadrature.

    Each half line is integrated separately because ``F`` has a kink at ``k = 0``.
    Oscillatory factors use QUADPACK's Fourier-weighted rule.

    Raises:
        QuadratureError: when the summed error estimate exceeds ``tol`` (absolute)
            and ``tol`` relative to ``|C(t)|``.
    """
    K = spec.cutoff.k_max()
    weight = spec.scalar_weight()
    t = float(t)
    re = im = err = 0.0
    for lo, hi in ((-K, 0.0), (0.0, K)):
        if t == 0.0:
            v, e = _quad(weight, lo, hi, tol / 4)
            re += v
            err += e
        else:
            v, e = _quad(weight, lo, hi, tol / 4, weight="cos", wvar=t)
            re += v
            err += e
            v, e = _quad(weight, lo, hi, tol / 4, weight="sin", wvar=t)
            im -= v
            err += e
    value = complex(re, im)
    if err > max(tol, tol * abs(value)):
        raise QuadratureError(f"C({t}) did not converge", err)
    return value


def integrate_correlation(
    spec: SpectralFunctions,
    t_max: float = 200.0,
    tol: float = 1e-6,
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> CorrelationIntegral:
    """``int_0^t_max C(t) dt``; the real part tends to ``a/2`` and the imaginary part to ``b``.

    The neglected tail beyond ``t_max`` is estimated by comparing the runs to
    ``t_max/2`` and ``t_max``: it is bounded by ``int_{t_max/2}^{t_max} |C|``.

    Raises:
        TailBoundError: if that tail estimate exceeds ``tol``.
    """
    if t_max <= 0 or tol <= 0:
        raise ValueError("t_max and tol must be positive")

    def sample(t):
        c = correlation_function(t, spec, quad_tol)
        return np.array([c.real, c.imag, abs(c)])

    half = 0.5 * t_max
    opts = dict(epsabs=tol / 10, epsrel=1e-10, limit=2000)
    head, head_err = integrate.quad_vec(sample, 0.0, half, **opts)
    rest, rest_err = integrate.quad_vec(sample, half, t_max, **opts)
    tail = float(rest[2])
    quad_err = float(head_err + rest_err) + t_max * quad_tol
    if tail > tol:
        raise TailBoundError(
            f"tail of the correlation integral beyond t_max={t_max} is ~{tail:.3g} > tol={tol:.3g}; "
            "increase t_max",
            tail,
        )
    value = complex(head[0] + rest[0], head[1] + rest[1])
    return CorrelationIntegral(value, t_max, tail, quad_err)


def _limit_at_zero(f, h0, levels=8):
    """Polynomial (Neville) extrapolation of ``f(h)`` to ``h -> 0+`` from ``h0 / 2**m``."""
    hs = [h0 / 2**m for m in range(levels)]
    table = [float(f(h)) for h in hs]
    prev = table[0]
    best, err = table[0], math.inf
    for m in range(1, levels):
        for j in range(levels - 1, m - 1, -1):
            # extrapolate to h = 0 using nodes hs[j-m] .. hs[j]
            table[j] = (hs[j - m] * table[j] - hs[j] * table[j - 1]) / (hs[j - m] - hs[j])
        e = abs(table[m] - prev)
        if e < err:
            best, err = table[m], e
        prev = table[m]
    return best, err


def coefficient_a(spec: SpectralFunctions, method: str = "closed_form", **kwargs) -> Estimate:
    """Dissipative coefficient ``a = 2 pi f1(0) + pi f2(0) = 2 pi / beta``.

    ``numerical`` takes ``f1(0+)`` and ``f2(0+)`` as extrapolated limits;
    ``correlation_integral`` uses ``2 Re int_0^T C(t) dt`` (kwargs go to
    :func:`integrate_correlation`).
    """
    if method == "closed_form":
        return Estimate(2.0 * math.pi / spec.beta)
    if method == "numerical":
        h0 = 0.1 * min(1.0 / spec.beta, spec.cutoff.scale)
        f1, e1 = _limit_at_zero(spec.f1, h0)
        f2, e2 = _limit_at_zero(spec.f2, h0)
        return Estimate(2.0 * math.pi * f1 + math.pi * f2, 2.0 * math.pi * e1 + math.pi * e2)
    if method == "correlation_integral":
        res = integrate_correlation(spec, **kwargs)
        return Estimate(2.0 * res.value.real, 2.0 * res.error)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS_A}")


def coefficient_b(
    cutoff: CutoffFunction, method: str = "quadrature", beta: float = 1.0, **kwargs
) -> Estimate:
    """Hamiltonian coefficient ``b = -int_0^inf chi^2 dk``.

    ``correlation_integral`` evaluates ``Im int_0^T C(t) dt`` at inverse
    temperature ``beta`` (the imaginary part does not depend on it).
    """
    if method == "closed_form":
        return Estimate(-cutoff.squared_integral())
    if method == "quadrature":
        K = cutoff.k_max()
        value, err = _quad(cutoff.scalar_squared(), 0.0, K, DEFAULT_QUAD_TOL)
        tail = cutoff.squared_tail(K)
        if err > 1e-8:
            raise QuadratureError("int chi^2 did not converge", err)
        return Estimate(-value, err + tail)
    if method == "correlation_integral":
        res = integrate_correlation(SpectralFunctions(beta, cutoff), **kwargs)
        return Estimate(res.value.imag, res.error)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS_B}")


def bath_coefficients(spec: SpectralFunctions, method: str = "closed_form", **kwargs) -> BathCoefficients:
    """Both coefficients, either in closed form or from one correlation-function integral."""
    if method == "closed_form":
        return BathCoefficients(2.0 * math.pi / spec.beta, -spec.cutoff.squared_integral())
    if method == "numerical":
        res = integrate_correlation(spec, **kwargs)
        return BathCoefficients(2.0 * res.value.real, res.value.imag, 2.0 * res.error, res.error)
    raise ValueError(f"unknown method {method!r}; expected 'closed_form' or 'numerical'")
