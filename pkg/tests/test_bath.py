import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from spin_dephasing.bath import (
    FAMILIES,
    CutoffFunction,
    QuadratureError,
    SpectralFunctions,
    TailBoundError,
    bath_coefficients,
    coefficient_a,
    coefficient_b,
    correlation_function,
    integrate_correlation,
    spectral_density,
)

GAUSS = CutoffFunction("gaussian", 1.0)
finite_k = st.floats(-50, 50, allow_nan=False)


@pytest.fixture(scope="module")
def gaussian_integral():
    return integrate_correlation(SpectralFunctions(1.0, GAUSS), t_max=200.0)


def symbolic_squared_integral(p):
    k = sympy.symbols("k", positive=True)
    return float(sympy.integrate((1 + k**2) ** (-sympy.nsimplify(p)), (k, 0, sympy.oo)))


@pytest.mark.parametrize("family", FAMILIES)
@given(k=finite_k)
def test_cutoff_even_real_normalized(family, k):
    chi = CutoffFunction(family, 1.3, 2.5)
    assert chi(0.0) == 1.0
    assert chi(k) == chi(-k)
    assert 0.0 <= chi(k) <= 1.0


@pytest.mark.parametrize("family", FAMILIES)
def test_cutoff_decay_condition(family):
    chi = CutoffFunction(family, 1.0, 2.5)
    ks = np.array([1e2, 1e3, 1e4])
    # |chi(k)| k^(2 + eps) eventually decreases for eps = 0.25 < p - 2
    bound = chi(ks) * ks**2.25
    assert np.all(np.diff(bound) <= 0)
    assert bound[-1] < 1.0


def test_cutoff_rejects_bad_parameters():
    with pytest.raises(ValueError):
        CutoffFunction("lorentzian")
    with pytest.raises(ValueError):
        CutoffFunction("algebraic", 1.0, 2.0)
    with pytest.raises(ValueError):
        CutoffFunction("gaussian", 0.0)


@pytest.mark.parametrize("p", [3, 4, 2.5])
def test_squared_integral_matches_symbolic(p):
    assert CutoffFunction("algebraic", 1.0, p).squared_integral() == pytest.approx(symbolic_squared_integral(p), rel=1e-13)


def test_squared_integral_gaussian_and_sech():
    assert GAUSS.squared_integral() == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)
    assert CutoffFunction("exponential", 2.0).squared_integral() == 2.0


@pytest.mark.parametrize("family", FAMILIES)
@given(k=finite_k)
@settings(max_examples=50)
def test_spectral_function_parity(family, k):
    spec = SpectralFunctions(0.8, CutoffFunction(family))
    assert spec.f1(k) == spec.f1(-k)
    assert spec.f2(k) == spec.f2(-k)
    assert spec.f3(k) == -spec.f3(-k)
    assert spec.scalar_weight()(k) == pytest.approx(spec.weight(k), rel=1e-13, abs=1e-300)


def test_spectral_functions_at_zero():
    spec = SpectralFunctions(2.0, GAUSS)
    assert spec.f1(0.0) == 0.5
    assert spec.f2(0.0) == 0.0
    assert spec.f3(0.0) == 0.0
    assert spec.f1(1e-9) == pytest.approx(0.5, rel=1e-8)


def test_planck_weight():
    spec = SpectralFunctions(1.0, GAUSS)
    assert spec.planck(1.0) == pytest.approx(1 / (math.e - 1))


def test_spectral_density_examples():
    assert spectral_density(0.0, GAUSS) == 0.0
    w = 1e-4
    assert abs(spectral_density(w, GAUSS) / w - 2.0) / 2.0 < 1e-6
    with pytest.raises(ValueError):
        spectral_density(-1.0, GAUSS)


def test_spectral_density_algebraic_decay():
    chi = CutoffFunction("algebraic", 1.0, 3.0)
    ws = np.array([1e1, 1e2, 1e3, 1e4])
    scaled = np.array([spectral_density(w, chi) * w**3 for w in ws])
    assert np.all(np.diff(scaled) < 0)
    assert scaled[-1] < 1e-7


@pytest.mark.parametrize("family", FAMILIES)
def test_ohmic_monotone_approach(family):
    chi = CutoffFunction(family)
    devs = [abs(spectral_density(w, chi) / (2 * w) - 1) for w in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert devs == sorted(devs, reverse=True)
    assert devs[-1] < 1e-7


def test_correlation_at_zero_is_real_sum():
    spec = SpectralFunctions(1.0, GAUSS)
    K = GAUSS.k_max()
    f1 = 2 * integrate.quad(spec.f1, 0, K)[0]
    f2 = 2 * integrate.quad(spec.f2, 0, K)[0]
    c0 = correlation_function(0.0, spec)
    assert c0.imag == 0.0
    assert c0.real == pytest.approx(f1 + 0.5 * f2, rel=1e-10)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_correlation_conjugate_symmetry(family, t):
    spec = SpectralFunctions(1.0, CutoffFunction(family))
    plus, minus = correlation_function(t, spec), correlation_function(-t, spec)
    assert abs(plus.conjugate() - minus) < 1e-10


def test_correlation_imaginary_part_gaussian_closed_form():
    # Im C(t) = -int_0^inf k exp(-k^2) sin(kt) dk = -(sqrt(pi)/4) t exp(-t^2/4)
    spec = SpectralFunctions(1.0, GAUSS)
    for t in (0.05, 0.5, 2.0, 7.0):
        expected = -math.sqrt(math.pi) / 4 * t * math.exp(-t * t / 4)
        assert correlation_function(t, spec).imag == pytest.approx(expected, abs=1e-10)


def test_correlation_imaginary_part_negative_for_small_t():
    spec = SpectralFunctions(1.0, GAUSS)
    assert all(correlation_function(t, spec).imag < 0 for t in (0.01, 0.1, 0.5, 1.0))


def test_correlation_reports_nonconvergence():
    with pytest.raises(QuadratureError) as info:
        correlation_function(3.0, SpectralFunctions(1.0, GAUSS), tol=1e-30)
    assert info.value.error_estimate > 0


def test_integrate_correlation_gaussian(gaussian_integral):
    assert abs(gaussian_integral.value - complex(math.pi, -math.sqrt(math.pi) / 2)) < 1e-3
    assert gaussian_integral.error < 1e-6


def test_integrate_correlation_beta_halves_real_part(gaussian_integral):
    hot = integrate_correlation(SpectralFunctions(2.0, GAUSS))
    assert hot.value.real == pytest.approx(gaussian_integral.value.real / 2, rel=1e-8)
    assert hot.value.imag == pytest.approx(gaussian_integral.value.imag, abs=1e-8)


@pytest.mark.parametrize("family", FAMILIES)
def test_integrate_correlation_tail_contract(family):
    spec = SpectralFunctions(1.0, CutoffFunction(family))
    short = integrate_correlation(spec, t_max=40.0)
    long = integrate_correlation(spec, t_max=80.0)
    assert abs(long.value - short.value) <= short.error


def test_integrate_correlation_short_horizon_fails():
    with pytest.raises(TailBoundError):
        integrate_correlation(SpectralFunctions(1.0, GAUSS), t_max=1.0, tol=1e-6)


@pytest.mark.parametrize("beta, expected", [(1.0, 2 * math.pi), (2.0, math.pi)])
def test_coefficient_a_closed_form(beta, expected):
    assert coefficient_a(SpectralFunctions(beta, GAUSS)).value == expected


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_coefficient_a_numerical_routes(family, beta):
    spec = SpectralFunctions(beta, CutoffFunction(family))
    exact = 2 * math.pi / beta
    limit = coefficient_a(spec, "numerical")
    assert abs(limit.value - exact) / exact < 1e-4
    assert limit.error < 1e-6
    assert coefficient_a(spec, "correlation_integral").value == pytest.approx(exact, rel=1e-4)


def test_coefficient_b_examples():
    assert coefficient_b(GAUSS).value == pytest.approx(-math.sqrt(math.pi) / 2, abs=1e-12)
    algebraic = CutoffFunction("algebraic", 1.0, 3.0)
    assert coefficient_b(algebraic).value == pytest.approx(-3 * math.pi / 16, abs=1e-10)


@pytest.mark.parametrize("family", FAMILIES)
def test_coefficient_b_scaling(family):
    b1 = coefficient_b(CutoffFunction(family, 1.0)).value
    b2 = coefficient_b(CutoffFunction(family, 2.0)).value
    assert b2 == pytest.approx(2 * b1, rel=1e-9)


@pytest.mark.parametrize("family", FAMILIES)
def test_coefficient_b_routes_agree(family):
    chi = CutoffFunction(family)
    quad = coefficient_b(chi, "quadrature")
    corr = coefficient_b(chi, "correlation_integral")
    assert abs(quad.value - corr.value) <= quad.error + corr.error
    assert quad.value < 0


def test_unknown_methods():
    spec = SpectralFunctions(1.0, GAUSS)
    with pytest.raises(ValueError):
        coefficient_a(spec, "magic")
    with pytest.raises(ValueError):
        coefficient_b(GAUSS, "magic")
    with pytest.raises(ValueError):
        bath_coefficients(spec, "magic")


@pytest.mark.parametrize("family", FAMILIES)
def test_bath_coefficients_signs(family):
    spec = SpectralFunctions(0.5, CutoffFunction(family))
    closed = bath_coefficients(spec)
    numeric = bath_coefficients(spec, "numerical")
    assert closed.a > 0 and closed.b < 0
    assert closed.a_error == closed.b_error == 0.0
    assert numeric.a == pytest.approx(closed.a, rel=1e-6)
    assert numeric.b == pytest.approx(closed.b, abs=1e-6)
    assert numeric.a_error > 0
