"""Acceptance criteria, runnable from pytest and from ``spin-dephasing verify``.

Each ``criterion_*`` function returns a :class:`CriterionResult`; tolerances are
fixed here and not configurable.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bath import FAMILIES, CutoffFunction, SpectralFunctions, coefficient_a, coefficient_b, integrate_correlation, spectral_density
from .dynamics import (
    GeneratorCoefficients,
    dissipative_factor,
    evolve_closed_form,
    evolve_ode,
    evolve_trajectory,
    hamiltonian_factor,
    max_rate,
)
from .model import SpinChainModel, SpinConfiguration, q_eigenvalue
from .pointer import projection_with_trace, verify_limit_theorem
from .sampling import random_density_matrix, random_hermitian, random_observable


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name}: {self.summary} ({self.seconds:.2f} s)"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "summary": self.summary, "details": self.details}


def _timed(fn):
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        result.seconds = time.perf_counter() - start
        return result

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _fit_rate(times, values):
    """Decay rate from a least-squares line through ``log|values|``."""
    slope, _ = np.polyfit(times, np.log(np.abs(values)), 1)
    return -slope


@_timed
def criterion_coefficient_identity(seed=0):
    """Numerical ``a`` vs ``2 pi / beta`` and ``Im int C`` vs ``-int chi^2``, every family and beta."""
    rows = []
    worst_a = worst_b = 0.0
    start = time.perf_counter()
    for family in FAMILIES:
        cutoff = CutoffFunction(family)
        b_quad = coefficient_b(cutoff, "quadrature").value
        for beta in (0.5, 1.0, 2.0):
            spec = SpectralFunctions(beta, cutoff)
            a_exact = 2.0 * math.pi / beta
            a_limit = coefficient_a(spec, "numerical").value
            integral = integrate_correlation(spec)
            a_corr = 2.0 * integral.value.real
            rel_a = max(abs(a_limit - a_exact), abs(a_corr - a_exact)) / a_exact
            abs_b = abs(integral.value.imag - b_quad)
            worst_a, worst_b = max(worst_a, rel_a), max(worst_b, abs_b)
            rows.append({"family": family, "beta": beta, "a_limit": a_limit, "a_correlation": a_corr,
                         "b_quadrature": b_quad, "b_correlation": integral.value.imag,
                         "a_rel_error": rel_a, "b_abs_error": abs_b})
    elapsed = time.perf_counter() - start
    passed = worst_a <= 1e-4 and worst_b <= 1e-3 and elapsed < 30.0
    summary = f"max rel err a={worst_a:.2e} (<=1e-4), max abs err b={worst_b:.2e} (<=1e-3), {elapsed:.1f} s (<30 s)"
    return CriterionResult(1, "coefficient identity", passed, summary, {"rows": rows, "runtime_limit": 30.0})


@_timed
def criterion_dephasing_law(seed=0):
    """Closed-form decay exponents equal ``-gamma (j-i)^2 t / 4^(n-1)`` for every pair, n <= 6."""
    t = 1.0
    worst = 0.0
    worst_gap = 0.0
    for n in range(1, 7):
        model = SpinChainModel(n)
        coeffs = GeneratorCoefficients.closed_form(model)
        X = np.ones((model.dim, model.dim), dtype=complex)
        exponent = np.log(np.abs(evolve_closed_form(X, t, model, coeffs)))
        q = np.array([q_eigenvalue(SpinConfiguration.from_index(i, n)) for i in range(1, model.dim + 1)])
        for i in range(1, model.dim + 1):
            for j in range(1, model.dim + 1):
                if i == j:
                    continue
                expected = -model.gamma * (j - i) ** 2 * t / 4.0 ** (n - 1)
                by_gap = -model.gamma * (q[i - 1] - q[j - 1]) ** 2 * t
                got = exponent[i - 1, j - 1]
                worst = max(worst, abs(got - expected) / abs(expected))
                worst_gap = max(worst_gap, abs(by_gap - expected) / abs(expected))
    passed = worst <= 1e-9 and worst_gap <= 1e-9
    summary = f"max rel deviation {worst:.2e}, gap-law deviation {worst_gap:.2e} (<=1e-9)"
    return CriterionResult(2, "dephasing law", passed, summary, {"max_rel": worst, "gap_law_max_rel": worst_gap})


@_timed
def criterion_oracle_equivalence(seed=0):
    """RK4 integration vs closed form: entrywise <= 1e-6 and convergence order 4.0 +- 0.2."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for n in range(1, 6):
        model = SpinChainModel(n)
        coeffs = GeneratorCoefficients.closed_form(model)
        X = np.stack([random_observable(model.dim, rng) for _ in range(20)])
        for t in (0.1, 1.0, 10.0):
            diff = np.abs(evolve_ode(X, t, model, coeffs, 1e-3) - evolve_closed_form(X, t, model, coeffs)).max()
            worst = max(worst, float(diff))

    model = SpinChainModel(3)
    coeffs = GeneratorCoefficients.closed_form(model)
    X = random_observable(model.dim, rng)
    exact = evolve_closed_form(X, 1.0, model, coeffs)
    h0 = 0.05 / max_rate(model, coeffs)
    steps = [h0, h0 / 2, h0 / 4]
    errors = [float(np.abs(evolve_ode(X, 1.0, model, coeffs, h) - exact).max()) for h in steps]
    order = float(np.polyfit(np.log(steps), np.log(errors), 1)[0])
    elapsed = time.perf_counter() - start

    passed = worst <= 1e-6 and abs(order - 4.0) <= 0.2 and elapsed < 60.0
    summary = f"max entrywise diff {worst:.2e} (<=1e-6), order {order:.3f} (4.0+-0.2), {elapsed:.1f} s (<60 s)"
    return CriterionResult(3, "oracle equivalence", passed, summary,
                           {"max_diff": worst, "order": order, "steps": steps, "errors": errors})


@_timed
def criterion_theorem(seed=0):
    """n = 6: log-linear decay at slope ``-gamma/4^5`` (1%) and the 1e-8 crossing at the predicted time (1%)."""
    rng = np.random.default_rng(seed)
    model = SpinChainModel(6)
    coeffs = GeneratorCoefficients.closed_form(model, b=0.0)
    Lambda = random_density_matrix(model.dim, rng)
    X = random_hermitian(model.dim, rng)
    rate = coeffs.gamma / 4.0**5

    idx = np.arange(model.dim - 1)
    slowest_amplitude = abs(np.sum(Lambda[idx + 1, idx] * X[idx, idx + 1] + Lambda[idx, idx + 1] * X[idx + 1, idx]))
    tol = 1e-8
    predicted = math.log(slowest_amplitude / tol) / rate

    result = verify_limit_theorem(Lambda, X, model, coeffs, tol, horizon=1.5 * predicted, points=3001)
    window = (result.times >= 0.5 * predicted) & (result.times <= predicted)
    slope = -_fit_rate(result.times[window], result.distances[window])
    slope_err = abs(slope + rate) / rate
    crossing_err = abs(result.t_tol - predicted) / predicted
    passed = slope_err <= 0.01 and crossing_err <= 0.01
    summary = f"slope rel err {slope_err:.2e} (<=1%), crossing t={result.t_tol:.1f} vs {predicted:.1f}, rel err {crossing_err:.2e} (<=1%)"
    return CriterionResult(4, "limit theorem", passed, summary,
                           {"slope": slope, "expected_slope": -rate, "t_tol": result.t_tol, "predicted": predicted})


@_timed
def criterion_temperature_law(seed=0):
    """Halving beta doubles the fitted slowest-mode rate (1e-9 relative)."""
    times = np.linspace(0.0, 10.0, 101)
    rates = []
    for beta in (1.0, 0.5):
        model = SpinChainModel(4, 1.0, beta)
        coeffs = GeneratorCoefficients.closed_form(model)
        X = np.ones((model.dim, model.dim), dtype=complex)
        traj = evolve_trajectory(X, times, model, coeffs)
        rates.append(_fit_rate(times, traj[:, 0, 1]))
    ratio = rates[1] / rates[0]
    passed = abs(ratio - 2.0) / 2.0 <= 1e-9
    return CriterionResult(5, "temperature law", passed, f"rate ratio {ratio:.12f} (2 within 1e-9)",
                           {"rates": rates, "ratio": ratio})


@_timed
def criterion_pointer_continuity(seed=0):
    """1000 random traces at n = 12 within 2^-13; dyadic gap halves for n = 4..12."""
    rng = np.random.default_rng(seed)
    model = SpinChainModel(12)
    s_values = rng.uniform(0.0, 1.0, 1000)
    worst = max(abs(projection_with_trace(s, model).trace - s) for s in s_values)

    grid = np.linspace(0.0, 1.0, 2**13 + 1)
    gaps = []
    for n in range(4, 13):
        m = SpinChainModel(n)
        traces = np.unique([projection_with_trace(s, m).trace for s in grid])
        gaps.append(float(np.diff(traces).max()))
    halving = all(g2 == 0.5 * g1 for g1, g2 in zip(gaps, gaps[1:]))
    passed = worst <= 2.0**-13 and halving and gaps[0] == 2.0**-4
    summary = f"max |trace - s| {worst:.3e} (<= {2.0**-13:.3e}), gaps halve n=4..12: {halving}"
    return CriterionResult(6, "pointer continuity", passed, summary, {"max_error": worst, "gaps": gaps})


@_timed
def criterion_invariance(seed=0):
    """Diagonal fixed points, unitality, P T_t = P, semigroup law and Trotter order, on random suites."""
    rng = np.random.default_rng(seed)
    times = (0.0, 0.3, 1.7, 12.0)
    checks = {"diagonal_fixed": True, "unital": True, "diagonal_preserved": True}
    semigroup = trotter = 0.0
    for n in range(1, 7):
        model = SpinChainModel(n)
        coeffs = GeneratorCoefficients.closed_form(model)
        I = np.eye(model.dim, dtype=complex)
        for _ in range(5):
            X = random_observable(model.dim, rng)
            D = np.diag(np.diag(X))
            for t in times:
                Y = evolve_closed_form(X, t, model, coeffs)
                checks["diagonal_fixed"] &= bool(np.array_equal(evolve_closed_form(D, t, model, coeffs), D))
                checks["unital"] &= bool(np.array_equal(evolve_closed_form(I, t, model, coeffs), I))
                checks["diagonal_preserved"] &= bool(np.array_equal(np.diag(Y), np.diag(X)))
                for s in times:
                    two = evolve_closed_form(Y, s, model, coeffs)
                    semigroup = max(semigroup, float(np.abs(two - evolve_closed_form(X, s + t, model, coeffs)).max()))
                a = hamiltonian_factor(dissipative_factor(X, t, model, coeffs), t, model, coeffs)
                b = dissipative_factor(hamiltonian_factor(X, t, model, coeffs), t, model, coeffs)
                trotter = max(trotter, float(np.abs(a - b).max()), float(np.abs(a - Y).max()))
    passed = all(checks.values()) and semigroup <= 1e-13 and trotter <= 1e-13
    summary = f"{', '.join(k for k, v in checks.items() if v) or 'none'} exact; semigroup {semigroup:.1e}, trotter {trotter:.1e} (<=1e-13)"
    return CriterionResult(7, "invariance and structure", passed, summary,
                           {**checks, "semigroup_max": semigroup, "trotter_max": trotter})


@_timed
def criterion_ohmic(seed=0):
    """``J(w)/(2w)`` approaches 1 monotonically over w = 1e-1..1e-4; Gaussian deviation < 1e-6."""
    omegas = [1e-1, 1e-2, 1e-3, 1e-4]
    devs = {}
    monotone = True
    for family in FAMILIES:
        cutoff = CutoffFunction(family)
        d = [abs(spectral_density(w, cutoff) / (2.0 * w) - 1.0) for w in omegas]
        monotone &= all(b < a for a, b in zip(d, d[1:]))
        devs[family] = d
    passed = monotone and devs["gaussian"][-1] < 1e-6
    summary = f"monotone for all families: {monotone}; gaussian final deviation {devs['gaussian'][-1]:.2e} (<1e-6)"
    return CriterionResult(8, "ohmic spectral density", passed, summary, {"deviations": devs})


@_timed
def criterion_performance(seed=0):
    """Closed-form evolution of a 256x256 observable over 100 times in under 1 s."""
    rng = np.random.default_rng(seed)
    model = SpinChainModel(8)
    coeffs = GeneratorCoefficients.closed_form(model, b=-0.75)
    X = random_hermitian(model.dim, rng)
    times = np.linspace(0.0, 10.0, 100)
    start = time.perf_counter()
    evolve_trajectory(X, times, model, coeffs)
    elapsed = time.perf_counter() - start
    return CriterionResult(9, "performance floor", elapsed < 1.0, f"{elapsed:.3f} s (<1 s)", {})


CRITERIA = (
    criterion_coefficient_identity,
    criterion_dephasing_law,
    criterion_oracle_equivalence,
    criterion_theorem,
    criterion_temperature_law,
    criterion_pointer_continuity,
    criterion_invariance,
    criterion_ohmic,
    criterion_performance,
)


def run_all(seed=0, report=print):
    results = []
    for criterion in CRITERIA:
        result = criterion(seed)
        if report is not None:
            report(result.line())
        results.append(result)
    return results
