"""Exactly solvable dephasing of a spin chain collectively coupled to a thermal phonon bath."""

__version__ = "0.1.0"

from .model import (
    MAX_SITES,
    DimensionError,
    SpinChainModel,
    SpinConfiguration,
    build_q_matrix,
    eigenvalue_gap,
    q_eigenvalue,
    q_eigenvalues,
)
from .bath import (
    BathCoefficients,
    CorrelationIntegral,
    CutoffFunction,
    Estimate,
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
from .dynamics import (
    GeneratorCoefficients,
    apply_generator,
    decoherence_time,
    evolve_closed_form,
    evolve_entry,
    evolve_ode,
    evolve_state,
    evolve_trajectory,
    expectation_trajectory,
)
from .pointer import (
    DiagonalObservable,
    HorizonExceeded,
    LimitTheoremResult,
    PointerProjection,
    diagonal_projection,
    measure_trace,
    projection_with_trace,
    site_observable,
    verify_limit_theorem,
)
