"""Minimal-length (GUP) momentum algebra: roots, representations, entanglement, sampling."""

from .core import (
    GupParams,
    Method,
    RootTriple,
    cardano_roots,
    dispersion,
    forward_map,
    minimal_length,
    negate_spectrum,
    oracle_roots,
    root_sum_identity,
    uncertainty_product,
)
from .entanglement import TwoParticleState, bell_benchmark, build_entangled_state, correlation_structure, schmidt
from .errors import DegenerateInputError, DomainError, GupError, NumericError, RangeError
from .measurement import MeasurementRecord, SampleSummary, sample, verify_correlation
from .representations import (
    CoefficientVector,
    EigenfunctionSpec,
    eigenfunction,
    measure_weight,
    momentum_comb,
    ode_residual,
    plane_wave,
    validate_coefficients,
)

__version__ = "0.1.0"
