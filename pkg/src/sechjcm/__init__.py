"""Exact dynamics of a Jaynes-Cummings model driven by a sech coupling pulse."""

from .algebra import (
    ModelSpec,
    SubspaceParams,
    classify_state,
    make_kerr_jcm,
    make_mphoton_jcm,
    make_standard_jcm,
    subspace_params,
)
from .oracle import OdeSettings, full_state_oracle, integrate_subspace
from .propagator import (
    PulseParams,
    SubspacePropagator,
    hypergeometric_coefficients,
    propagate_subspace,
    propagate_zero_detuning,
    z_of_t,
)
from .specfun import hyp2f1, hyp2f1_second_solution, log_gamma_complex
from .states import (
    QuantumState,
    TimeSeries,
    evolve,
    inversion,
    inversion_series_coherent,
    inversion_series_general,
    inversion_series_number,
    make_coherent_state,
    make_number_state,
)

__version__ = "0.1.0"
