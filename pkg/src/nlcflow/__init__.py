"""Spectral laboratory for a compressible nematic liquid-crystal flow model."""

from .spectral import (
    GridSpec,
    RealField,
    SpectralField,
    WaveVector,
    dealiased_product,
    forward_transform,
    fractional_derivative,
    gradient,
    inverse_transform,
    lp_norm,
    sobolev_norm,
)
from .propagator import (
    FluidParams,
    GreenMatrix,
    SpectralEigen,
    apply_propagator,
    eigenvalues,
    green_matrix,
    pair_functions,
)
from .dynamics import (
    CoefficientFields,
    PerturbationState,
    coefficients,
    full_tendency,
    renormalize_director,
    source_S1,
    source_S2,
    source_S3,
)
from .evolution import IntegratorConfig, Trajectory, etd_step, simulate
from .diagnostics import (
    DecayFit,
    EnergyFunctional,
    NormReport,
    composite_bound_ratio,
    decay_fit,
    energy_functional_E,
    energy_functional_F,
    fourier_split_slack,
    gn_ratio,
    norm_report,
    time_derivative_norms,
)
from .wholespace import DecayStudyConfig, RadialProfile, decay_study, linear_sq_norm

__version__ = "0.1.0"
