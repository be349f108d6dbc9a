"""Fourier-side laboratory for u_tt - Δu + log(I + (-Δ)^θ) u_t = 0, 0 < θ < 1/2."""

__version__ = "0.1.0"

from .errors import (
    DegenerateFit,
    DomainError,
    Divergent,
    LogDampError,
    NonFiniteIntegrand,
    QuadratureFailure,
    RangeError,
    RootNotBracketed,
    ToleranceNotMet,
)
from .model import (
    TOL_DEG,
    CharRoots,
    ModelParams,
    Thresholds,
    Zone,
    char_roots,
    compute_thresholds,
    damping_symbol,
    discriminant,
    g_function,
    r_function,
)
from .spectral import (
    Family,
    InitialDatum,
    ProfileValue,
    SpectralState,
    gaussian,
    make_state,
    moment_decomposition,
    profile_phi,
    remainder_terms,
    scaled_gaussian,
    u_hat,
    u_hat_dt,
)
from .quadrature import IntegralResult, QuadratureSpec, i_p, integrate_radial, j_p
from .analysis import (
    DecayFit,
    Law,
    NormKind,
    NormSeries,
    energy,
    fit_power_law,
    fit_sqrt_log,
    l2_norm_sq,
    norm_series,
    predicted_rho,
    profile_error_rate_check,
    reconstruct_1d,
    time_grid,
)
