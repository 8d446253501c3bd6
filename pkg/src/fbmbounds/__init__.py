"""Bounds and Monte-Carlo checks for E sup_{t>=0} {B_H(t) - t} of fractional Brownian motion."""

from .bounds import (
    C_MINUS,
    C_PLUS,
    MU_HALF_DEFAULT,
    MU_HALF_LITERAL,
    MU_HALF_REFLECTION,
    BoundsReport,
    Hurst,
    MuBounds,
    OmegaBreakdown,
    combined_bounds,
    drift_rescale,
    kappa,
    lambda_u,
    lower_l1,
    lower_l2,
    lower_l3,
    mu_bounds,
    mu_one_upper_borovkov,
    mu_one_upper_sudakov,
    nu,
    omega,
    psi,
    upper_u1,
    upper_u2,
    upper_u2_sudakov,
)
from .mc import (
    McResult,
    SamplerSpec,
    adaptive_horizon,
    estimate_mu_moment,
    estimate_sup_auto,
    estimate_sup_drift,
    estimate_timechanged_tail,
    sample_fgn,
)

__version__ = "0.1.0"

__all__ = [
    "C_MINUS",
    "C_PLUS",
    "MU_HALF_DEFAULT",
    "MU_HALF_LITERAL",
    "MU_HALF_REFLECTION",
    "BoundsReport",
    "Hurst",
    "MuBounds",
    "OmegaBreakdown",
    "combined_bounds",
    "drift_rescale",
    "kappa",
    "lambda_u",
    "lower_l1",
    "lower_l2",
    "lower_l3",
    "mu_bounds",
    "mu_one_upper_borovkov",
    "mu_one_upper_sudakov",
    "nu",
    "omega",
    "psi",
    "upper_u1",
    "upper_u2",
    "upper_u2_sudakov",
    "McResult",
    "SamplerSpec",
    "adaptive_horizon",
    "estimate_mu_moment",
    "estimate_sup_auto",
    "estimate_sup_drift",
    "estimate_timechanged_tail",
    "sample_fgn",
]
