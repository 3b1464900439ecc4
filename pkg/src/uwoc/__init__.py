"""Outage statistics for multi-aperture underwater optical links over
mixture exponential-generalized-gamma turbulence with pointing errors."""

from .channel import (
    EggParams,
    LinkBudget,
    PointingParams,
    egg_cdf,
    egg_cdf_no_pointing,
    egg_pdf,
    gamma0,
    gamma0_db,
    path_loss,
    snr_cdf_single,
    snr_cdf_single_asymptotic,
    snr_pdf_single,
)
from .diversity import (
    ApertureArray,
    DiversityOrderReport,
    MrcBoundConvention,
    diversity_order,
    fit_slope,
    moment_fractional,
    mrc_cdf_bound,
    mrc_outage,
    mrc_outage_asymptotic,
    mrc_pdf_bound,
    sc_cdf,
    sc_outage_asymptotic,
    sc_pdf,
)
from .montecarlo import OutageEstimate, SimConfig, sample_egg, sample_pointing, simulate
from .specfun import (
    AccuracyError,
    ContourConfig,
    DegeneracyError,
    DegeneracyWarning,
    DivergenceWarning,
    MellinBarnesSpec,
    fox_h,
    log_gamma_complex,
    meijer_g,
    residue_series,
)

__version__ = "0.1.0"
