"""Laboratory parameter set used by the experiment presets and tests.

The turbulence mixture below was fitted to measured underwater irradiance
data; the pointing presets span negligible to strong misalignment.
"""

from .channel import EggParams, LinkBudget, PointingParams

EGG = EggParams(omega=0.1770, lam=0.4687, a=0.6302, b=1.1780, c=0.8444)

POINTING = {
    "significant": PointingParams(a0=0.8532, rho=0.8863),
    "strong": PointingParams(a0=0.3900, rho=0.5718),
    "negligible": PointingParams(a0=1.0, rho=8.0),
}

SIGMA_W2 = 1e-14  # A^2/GHz
LINK_DISTANCE_M = 50.0
EXTINCTION_PER_M = 0.056
GAMMA_TH_DB = 60.0
PT_SWEEP_DBM = (-35.0, 20.0, 5.0)


def link_at(pt_dbm):
    """LinkBudget at the given transmit power with the default geometry."""
    return LinkBudget(
        pt_dbm=pt_dbm,
        sigma_w2=SIGMA_W2,
        l=LINK_DISTANCE_M,
        alpha=EXTINCTION_PER_M,
    )
