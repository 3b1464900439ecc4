"""Single-aperture channel statistics for an underwater optical link.

Irradiance fades follow a two-component mixture: an exponential branch
(weight omega) plus a generalized-gamma branch (weight 1 - omega).
Transceiver misalignment multiplies a power-law pointing gain on (0, A0].
Under intensity modulation with OOK the electrical SNR is
gamma = gamma0 * h_t^2 * h_p^2, and the composite SNR density/CDF are
two-term Meijer-G mixtures evaluated through the contour kernel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, gamma as sp_gamma, gammainc, gammaln

from .specfun import DegeneracyWarning, meijer_g

__all__ = [
    "EggParams",
    "PointingParams",
    "LinkBudget",
    "path_loss",
    "gamma0",
    "egg_pdf",
    "egg_cdf",
    "egg_cdf_no_pointing",
    "snr_pdf_single",
    "snr_cdf_single",
    "snr_cdf_single_asymptotic",
]

# excursion beyond [0, 1] tolerated from quadrature noise before clamping a
# CDF value is considered a bug rather than round-off
_CLAMP_ATOL = 1e-6


@dataclass(frozen=True)
class EggParams:
    """Mixture exponential / generalized-gamma irradiance parameters.

    omega is the exponential mixture weight; lam its scale.  a, b, c are the
    generalized-gamma shape, scale and exponent.
    """

    omega: float
    lam: float
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not 0.0 < self.omega < 1.0:
            raise ValueError(f"omega must be in (0, 1), got {self.omega}")
        for name in ("lam", "a", "b", "c"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class PointingParams:
    """Pointing-error pair: peak collected fraction A0 and jitter ratio rho
    (equivalent beam width over twice the displacement deviation)."""

    a0: float
    rho: float

    def __post_init__(self):
        if not 0.0 < self.a0 <= 1.0:
            raise ValueError(f"a0 must be in (0, 1], got {self.a0}")
        if self.rho <= 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")

    @classmethod
    def from_geometry(cls, r, w_z, w_z_eq, sigma_s):
        """Build from aperture radius, beam width at the receiver, equivalent
        beam width, and pointing-displacement standard deviation (all metres).

        A0 = erf(upsilon)^2 with upsilon = sqrt(pi/2) * r / w_z, and
        rho = w_z_eq / (2 sigma_s).
        """
        if min(r, w_z, w_z_eq, sigma_s) <= 0:
            raise ValueError("all geometry inputs must be > 0")
        upsilon = math.sqrt(math.pi / 2.0) * r / w_z
        return cls(a0=float(erf(upsilon)) ** 2, rho=w_z_eq / (2.0 * sigma_s))


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power, receiver noise and geometry defining the average SNR."""

    pt_dbm: float
    sigma_w2: float
    l: float
    alpha: float

    def __post_init__(self):
        if self.sigma_w2 <= 0:
            raise ValueError(f"sigma_w2 must be > 0, got {self.sigma_w2}")
        if self.l < 0 or self.alpha < 0:
            raise ValueError("link distance and extinction must be >= 0")

    @property
    def pt_watt(self):
        return 10.0 ** ((self.pt_dbm - 30.0) / 10.0)


def path_loss(l, alpha):
    """Oceanic path loss exp(-alpha * l) for distance l (m) and extinction
    coefficient alpha (1/m)."""
    if l < 0 or alpha < 0:
        raise ValueError(f"need l >= 0 and alpha >= 0, got l={l}, alpha={alpha}")
    return math.exp(-alpha * l)


def gamma0(link):
    """Average electrical SNR Pt^2 hl^2 / sigma_w^2 (unit responsivity,
    square-law detection of the optical power)."""
    hl = path_loss(link.l, link.alpha)
    return (link.pt_watt * hl) ** 2 / link.sigma_w2


def gamma0_db(link):
    return 10.0 * math.log10(gamma0(link))


def egg_pdf(h, p):
    """Irradiance mixture density at h > 0."""
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise ValueError("irradiance must be > 0")
    expo = p.omega / p.lam * np.exp(-h / p.lam)
    lg = (
        math.log(p.c)
        + (p.a * p.c - 1.0) * np.log(h)
        - p.a * p.c * math.log(p.b)
        - gammaln(p.a)
        - (h / p.b) ** p.c
    )
    gg = (1.0 - p.omega) * np.exp(lg)
    out = expo + gg
    return float(out) if out.ndim == 0 else out


def egg_cdf(h, p):
    """Irradiance mixture CDF: omega(1 - e^(-h/lam)) + (1-omega) P(a, (h/b)^c)
    with P the regularized lower incomplete gamma."""
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise ValueError("irradiance must be >= 0")
    out = p.omega * (-np.expm1(-h / p.lam)) + (1.0 - p.omega) * gammainc(
        p.a, (h / p.b) ** p.c
    )
    return float(out) if out.ndim == 0 else out


def egg_cdf_no_pointing(gamma, p, g0):
    """SNR-domain CDF in the perfect-alignment limit (A0 = 1, rho -> inf):
    the irradiance CDF evaluated at sqrt(gamma / gamma0).

    Closed form, used as the degenerate-pointing oracle for the Meijer-G
    composite CDF.
    """
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("SNR must be >= 0")
    return egg_cdf(np.sqrt(gamma / g0), p)


def _args_single(gamma, p, pe, g0):
    root = math.sqrt(gamma / g0)
    u = root / (p.lam * pe.a0)
    v = (root / (p.b * pe.a0)) ** p.c
    return u, v


def snr_pdf_single(gamma, p, pe, g0):
    """Composite SNR density: two-term Meijer-G mixture.

    First branch: (omega rho^2 / 2 gamma) G^{2,0}_{1,2}(rho^2+1; 1, rho^2 | u)
    with u = sqrt(gamma/gamma0) / (lam A0); second branch same shape with
    (a, rho^2/c) parameters and argument (sqrt(gamma/gamma0) / (b A0))^c.
    """
    if gamma <= 0:
        raise ValueError(f"SNR must be > 0, got {gamma}")
    rho2 = pe.rho**2
    u, v = _args_single(gamma, p, pe, g0)
    first = meijer_g(2, 0, 1, 2, [rho2 + 1.0], [1.0, rho2], u)
    second = meijer_g(
        2, 0, 1, 2, [rho2 / p.c + 1.0], [p.a, rho2 / p.c], v
    )
    return (
        p.omega * rho2 / (2.0 * gamma) * first
        + (1.0 - p.omega) * rho2 / (2.0 * sp_gamma(p.a) * gamma) * second
    )


def _clamp_unit(value, where):
    if value < -_CLAMP_ATOL or value > 1.0 + _CLAMP_ATOL:
        raise ArithmeticError(
            f"{where} excursion beyond [0,1] exceeds {_CLAMP_ATOL:g}: {value!r}"
        )
    return min(1.0, max(0.0, value))


def snr_cdf_single(gamma, p, pe, g0):
    """Composite SNR CDF: the integrated form of :func:`snr_pdf_single`,

        omega rho^2 G^{2,1}_{2,3}(1, rho^2+1; 1, rho^2, 0 | u)
        + (1-omega) rho^2 / (c Gamma(a)) G^{2,1}_{2,3}(1, rho^2/c+1; a, rho^2/c, 0 | v),

    clamped to [0, 1] (contour noise may overshoot by < 1e-6 in the tails).
    """
    if gamma < 0:
        raise ValueError(f"SNR must be >= 0, got {gamma}")
    if gamma == 0:
        return 0.0
    rho2 = pe.rho**2
    u, v = _args_single(gamma, p, pe, g0)
    first = meijer_g(2, 1, 2, 3, [1.0, rho2 + 1.0], [1.0, rho2, 0.0], u)
    second = meijer_g(
        2, 1, 2, 3, [1.0, rho2 / p.c + 1.0], [p.a, rho2 / p.c, 0.0], v
    )
    val = p.omega * rho2 * first + (1.0 - p.omega) * rho2 / (
        p.c * sp_gamma(p.a)
    ) * second
    return _clamp_unit(val, "snr_cdf_single")


def _gamma_safe(z):
    """Gamma with the pole-perturbation rule: non-positive-integer arguments
    are nudged by +1e-6 (warning) instead of raising, since they arise from
    measured parameters landing on exact degeneracies such as rho^2 = 1."""
    if z <= 0 and abs(z - round(z)) < 1e-12:
        warnings.warn(
            DegeneracyWarning(
                f"gamma argument {z:g} sits on a pole; perturbing by +1e-6"
            ),
            stacklevel=2,
        )
        z = z + 1e-6
    return float(sp_gamma(z))


def snr_cdf_single_asymptotic(gamma, p, pe, g0):
    """Small-gamma/gamma0 expansion of the composite CDF: four power terms,
    two per mixture branch, with exponents {1, rho^2} and {ac, rho^2} in
    sqrt(gamma/gamma0).  Accuracy degrades outside the small-argument regime
    by contract."""
    if gamma < 0:
        raise ValueError(f"SNR must be >= 0, got {gamma}")
    if gamma == 0:
        return 0.0
    rho2 = pe.rho**2
    a, c = p.a, p.c
    u, v = _args_single(gamma, p, pe, g0)
    first = _gamma_safe(rho2 - 1.0) / _gamma_safe(rho2) * u + _gamma_safe(
        1.0 - rho2
    ) * _gamma_safe(rho2) / _gamma_safe(1.0 + rho2) * u**rho2
    second = _gamma_safe(rho2 / c - a) * _gamma_safe(a) / (
        _gamma_safe(rho2 / c + 1.0 - a) * _gamma_safe(1.0 + a)
    ) * v**a + _gamma_safe(a - rho2 / c) * _gamma_safe(rho2 / c) / _gamma_safe(
        1.0 + rho2 / c
    ) * v ** (rho2 / c)
    return p.omega * rho2 * first + (1.0 - p.omega) * rho2 / (
        c * sp_gamma(a)
    ) * second
