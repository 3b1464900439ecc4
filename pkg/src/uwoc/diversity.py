"""Multi-aperture combining analytics.

MRC outage is upper-bounded through the geometric mean of the branch SNRs:
the sum of N branch SNRs dominates N times their geometric mean, so the CDF
of N * (prod gamma_i)^(1/N) evaluated at the threshold upper-bounds the true
MRC outage.  The geometric-mean law itself follows from the inverse Mellin
transform of the product of fractional branch moments.  Each branch moment is
a two-term mixture, so the N-fold product expands into 2^N cross terms, one
Fox-H function per subset of apertures assigned to the exponential branch
(the two all-one-branch terms are the extremes of that expansion).  For
identical apertures the subsets collapse to N+1 terms with binomial weights.

SC statistics are exact: the max of i.i.d. branches has CDF F^N.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as sp_gamma, gammaln

from .channel import (
    snr_cdf_single,
    snr_cdf_single_asymptotic,
    snr_pdf_single,
)
from .channel import _gamma_safe  # shared pole-perturbation rule
from .specfun import MellinBarnesSpec, fox_h, residue_series

__all__ = [
    "ApertureArray",
    "MrcBoundConvention",
    "DiversityOrderReport",
    "moment_fractional",
    "mrc_cdf_bound",
    "mrc_pdf_bound",
    "mrc_outage",
    "mrc_outage_asymptotic",
    "sc_cdf",
    "sc_pdf",
    "sc_outage_asymptotic",
    "diversity_order",
    "fit_slope",
    "mc_scheme_for",
]


@dataclass(frozen=True)
class ApertureArray:
    """Receive apertures sharing one average SNR g0.

    per_aperture holds one (EggParams, PointingParams) pair per aperture.
    """

    n: int
    per_aperture: tuple
    g0: float

    def __post_init__(self):
        object.__setattr__(self, "per_aperture", tuple(self.per_aperture))
        if self.n < 1:
            raise ValueError(f"aperture count must be >= 1, got {self.n}")
        if len(self.per_aperture) != self.n:
            raise ValueError("per_aperture length must equal n")
        if self.g0 <= 0:
            raise ValueError(f"g0 must be > 0, got {self.g0}")

    @classmethod
    def iid(cls, n, egg, pointing, g0):
        """Replicate one parameter pair across n apertures."""
        return cls(n=n, per_aperture=((egg, pointing),) * n, g0=g0)

    @property
    def is_iid(self):
        first = self.per_aperture[0]
        return all(pair == first for pair in self.per_aperture[1:])


@dataclass(frozen=True)
class MrcBoundConvention:
    """Which geometric-mean variable the bound uses and whether the rho^2
    factors multiply the mixture coefficients.

    The sum of branch SNRs dominates N times their geometric mean, so
    ``n_times_gamma_n`` gives the tighter (and still valid) outage upper
    bound; the plain ``gamma_n`` variable remains selectable.  The
    ``rho_squared`` prefactor is the one under which the density integrates
    to one (see :func:`select_prefactor` in the experiment layer); the
    ``as_printed`` variant without rho^2 is kept for comparison.
    """

    variant: str = "n_times_gamma_n"
    prefactor: str = "as_printed"

    def __post_init__(self):
        if self.variant not in ("gamma_n", "n_times_gamma_n"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.prefactor not in ("as_printed", "rho_squared"):
            raise ValueError(f"unknown prefactor {self.prefactor!r}")


@dataclass(frozen=True)
class DiversityOrderReport:
    """Analytic high-SNR slope, its binding term, and an optional fitted
    slope measured from a curve."""

    analytic: float
    binding_term: str
    fitted: float | None = None

    def __post_init__(self):
        if self.analytic <= 0:
            raise ValueError("analytic diversity order must be > 0")
        if self.binding_term not in ("N_half", "Nac_half", "Nrho2_half"):
            raise ValueError(f"unknown binding term {self.binding_term!r}")


def mc_scheme_for(conv):
    """Monte Carlo combining scheme matching the bound convention."""
    return (
        "n_times_geometric_mean"
        if conv.variant == "n_times_gamma_n"
        else "geometric_mean"
    )


def moment_fractional(r_over_n, p, pe, g0):
    """Fractional moment E[gamma^nu] of the single-branch SNR, nu = r_over_n.

    Two-term closed form with a Gamma-ratio per mixture branch; defined for
    nu > -min{1, ac, rho^2}/2 (gamma-argument positivity).
    """
    nu = float(r_over_n)
    rho2 = pe.rho**2
    bound = -min(1.0, p.a * p.c, rho2) / 2.0
    if nu <= bound:
        raise ValueError(
            f"moment order {nu} hits a gamma pole; need r_over_n > {bound:.6g}"
        )
    t1 = (
        p.omega
        * rho2
        * g0**nu
        * (p.lam * pe.a0) ** (2.0 * nu)
        * math.exp(
            gammaln(2.0 * nu + 1.0)
            + gammaln(2.0 * nu + rho2)
            - gammaln(2.0 * nu + rho2 + 1.0)
        )
    )
    t2 = (
        (1.0 - p.omega)
        * rho2
        / (p.c * sp_gamma(p.a))
        * g0**nu
        * (p.b * pe.a0) ** (2.0 * nu)
        * math.exp(
            gammaln(2.0 * nu / p.c + p.a)
            + gammaln((2.0 * nu + rho2) / p.c)
            - gammaln((2.0 * nu + rho2) / p.c + 1.0)
        )
    )
    return t1 + t2


def _mixture_terms(arr, conv, kind):
    """Cross terms of the geometric-mean law: one (weight, spec, scale) per
    subset of apertures assigned to the exponential branch.

    ``kind`` is "pdf" (H^{2N,0}_{N,2N}) or "cdf" (H^{2N,1}_{N+1,2N+1}, i.e.
    the pdf integrand divided by -s via an extra (1,1)/(0,1) pair).
    For identical apertures the 2^N subsets collapse to N+1 binomial terms.
    """
    N = arr.n
    if arr.is_iid:
        groupings = [
            (math.comb(N, k), list(range(k)), list(range(k, N)))
            for k in range(N, -1, -1)
        ]
    else:
        idx = list(range(N))
        groupings = []
        for k in range(N, -1, -1):
            for sub in itertools.combinations(idx, k):
                rest = [i for i in idx if i not in sub]
                groupings.append((1, list(sub), rest))

    out = []
    for mult, exp_idx, gg_idx in groupings:
        upper, lo_first, lo_second = [], [], []
        log_coeff = 0.0
        log_z = -math.log(arr.g0)
        for i in exp_idx:
            egg, pe = arr.per_aperture[i]
            rho2 = pe.rho**2
            upper.append((rho2 + 1.0, 2.0 / N))
            lo_first.append((1.0, 2.0 / N))
            lo_second.append((rho2, 2.0 / N))
            log_coeff += math.log(egg.omega)
            log_z -= (2.0 / N) * (math.log(egg.lam) + math.log(pe.a0))
            if conv.prefactor == "rho_squared":
                log_coeff += math.log(rho2)
        for i in gg_idx:
            egg, pe = arr.per_aperture[i]
            rho2 = pe.rho**2
            upper.append((rho2 / egg.c + 1.0, 2.0 / (egg.c * N)))
            lo_first.append((egg.a, 2.0 / (egg.c * N)))
            lo_second.append((rho2 / egg.c, 2.0 / (egg.c * N)))
            log_coeff += (
                math.log1p(-egg.omega) - math.log(egg.c) - gammaln(egg.a)
            )
            log_z -= (2.0 / N) * (math.log(egg.b) + math.log(pe.a0))
            if conv.prefactor == "rho_squared":
                log_coeff += math.log(rho2)
        lower = lo_first + lo_second
        n_up = 0
        if kind == "cdf":
            upper = [(1.0, 1.0)] + upper
            lower = lower + [(0.0, 1.0)]
            n_up = 1
        spec = MellinBarnesSpec(
            m=2 * N, n=n_up, upper=tuple(upper), lower=tuple(lower)
        )
        out.append((mult * math.exp(log_coeff), spec, math.exp(log_z)))
    return out


def _effective_gamma(gamma, arr, conv):
    return gamma / arr.n if conv.variant == "n_times_gamma_n" else gamma


def mrc_cdf_bound(gamma, arr, conv, rtol=1e-10):
    """CDF of the convention-selected geometric-mean variable, evaluated at
    gamma; an upper bound on the true MRC outage when read at a threshold.

    Clamped to [0, 1]; pre-clamp excursions beyond 1e-6 raise.
    """
    if gamma < 0:
        raise ValueError(f"SNR must be >= 0, got {gamma}")
    if gamma == 0:
        return 0.0
    g_eff = _effective_gamma(gamma, arr, conv)
    total = 0.0
    for coeff, spec, z in _mixture_terms(arr, conv, "cdf"):
        total += coeff * fox_h(spec, z * g_eff, rtol=rtol)
    hi = 1.0 if conv.prefactor == "rho_squared" else math.inf
    if total < -1e-6 or total > hi + 1e-6:
        raise ArithmeticError(f"CDF bound excursion beyond [0,1]: {total!r}")
    return min(hi, max(0.0, total))


def mrc_pdf_bound(gamma, arr, conv, rtol=1e-10):
    """Density of the convention-selected geometric-mean variable."""
    if gamma <= 0:
        raise ValueError(f"SNR must be > 0, got {gamma}")
    g_eff = _effective_gamma(gamma, arr, conv)
    total = 0.0
    for coeff, spec, z in _mixture_terms(arr, conv, "pdf"):
        total += coeff * fox_h(spec, z * g_eff, rtol=rtol)
    # d(g_eff)/d(gamma) folds the 1/g_eff kernel back to 1/gamma
    return total / gamma


def mrc_outage(gamma_th, arr, conv):
    """Upper bound on MRC outage probability: the bound CDF at the threshold."""
    if gamma_th <= 0:
        raise ValueError(f"threshold must be > 0, got {gamma_th}")
    return mrc_cdf_bound(gamma_th, arr, conv)


def mrc_outage_asymptotic(gamma_th, arr, conv, terms=None):
    """High-g0 expansion of :func:`mrc_outage`: the leading residues of every
    cross term, ``terms`` poles each (default 2N, the count of first-order
    poles per term)."""
    if gamma_th <= 0:
        raise ValueError(f"threshold must be > 0, got {gamma_th}")
    if terms is None:
        terms = 2 * arr.n
    g_eff = _effective_gamma(gamma_th, arr, conv)
    total = 0.0
    for coeff, spec, z in _mixture_terms(arr, conv, "cdf"):
        total += coeff * residue_series(spec, z * g_eff, terms)
    return total


def sc_cdf(gamma, arr):
    """Selection-combining CDF: product of the branch CDFs (F^N when the
    branches are identical).  Exact, not a bound."""
    if gamma < 0:
        raise ValueError(f"SNR must be >= 0, got {gamma}")
    if gamma == 0:
        return 0.0
    if arr.is_iid:
        egg, pe = arr.per_aperture[0]
        return snr_cdf_single(gamma, egg, pe, arr.g0) ** arr.n
    out = 1.0
    for egg, pe in arr.per_aperture:
        out *= snr_cdf_single(gamma, egg, pe, arr.g0)
    return out


def sc_pdf(gamma, arr):
    """Selection-combining density: N F^(N-1) f for identical branches,
    sum_i f_i prod_{j != i} F_j otherwise."""
    if gamma <= 0:
        raise ValueError(f"SNR must be > 0, got {gamma}")
    if arr.is_iid:
        egg, pe = arr.per_aperture[0]
        F = snr_cdf_single(gamma, egg, pe, arr.g0)
        f = snr_pdf_single(gamma, egg, pe, arr.g0)
        return arr.n * F ** (arr.n - 1) * f
    Fs = [snr_cdf_single(gamma, egg, pe, arr.g0) for egg, pe in arr.per_aperture]
    fs = [snr_pdf_single(gamma, egg, pe, arr.g0) for egg, pe in arr.per_aperture]
    out = 0.0
    for i in range(arr.n):
        prod = fs[i]
        for j in range(arr.n):
            if j != i:
                prod *= Fs[j]
        out += prod
    return out


def sc_outage_asymptotic(gamma_th, arr):
    """High-g0 selection-combining outage for identical branches: the N-th
    binomial power of the four-term single-branch expansion, written as the
    triple sum over (k1, k2, k3) splitting the branches among the four base
    factors."""
    if gamma_th <= 0:
        raise ValueError(f"threshold must be > 0, got {gamma_th}")
    if not arr.is_iid:
        raise ValueError("asymptotic SC expansion requires identical apertures")
    egg, pe = arr.per_aperture[0]
    omega, lam, a, b, c = egg.omega, egg.lam, egg.a, egg.b, egg.c
    rho2 = pe.rho**2
    root = math.sqrt(gamma_th / arr.g0)
    u = root / (lam * pe.a0)
    w = root / (b * pe.a0)

    x1 = _gamma_safe(rho2 - 1.0) / _gamma_safe(rho2) * omega * rho2 * u
    x2 = omega * _gamma_safe(1.0 - rho2) * u**rho2
    y1 = (
        (1.0 - omega)
        * rho2
        * _gamma_safe(rho2 / c - a)
        / (c * _gamma_safe(rho2 / c + 1.0 - a) * _gamma_safe(1.0 + a))
        * w ** (a * c)
    )
    y2 = (1.0 - omega) * _gamma_safe(a - rho2 / c) / _gamma_safe(a) * w**rho2

    N = arr.n
    total = 0.0
    for k1 in range(N + 1):
        inner_x = sum(
            math.comb(k1, k2) * x1**k2 * x2 ** (k1 - k2) for k2 in range(k1 + 1)
        )
        inner_y = sum(
            math.comb(N - k1, k3) * y1**k3 * y2 ** (N - k1 - k3)
            for k3 in range(N - k1 + 1)
        )
        total += math.comb(N, k1) * inner_x * inner_y
    return total


def diversity_order(n, p, pe, scheme="mrc"):
    """Analytic high-SNR outage slope min{N/2, N a c / 2, N rho^2 / 2} and
    which of the three terms binds.  Identical for MRC and SC."""
    if scheme not in ("mrc", "sc"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if n < 1:
        raise ValueError("aperture count must be >= 1")
    candidates = (
        (n / 2.0, "N_half"),
        (n * p.a * p.c / 2.0, "Nac_half"),
        (n * pe.rho**2 / 2.0, "Nrho2_half"),
    )
    analytic, binding = min(candidates, key=lambda t: t[0])
    return DiversityOrderReport(analytic=analytic, binding_term=binding)


def fit_slope(curve, window=None, source=None):
    """Least-squares high-SNR slope of a sweep: -d log10(P_out) / d (g0_dB/10).

    ``curve`` is an OutageCurve (points of (pt_dbm, gamma0_db, value, source))
    or any iterable of (gamma0_db, value) pairs.  ``window`` is an explicit
    (low_db, high_db) range of gamma0; the default keeps the top 15 dB of the
    points with outage in (1e-6, 1e-1), which sit past the curve knee.
    Needs at least 3 usable points.
    """
    points = getattr(curve, "points", curve)
    pairs = []
    for pt in points:
        if len(pt) >= 4:
            _, g0db, value, src = pt[0], pt[1], pt[2], pt[3]
            if source is not None and src != source:
                continue
        else:
            g0db, value = pt
        if np.isfinite(value) and 0.0 < value < 0.1:
            pairs.append((g0db, value))
    if window is None:
        usable = [(g, v) for g, v in pairs if v > 1e-6]
        if not usable:
            raise ValueError("no points with outage in (1e-6, 1e-1) to fit")
        top = max(g for g, _ in usable)
        window = (top - 15.0, top)
        pairs = usable
    lo, hi = window
    sel = [(g, v) for g, v in pairs if lo <= g <= hi]
    if len(sel) < 3:
        raise ValueError(
            f"insufficient points for slope fit: {len(sel)} in window {window}"
        )
    xs = np.array([g / 10.0 for g, _ in sel])
    ys = np.log10([v for _, v in sel])
    slope = np.polyfit(xs, ys, 1)[0]
    return -float(slope)
