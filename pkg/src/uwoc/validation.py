"""Self-check suite behind the ``validate`` command: every analytic surface
is exercised against an independent numerical oracle (quadrature, sampling,
ordering, or closed-form identity) and reported as a pass/fail line."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.stats import kstest

from .channel import (
    egg_cdf,
    egg_pdf,
    gamma0,
    snr_cdf_single,
    snr_cdf_single_asymptotic,
    snr_pdf_single,
)
from .diversity import (
    ApertureArray,
    diversity_order,
    fit_slope,
    mc_scheme_for,
    mrc_cdf_bound,
    mrc_outage,
    mrc_outage_asymptotic,
    sc_cdf,
    sc_outage_asymptotic,
)
from .experiment import select_prefactor
from .montecarlo import SimConfig, sample_egg, sample_pointing, simulate

__all__ = ["CheckResult", "run_validation"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    tolerance: float
    passed: bool
    note: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        note = f"  ({self.note})" if self.note else ""
        return (
            f"[{status}] {self.name}: measured {self.measured:.4g} "
            f"vs tolerance {self.tolerance:.4g}{note}"
        )


def _check(name, measured, tolerance, note=""):
    return CheckResult(name, float(measured), float(tolerance), float(measured) <= float(tolerance), note)


def run_validation(config, fast=False):
    """Run the oracle suite for the given experiment configuration.

    ``fast`` trims trial counts for smoke runs.  Returns a list of
    :class:`CheckResult`; the run passes iff all do.
    """
    egg = config.egg
    pe = config.pointing
    gamma_th = config.gamma_th
    trials = 100_000 if fast else min(config.trials, 1_000_000)
    rng = np.random.default_rng(config.seed)
    results = []

    # irradiance law: normalization and sampling agreement
    mass, _ = quad(lambda h: egg_pdf(h, egg), 0, np.inf, limit=200)
    results.append(_check("egg_pdf normalization |mass-1|", abs(mass - 1.0), 1e-6))
    draws = sample_egg(egg, rng, 100_000)
    ks = kstest(draws, lambda h: egg_cdf(h, egg)).statistic
    results.append(
        _check("egg sampling KS statistic", ks, 1.628 / math.sqrt(100_000), "1% critical value")
    )

    # pointing sampler moment
    hp = sample_pointing(pe, rng, 200_000)
    target = pe.a0 * pe.rho**2 / (pe.rho**2 + 1.0)
    se = float(np.std(hp)) / math.sqrt(len(hp))
    results.append(
        _check("pointing sample-mean deviation (sigma units)",
               abs(float(np.mean(hp)) - target) / se, 3.0)
    )

    # composite SNR density: normalization at a mid-sweep power
    g0 = gamma0(config.link(0.5 * (config.pt_start_dbm + config.pt_stop_dbm)))
    mass, _ = quad(
        lambda y: snr_pdf_single(math.exp(y), egg, pe, g0) * math.exp(y),
        math.log(g0) - 60.0,
        math.log(g0) + 25.0,
        limit=400,
    )
    results.append(_check("snr_pdf_single normalization |mass-1|", abs(mass - 1.0), 1e-5))

    # mixture-coefficient convention
    conv, masses = select_prefactor(egg, pe)
    results.append(
        _check(
            f"bound-density mass under {conv.prefactor} prefactor |mass-1|",
            abs(masses[conv.prefactor] - 1.0),
            1e-4,
            f"alternative gives {masses['as_printed' if conv.prefactor == 'rho_squared' else 'rho_squared']:.4f}",
        )
    )

    # analytic single-aperture CDF against the sampler
    arr1 = ApertureArray.iid(1, egg, pe, g0)
    grid = g0 * np.logspace(-4, 2, 12)
    _, ests = simulate(
        SimConfig(trials=trials, seed=config.seed, arr=arr1, gamma_th=float(grid[-1]),
                  scheme="single", workers=config.workers),
        gamma_grid=grid,
    )
    worst = 0.0
    for g, est in zip(grid, ests):
        ana = snr_cdf_single(float(g), egg, pe, g0)
        sd = math.sqrt(max(ana * (1.0 - ana), 1e-300) / trials)
        worst = max(worst, abs(ana - est.p_hat) / sd)
    results.append(_check("single-aperture CDF vs MC (worst sigma)", worst, 3.0))

    # geometric-mean bound CDF against the sampler at N = 2
    arr2 = ApertureArray.iid(2, egg, pe, g0)
    grid2 = g0 * np.logspace(-2, 1.5, 8)
    _, ests2 = simulate(
        SimConfig(trials=trials, seed=config.seed + 1, arr=arr2, gamma_th=float(grid2[-1]),
                  scheme=mc_scheme_for(conv), workers=config.workers),
        gamma_grid=grid2,
    )
    worst = 0.0
    for g, est in zip(grid2, ests2):
        ana = mrc_cdf_bound(float(g), arr2, conv)
        if ana > 1e-2:
            worst = max(worst, abs(ana - est.p_hat) / ana)
    results.append(_check("N=2 bound CDF vs MC geometric mean (worst rel)", worst, 0.02))

    # bound direction at the threshold across the sweep
    margin = math.inf
    for pt in config.pt_grid[:: max(1, len(config.pt_grid) // 6)]:
        g0_pt = gamma0(config.link(pt))
        arr = ApertureArray.iid(max(config.n_list), egg, pe, g0_pt)
        bound = mrc_outage(gamma_th, arr, conv)
        est = simulate(
            SimConfig(trials=trials, seed=config.seed + 2, arr=arr, gamma_th=gamma_th,
                      scheme="mrc_exact_sum", workers=config.workers)
        )
        half = 0.5 * (est.ci_high - est.ci_low)
        margin = min(margin, bound - (est.p_hat - half))
    results.append(
        _check("MRC bound direction violation", max(0.0, -margin), 0.0,
               f"worst margin {margin:.3g}")
    )

    # asymptotic agreement where outage is deep
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        worst = 0.0
        for pt_extra in (30.0, 50.0, 70.0):
            g0_hi = gamma0(config.link(config.pt_stop_dbm + pt_extra))
            arr = ApertureArray.iid(min(config.n_list), egg, pe, g0_hi)
            exact = mrc_outage(gamma_th, arr, conv)
            if exact < 1e-2:
                asym = mrc_outage_asymptotic(gamma_th, arr, conv)
                worst = max(worst, abs(asym / exact - 1.0))
        results.append(_check("MRC asymptotic rel error where exact < 1e-2", worst, 0.10))

        arr_sc = ApertureArray.iid(2, egg, pe, g0)
        ident = abs(
            sc_outage_asymptotic(gamma_th, arr_sc)
            / snr_cdf_single_asymptotic(gamma_th, egg, pe, g0) ** 2
            - 1.0
        )
        results.append(_check("SC asymptotic binomial identity rel error", ident, 1e-10))

    # per-draw arithmetic-geometric ordering and scheme ordering
    n_ord = 3
    ht = sample_egg(egg, rng, (100_000 * n_ord)).reshape(n_ord, -1)
    hp = sample_pointing(pe, rng, (100_000 * n_ord)).reshape(n_ord, -1)
    gam = g0 * ht**2 * hp**2
    am = gam.mean(axis=0)
    gm = np.exp(np.log(gam).mean(axis=0))
    results.append(
        _check("AM >= GM violations (fraction of draws)", float(np.mean(am < gm)), 0.0)
    )
    out_sum = float(np.mean(gam.sum(axis=0) <= gamma_th))
    out_max = float(np.mean(gam.max(axis=0) <= gamma_th))
    out_one = float(np.mean(gam[0] <= gamma_th))
    results.append(
        _check("scheme ordering violations (sum <= max <= single)",
               float(not (out_sum <= out_max <= out_one)), 0.0,
               f"{out_sum:.4f} <= {out_max:.4f} <= {out_one:.4f}")
    )

    # determinism
    cfg = SimConfig(trials=10_000, seed=config.seed, arr=arr1, gamma_th=gamma_th,
                    scheme="single", workers=config.workers)
    a = simulate(cfg)
    b = simulate(cfg)
    results.append(
        _check("MC determinism (estimate difference)", abs(a.p_hat - b.p_hat), 0.0)
    )

    # fitted slope against the analytic diversity order
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        n_fit = min(config.n_list)
        report = diversity_order(n_fit, egg, pe)
        pts = []
        pt_dbm = config.pt_stop_dbm
        while pt_dbm < config.pt_stop_dbm + 200.0:
            g0_pt = gamma0(config.link(pt_dbm))
            arr = ApertureArray.iid(n_fit, egg, pe, g0_pt)
            val = mrc_outage_asymptotic(gamma_th, arr, conv)
            pts.append((10.0 * math.log10(g0_pt), val))
            if val < 1e-7:
                break
            pt_dbm += 1.0
        fitted = fit_slope(pts)
        results.append(
            _check(
                f"fitted slope vs analytic order rel error (N={n_fit})",
                abs(fitted / report.analytic - 1.0),
                0.15,
                f"fitted {fitted:.4f}, analytic {report.analytic:.4f}",
            )
        )

    # SC exactness at one sweep point
    arr_sc4 = ApertureArray.iid(max(2, min(4, max(config.n_list))), egg, pe, g0)
    ana = sc_cdf(gamma_th, arr_sc4)
    est = simulate(
        SimConfig(trials=trials, seed=config.seed + 3, arr=arr_sc4, gamma_th=gamma_th,
                  scheme="sc_max", workers=config.workers)
    )
    sd = math.sqrt(max(ana * (1.0 - ana), 1e-300) / trials)
    results.append(_check("SC CDF vs max-combining MC (sigma units)", abs(ana - est.p_hat) / sd, 3.0))

    return results
