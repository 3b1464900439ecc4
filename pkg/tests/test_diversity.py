"""Combining-analytics tests: moments against quadrature and sampling,
the geometric-mean bound against the sampler, asymptotics against the exact
evaluators, and diversity orders against slope fits."""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from uwoc import presets
from uwoc.channel import (
    gamma0,
    snr_cdf_single,
    snr_cdf_single_asymptotic,
    snr_pdf_single,
)
from uwoc.diversity import (
    ApertureArray,
    DiversityOrderReport,
    MrcBoundConvention,
    diversity_order,
    fit_slope,
    mc_scheme_for,
    moment_fractional,
    mrc_cdf_bound,
    mrc_outage,
    mrc_outage_asymptotic,
    mrc_pdf_bound,
    sc_cdf,
    sc_outage_asymptotic,
    sc_pdf,
)
from uwoc.montecarlo import SimConfig, sample_egg, sample_pointing, simulate


def iid(n, egg, pe, g0):
    return ApertureArray.iid(n, egg, pe, g0)


class TestApertureArray:
    def test_validation(self, egg, significant):
        with pytest.raises(ValueError, match="count"):
            ApertureArray(n=0, per_aperture=(), g0=1.0)
        with pytest.raises(ValueError, match="length"):
            ApertureArray(n=2, per_aperture=((egg, significant),), g0=1.0)

    def test_iid_helper(self, egg, significant):
        arr = iid(3, egg, significant, 2.0)
        assert arr.is_iid and arr.n == 3 and len(arr.per_aperture) == 3

    def test_heterogeneous_detection(self, egg, significant, strong):
        arr = ApertureArray(
            n=2, per_aperture=((egg, significant), (egg, strong)), g0=1.0
        )
        assert not arr.is_iid


class TestMomentFractional:
    def test_zeroth_moment_is_one(self, egg, significant, g0_at_0dbm):
        assert moment_fractional(0.0, egg, significant, g0_at_0dbm) == pytest.approx(
            1.0, rel=1e-12
        )

    def test_quarter_moment_against_quadrature(self, egg, significant, g0_at_0dbm):
        g0 = g0_at_0dbm
        ref, err = quad(
            lambda y: math.exp(y) ** 0.25
            * snr_pdf_single(math.exp(y), egg, significant, g0)
            * math.exp(y),
            math.log(g0) - 60.0,
            math.log(g0) + 30.0,
            limit=400,
        )
        got = moment_fractional(0.25, egg, significant, g0)
        assert got == pytest.approx(ref, rel=1e-6)

    def test_half_moment_against_sampler(self, egg, significant, g0_at_0dbm):
        g0 = g0_at_0dbm
        rng = np.random.default_rng(21)
        ht = sample_egg(egg, rng, 1_000_000)
        hp = sample_pointing(significant, rng, 1_000_000)
        root = np.sqrt(g0 * ht**2 * hp**2)
        se = root.std() / math.sqrt(len(root))
        got = moment_fractional(0.5, egg, significant, g0)
        assert abs(got - root.mean()) <= 3 * se

    def test_pole_rejected(self, egg, strong, g0_at_0dbm):
        # rho^2 = 0.327 binds: the moment diverges at r_over_n = -rho^2/2
        with pytest.raises(ValueError, match="pole"):
            moment_fractional(-strong.rho**2 / 2, egg, strong, g0_at_0dbm)


class TestMrcBound:
    def test_convention_validation(self):
        with pytest.raises(ValueError, match="variant"):
            MrcBoundConvention(variant="gamma", prefactor="as_printed")
        with pytest.raises(ValueError, match="prefactor"):
            MrcBoundConvention(variant="gamma_n", prefactor="raw")
        assert MrcBoundConvention() == MrcBoundConvention(
            variant="n_times_gamma_n", prefactor="as_printed"
        )

    def test_single_aperture_reduces_to_channel_cdf(
        self, egg, significant, g0_at_0dbm, conv
    ):
        arr = iid(1, egg, significant, g0_at_0dbm)
        for ratio in np.logspace(-4, 2, 10):
            g = ratio * g0_at_0dbm
            assert mrc_cdf_bound(g, arr, conv) == pytest.approx(
                snr_cdf_single(g, egg, significant, g0_at_0dbm), abs=1e-8
            )

    def test_single_aperture_pdf_reduces(self, egg, significant, g0_at_0dbm, conv):
        arr = iid(1, egg, significant, g0_at_0dbm)
        for ratio in (1e-2, 1.0, 10.0):
            g = ratio * g0_at_0dbm
            assert mrc_pdf_bound(g, arr, conv) == pytest.approx(
                snr_pdf_single(g, egg, significant, g0_at_0dbm), rel=1e-8
            )

    def test_zero_gamma(self, egg, significant, g0_at_0dbm, conv):
        arr = iid(2, egg, significant, g0_at_0dbm)
        assert mrc_cdf_bound(0.0, arr, conv) == 0.0

    def test_cdf_bound_matches_sampler_n3(self, egg, significant, g0_at_0dbm, conv):
        # empirical CDF of N * geometric mean at the 60 dB threshold
        g0 = g0_at_0dbm
        arr = iid(3, egg, significant, g0)
        trials = 1_000_000
        est = simulate(
            SimConfig(trials=trials, seed=31, arr=arr, gamma_th=1e6,
                      scheme=mc_scheme_for(conv))
        )
        ana = mrc_cdf_bound(1e6, arr, conv)
        sd = math.sqrt(ana * (1 - ana) / trials)
        assert abs(ana - est.p_hat) <= 3 * sd

    def test_pdf_normalization_selects_rho_squared(self, egg, significant):
        from uwoc.experiment import select_prefactor

        conv, masses = select_prefactor(egg, significant)
        assert conv.prefactor == "rho_squared"
        assert abs(masses["rho_squared"] - 1.0) <= 1e-4
        assert abs(masses["as_printed"] - 1.0) > 0.01

    def test_pdf_against_histogram_n2(self, egg, significant, g0_at_0dbm, conv):
        # kernel-free histogram of 1e7 geometric-mean samples around gamma0
        g0 = g0_at_0dbm
        n = 2
        rng = np.random.default_rng(32)
        trials = 10_000_000
        ht = sample_egg(egg, rng, n * trials).reshape(n, trials)
        hp = sample_pointing(significant, rng, n * trials).reshape(n, trials)
        gam = g0 * ht**2 * hp**2
        var = n * np.exp(np.log(gam).mean(axis=0))
        width = 0.05 * g0
        lo, hi = g0 - width / 2, g0 + width / 2
        density = np.mean((var >= lo) & (var < hi)) / width
        ana = mrc_pdf_bound(g0, iid(n, egg, significant, g0), conv)
        assert ana == pytest.approx(density, rel=0.05)

    def test_gamma_n_variant_shifts_argument(self, egg, significant, g0_at_0dbm):
        plain = MrcBoundConvention(variant="gamma_n", prefactor="rho_squared")
        scaled = MrcBoundConvention(variant="n_times_gamma_n", prefactor="rho_squared")
        arr = iid(3, egg, significant, g0_at_0dbm)
        g = g0_at_0dbm
        assert mrc_cdf_bound(g, arr, scaled) == pytest.approx(
            mrc_cdf_bound(g / 3.0, arr, plain), rel=1e-10
        )

    def test_heterogeneous_apertures_match_sampler(self, egg, strong, significant):
        g0 = 100.0
        arr = ApertureArray(
            n=2, per_aperture=((egg, significant), (egg, strong)), g0=g0
        )
        conv = MrcBoundConvention(variant="gamma_n", prefactor="rho_squared")
        trials = 400_000
        est = simulate(
            SimConfig(trials=trials, seed=33, arr=arr, gamma_th=g0,
                      scheme="geometric_mean")
        )
        ana = mrc_cdf_bound(g0, arr, conv)
        sd = math.sqrt(ana * (1 - ana) / trials)
        assert abs(ana - est.p_hat) <= 3 * sd


class TestMrcOutage:
    def test_bound_dominates_exact_sum(self, egg, significant, conv):
        for n in (1, 3):
            for pt in (-20.0, 0.0, 20.0):
                g0 = gamma0(presets.link_at(pt))
                arr = iid(n, egg, significant, g0)
                bound = mrc_outage(1e6, arr, conv)
                est = simulate(
                    SimConfig(trials=200_000, seed=34, arr=arr, gamma_th=1e6,
                              scheme="mrc_exact_sum")
                )
                half = 0.5 * (est.ci_high - est.ci_low)
                assert bound >= est.p_hat - half

    def test_nonincreasing_in_power(self, egg, significant, conv):
        vals = []
        for pt in np.arange(-35.0, 21.0, 5.0):
            arr = iid(3, egg, significant, gamma0(presets.link_at(pt)))
            vals.append(mrc_outage(1e6, arr, conv))
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_invalid_threshold(self, egg, significant, g0_at_0dbm, conv):
        with pytest.raises(ValueError):
            mrc_outage(0.0, iid(1, egg, significant, g0_at_0dbm), conv)


class TestMrcAsymptotic:
    def test_converges_to_exact(self, egg, significant, conv):
        for n in (1, 3):
            errs = []
            for pt in (60.0, 90.0):
                g0 = gamma0(presets.link_at(pt))
                arr = iid(n, egg, significant, g0)
                exact = mrc_outage(1e6, arr, conv)
                assert exact < 1e-2
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    asym = mrc_outage_asymptotic(1e6, arr, conv)
                errs.append(abs(asym / exact - 1.0))
                assert errs[-1] < 0.10
            # the relative error shrinks as the average SNR grows, until it
            # reaches the quadrature noise floor of the exact evaluation
            assert errs[1] < max(errs[0], 1e-3)

    def test_single_term_keeps_leading_pole_per_branch(
        self, egg, significant, g0_at_0dbm, conv
    ):
        # one residue per cross term keeps the smallest exponent of each
        # mixture branch: rho^2/2 (exponential) and ac/2 (generalized gamma);
        # reference terms computed from the expansion coefficients directly
        from scipy.special import gamma as G

        g0 = gamma0(presets.link_at(80.0))
        arr = iid(1, egg, significant, g0)
        got = mrc_outage_asymptotic(1e6, arr, conv, terms=1)

        rho2 = significant.rho**2
        a, c = egg.a, egg.c
        root = math.sqrt(1e6 / g0)
        u = root / (egg.lam * significant.a0)
        v = (root / (egg.b * significant.a0)) ** c
        exp_term = egg.omega * G(1 - rho2) * u**rho2
        gg_term = (
            (1 - egg.omega)
            * rho2
            * G(rho2 / c - a)
            / (c * G(rho2 / c + 1 - a) * G(1 + a))
            * v**a
        )
        assert got == pytest.approx(exp_term + gg_term, rel=1e-9)

        # deep in the tail the smaller exponent ac/2 dominates the local slope
        deep = 1e-30
        s1 = mrc_outage_asymptotic(deep * g0, arr, conv, terms=1)
        s2 = mrc_outage_asymptotic(4 * deep * g0, arr, conv, terms=1)
        slope = math.log(s2 / s1) / math.log(4.0)
        assert slope == pytest.approx(a * c / 2.0, rel=5e-3)

    def test_high_end_slope_matches_diversity_order(self, egg, significant, conv):
        pts = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for pt in np.arange(150.0, 190.0, 2.0):
                g0 = gamma0(presets.link_at(pt))
                arr = iid(1, egg, significant, g0)
                pts.append(
                    (10 * math.log10(g0), mrc_outage_asymptotic(1e6, arr, conv))
                )
        slope = fit_slope(pts, window=(pts[0][0], pts[-1][0]))
        target = diversity_order(1, egg, significant).analytic
        assert slope == pytest.approx(target, rel=0.02)


class TestSelectionCombining:
    def test_single_aperture_reduction(self, egg, strong, g0_at_0dbm):
        arr = iid(1, egg, strong, g0_at_0dbm)
        g = 0.3 * g0_at_0dbm
        assert sc_cdf(g, arr) == snr_cdf_single(g, egg, strong, g0_at_0dbm)

    def test_power_ordering_in_n(self, egg, strong, g0_at_0dbm):
        g = 0.5 * g0_at_0dbm
        vals = [sc_cdf(g, iid(n, egg, strong, g0_at_0dbm)) for n in (1, 2, 4)]
        assert vals[2] <= vals[1] <= vals[0]

    def test_cdf_against_max_combining_sampler(self, egg, strong, g0_at_0dbm):
        arr = iid(4, egg, strong, g0_at_0dbm)
        trials = 1_000_000
        est = simulate(
            SimConfig(trials=trials, seed=41, arr=arr, gamma_th=1e6, scheme="sc_max")
        )
        ana = sc_cdf(1e6, arr)
        sd = math.sqrt(ana * (1 - ana) / trials)
        assert abs(ana - est.p_hat) <= 3 * sd

    def test_pdf_normalization(self, egg, strong, g0_at_0dbm):
        g0 = g0_at_0dbm
        arr = iid(3, egg, strong, g0)
        mass, _ = quad(
            lambda y: sc_pdf(math.exp(y), arr) * math.exp(y),
            math.log(g0) - 50.0,
            math.log(g0) + 25.0,
            limit=400,
        )
        assert mass == pytest.approx(1.0, abs=1e-4)

    def test_pdf_against_histogram_n3(self, egg, strong, g0_at_0dbm):
        g0 = g0_at_0dbm
        n = 3
        rng = np.random.default_rng(42)
        trials = 2_000_000
        ht = sample_egg(egg, rng, n * trials).reshape(n, trials)
        hp = sample_pointing(strong, rng, n * trials).reshape(n, trials)
        var = (g0 * ht**2 * hp**2).max(axis=0)
        center = 2.0 * g0
        width = 0.2 * g0
        density = np.mean((var >= center - width / 2) & (var < center + width / 2)) / width
        ana = sc_pdf(center, iid(n, egg, strong, g0))
        assert ana == pytest.approx(density, rel=0.05)

    def test_pdf_matches_cdf_derivative(self, egg, strong, g0_at_0dbm):
        arr = iid(3, egg, strong, g0_at_0dbm)
        g = 0.8 * g0_at_0dbm
        h = 1e-4 * g
        fd = (sc_cdf(g + h, arr) - sc_cdf(g - h, arr)) / (2 * h)
        assert sc_pdf(g, arr) == pytest.approx(fd, rel=1e-3)


class TestScAsymptotic:
    def test_single_aperture_reduces(self, egg, strong, g0_at_0dbm):
        arr = iid(1, egg, strong, g0_at_0dbm)
        assert sc_outage_asymptotic(1e-3 * g0_at_0dbm, arr) == pytest.approx(
            snr_cdf_single_asymptotic(1e-3 * g0_at_0dbm, egg, strong, g0_at_0dbm),
            rel=1e-12,
        )

    def test_binomial_identity_with_single_power(self, egg, strong, g0_at_0dbm):
        for n in (2, 3, 4):
            arr = iid(n, egg, strong, g0_at_0dbm)
            lhs = sc_outage_asymptotic(1e-2 * g0_at_0dbm, arr)
            rhs = snr_cdf_single_asymptotic(
                1e-2 * g0_at_0dbm, egg, strong, g0_at_0dbm
            ) ** n
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_converges_to_exact(self, egg, negligible):
        for n in (2, 4):
            for pt in (25.0, 45.0):
                g0 = gamma0(presets.link_at(pt))
                arr = iid(n, egg, negligible, g0)
                exact = sc_cdf(1e6, arr)
                if exact < 1e-2:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        asym = sc_outage_asymptotic(1e6, arr)
                    assert abs(asym / exact - 1.0) < 0.10

    def test_requires_identical_apertures(self, egg, strong, significant):
        arr = ApertureArray(
            n=2, per_aperture=((egg, strong), (egg, significant)), g0=10.0
        )
        with pytest.raises(ValueError, match="identical"):
            sc_outage_asymptotic(1.0, arr)


class TestDiversityOrder:
    def test_significant_pointing_binding_term(self, egg, significant):
        report = diversity_order(1, egg, significant)
        assert round(report.analytic, 5) == 0.26607
        assert report.binding_term == "Nac_half"

    def test_strong_pointing_binding_term(self, egg, strong):
        report = diversity_order(4, egg, strong)
        assert round(report.analytic / 4, 5) == 0.16348
        assert report.binding_term == "Nrho2_half"
        assert report.analytic == pytest.approx(0.65391, abs=5e-6)

    def test_linear_scaling_in_n(self, egg, significant):
        base = diversity_order(1, egg, significant).analytic
        for n in (2, 3, 5, 7):
            assert diversity_order(n, egg, significant).analytic == pytest.approx(
                n * base, rel=1e-12
            )

    def test_binding_term_invariant_under_gamma0(self, egg, strong):
        # the report depends only on (a, c, rho, N)
        a = diversity_order(2, egg, strong)
        b = diversity_order(2, egg, strong, scheme="sc")
        assert a.binding_term == b.binding_term == "Nrho2_half"

    def test_report_validation(self):
        with pytest.raises(ValueError, match="binding"):
            DiversityOrderReport(analytic=0.5, binding_term="something")


class TestFitSlope:
    def test_exact_power_law_recovered(self):
        d = 0.731
        pts = [(g, 10 ** (-d * g / 10.0)) for g in np.arange(40.0, 80.0, 2.0)]
        assert fit_slope(pts) == pytest.approx(d, rel=1e-12)

    def test_window_selection(self):
        d = 1.2
        pts = [(g, 10 ** (-d * g / 10.0)) for g in np.arange(0.0, 80.0, 2.0)]
        assert fit_slope(pts, window=(40.0, 60.0)) == pytest.approx(d, rel=1e-12)

    def test_insufficient_points_raise(self):
        with pytest.raises(ValueError, match="insufficient|no points"):
            fit_slope([(10.0, 0.5), (20.0, 0.4)])

    def test_source_filtered_curve_points(self):
        d = 0.9
        pts = [
            (p, g, 10 ** (-d * g / 10.0), "asymptotic")
            for p, g in zip(range(20), np.arange(40.0, 80.0, 2.0))
        ] + [(0, 50.0, 0.5, "monte-carlo")]
        assert fit_slope(pts, window=(40.0, 78.0), source="asymptotic") == pytest.approx(
            d, rel=1e-12
        )
