"""Command-line front end.

Subcommands: curve | cdf | validate | diversity.  Exit codes: 0 success,
1 validation or excessive numerical failure, 2 usage/configuration error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings

from . import experiment
from .channel import gamma0
from .diversity import ApertureArray, diversity_order, fit_slope, mrc_outage_asymptotic, sc_outage_asymptotic
from .experiment import ConfigError, default_config_text, dump_config, parse_config
from .validation import run_validation

USAGE_EXIT = 2
FAILURE_EXIT = 1


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="uwoc",
        description="Outage statistics for multi-aperture underwater optical links",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("curve", "outage probability vs transmit power sweep"),
        ("cdf", "CDF of the combined-SNR bound vs SNR"),
        ("validate", "run the oracle self-check suite"),
        ("diversity", "analytic and fitted diversity orders"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="experiment config file (defaults built in)")
        p.add_argument("--out", default="out", help="output directory (default ./out)")
        p.add_argument("--svg", action="store_true", help="also render an SVG chart")
        p.add_argument("--seed", type=lambda s: int(s, 0), help="override the MC seed")
        p.add_argument("--trials", type=lambda s: int(float(s)), help="override MC trials")
        p.add_argument(
            "--paper-scale",
            action="store_true",
            help="raise MC trials to 1e7 per point",
        )
        p.add_argument(
            "--dump-config",
            action="store_true",
            help="print the effective config and exit",
        )
    return parser


def _load_config(args):
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"config file: {exc}") from None
    else:
        text = default_config_text()
    config = parse_config(text)
    overrides = {}
    if args.paper_scale:
        overrides["trials"] = 10_000_000
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        import dataclasses

        config = dataclasses.replace(config, **overrides)
    return config


def _fail_rate_exit(total, failed):
    if total and failed / total > 0.10:
        print(
            f"error: {failed}/{total} points failed numerically", file=sys.stderr
        )
        return FAILURE_EXIT
    return 0


def cmd_curve(config, args):
    curves, total, failed = experiment.run_curves(config)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "curves.csv")
    experiment.write_csv(curves, csv_path)
    print(f"wrote {csv_path} ({len(curves)} curves, {total} points, {failed} failed)")
    if args.svg:
        svg_path = os.path.join(args.out, "curves.svg")
        experiment.write_svg(curves, svg_path, title="outage vs transmit power")
        print(f"wrote {svg_path}")
    return _fail_rate_exit(total, failed)


def cmd_cdf(config, args):
    curves, total, failed = experiment.run_cdf(config)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "cdf.csv")
    experiment.write_csv(curves, csv_path)
    print(f"wrote {csv_path} ({len(curves)} curves, {total} points, {failed} failed)")
    if args.svg:
        svg_path = os.path.join(args.out, "cdf.svg")
        experiment.write_svg(curves, svg_path, title="combined-SNR CDF")
        print(f"wrote {svg_path}")
    return _fail_rate_exit(total, failed)


def cmd_validate(config, args):
    results = run_validation(config)
    for res in results:
        print(res.line())
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return FAILURE_EXIT if n_fail else 0


def _fitted_slope(config, scheme, n, conv):
    """Fit the high-SNR slope on a fine asymptotic sweep extended past the
    configured range until the outage leaves the fitting window.

    The sweep only stops once the expansion has entered its regime (values
    inside (0, 0.1)); before that the series output is meaningless and may
    even be negative.
    """
    gamma_th = config.gamma_th
    pts = []
    pt_dbm = config.pt_start_dbm
    in_regime = False
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        while pt_dbm < config.pt_stop_dbm + 300.0:
            g0 = gamma0(config.link(pt_dbm))
            arr = ApertureArray.iid(n, config.egg, config.pointing, g0)
            if scheme == "mrc":
                val = mrc_outage_asymptotic(gamma_th, arr, conv)
            else:
                val = sc_outage_asymptotic(gamma_th, arr)
            pts.append((10.0 * math.log10(g0), val))
            if 0.0 < val < 0.1:
                in_regime = True
            if in_regime and 0.0 < val < 1e-7:
                break
            pt_dbm += 1.0
    return fit_slope(pts)


def cmd_diversity(config, args):
    conv, _ = experiment.select_prefactor(config.egg, config.pointing)
    print(f"{'scheme':<8}{'N':>3}  {'analytic':>10}  {'binding':>12}  {'fitted':>10}  {'rel err':>8}")
    worst = 0.0
    for scheme in config.schemes():
        for n in config.n_list:
            report = diversity_order(n, config.egg, config.pointing, scheme=scheme)
            fitted = _fitted_slope(config, scheme, n, conv)
            rel = abs(fitted / report.analytic - 1.0)
            worst = max(worst, rel)
            print(
                f"{scheme:<8}{n:>3}  {report.analytic:>10.5f}  {report.binding_term:>12}"
                f"  {fitted:>10.5f}  {rel:>8.2%}"
            )
    return 0


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    if args.dump_config:
        print(dump_config(config), end="")
        return 0
    handler = {
        "curve": cmd_curve,
        "cdf": cmd_cdf,
        "validate": cmd_validate,
        "diversity": cmd_diversity,
    }[args.command]
    return handler(config, args)


if __name__ == "__main__":
    sys.exit(main())
