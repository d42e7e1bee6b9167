"""Command line front end for the link experiments.

Subcommands
    ber       bit-error-rate sweep over an SNR grid
    psd       transmit spectrum versus the analytic average
    ifi       spill-power study for one versus two pulse types
    gauss     normality check for the interference components
    validate  table-engine versus waveform-engine agreement

The SNR axis is the ratio of user 1's received symbol energy to the
noise variance, in dB. Every run prints a short summary to stdout; with
--out the full record set is written as CSV and a companion figure is
rendered beside it with a .png suffix unless --no-plot is given. Exit
status 2 marks configuration or IO problems; statistical outcomes never
change the exit status.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .channel import ChannelParams
from .config import load_config
from .errors import ConfigError, ParameterError
from .harness import (ENGINE_SEMI, ENGINE_WAVEFORM, ExperimentSpec,
                      run_ber_sweep, run_gaussianity_check, run_ifi_study,
                      run_psd_experiment, run_validate)
from . import plots

DEFAULT_CONFIG = "configs/paper_sec6.cfg"
DEFAULT_FIRST_ORDER = 3


def _parse_snr(text: str) -> tuple:
    """Accept 'A:B:STEP' (inclusive endpoints) or a comma list of dB."""
    parts = text.split(":")
    try:
        values = tuple(float(x) for x in
                       (parts if len(parts) > 1 else text.split(",")))
    except ValueError as exc:
        raise ConfigError(f"could not parse snr grid {text!r}") from exc
    if len(parts) == 1:
        return values
    if len(parts) != 3:
        raise ConfigError(f"snr range must be A:B:STEP, got {text!r}")
    start, stop, step = values
    if step <= 0:
        raise ConfigError("snr step must be positive")
    if stop < start:
        raise ConfigError("snr range end must not precede its start")
    n = int((stop - start) / step + 1e-9)
    return tuple(start + i * step for i in range(n + 1))


def _pulse_overrides(args) -> dict:
    """Config overrides from --np / --mhp-orders.

    Orders default to a run of consecutive orders starting at
    DEFAULT_FIRST_ORDER when only the count is given.
    """
    orders = None
    if getattr(args, "mhp_orders", None):
        try:
            orders = tuple(int(x) for x in args.mhp_orders.split(","))
        except ValueError as exc:
            raise ConfigError(
                f"could not parse --mhp-orders {args.mhp_orders!r}") from exc
    n_p = getattr(args, "n_p", None)
    if n_p is not None and n_p < 1:
        raise ConfigError("--np must be >= 1")
    if orders is None and n_p is not None:
        orders = tuple(range(DEFAULT_FIRST_ORDER, DEFAULT_FIRST_ORDER + n_p))
    if orders is None:
        return {}
    if n_p is not None and len(orders) != n_p:
        raise ConfigError(
            f"--np {n_p} conflicts with {len(orders)} --mhp-orders entries")
    return dict(n_p=len(orders), mhp_orders=orders)


def _load(args):
    cfg = load_config(args.config, **_pulse_overrides(args))
    if args.taps is None:
        params = ChannelParams()
    else:
        params = ChannelParams(n_taps=args.taps)
    seed = cfg.seed if args.seed is None else args.seed
    return cfg, params, seed


def _render(args, plot_fn, report) -> None:
    if not args.out or args.no_plot:
        return
    png = Path(args.out).with_suffix(".png")
    plot_fn(report, png)
    print(f"wrote figure {png}")


def _cmd_ber(args) -> int:
    cfg, params, seed = _load(args)
    spec = ExperimentSpec(experiment="ber_sweep", config=cfg, channel=params,
                          snr_grid=_parse_snr(args.snr), trials=args.trials,
                          seed=seed, engine=args.engine, jobs=args.jobs,
                          output=args.out, min_errors=args.min_errors)
    curve = run_ber_sweep(spec)
    for rec in curve.records():
        flag = "" if rec["n_errors"] >= args.min_errors \
            else "  low-confidence"
        print(f"snr {rec['snr_db']:6.2f} dB  sim {rec['sim_bep']:.4e}  "
              f"theory {rec['theory_mc_bep']:.4e}  "
              f"sga {rec['sga_bep']:.4e}  "
              f"errors {rec['n_errors']}/{rec['n_bits']}{flag}")
    _render(args, plots.plot_ber_curve, curve)
    return 0


def _cmd_psd(args) -> int:
    cfg, params, seed = _load(args)
    spec = ExperimentSpec(experiment="psd", config=cfg, channel=params,
                          trials=args.trials, seed=seed, output=args.out)
    report = run_psd_experiment(spec)
    lo, hi = report.band
    print(f"symbols {report.n_symbols}  "
          f"band {lo / 1e9:.3f}-{hi / 1e9:.3f} GHz  "
          f"rms error {report.rms_rel_error:.3%}")
    _render(args, plots.plot_psd, report)
    return 0


def _cmd_ifi(args) -> int:
    cfg, params, seed = _load(args)
    spec = ExperimentSpec(experiment="ifi_study", config=cfg, channel=params,
                          channel_draws=args.draws, seed=seed,
                          output=args.out)
    report = run_ifi_study(spec)
    print(f"draws {report.n_draws}  "
          f"single-type power {report.mean_power_single:.4e}  "
          f"two-type power {report.mean_power_multi:.4e}  "
          f"ratio {report.ratio:.4f}")
    _render(args, plots.plot_ifi_study, report)
    return 0


def _cmd_gauss(args) -> int:
    cfg, params, seed = _load(args)
    spec = ExperimentSpec(experiment="gaussianity", config=cfg,
                          channel=params, trials=args.trials, seed=seed,
                          output=args.out)
    rows = run_gaussianity_check(spec)
    for r in rows:
        print(f"ratio {r['ratio']:3d}  {r['component']:4s}  "
              f"var/closed {r['var_ratio']:.4f}  skew {r['skew']:+.4f}  "
              f"ex-kurtosis {r['excess_kurtosis']:+.4f}")
    _render(args, plots.plot_gaussianity, rows)
    return 0


def _cmd_validate(args) -> int:
    cfg, params, seed = _load(args)
    spec = ExperimentSpec(experiment="validate", config=cfg, channel=params,
                          trials=args.trials, seed=seed, output=args.out)
    report = run_validate(spec)
    print(f"trials {report.n_trials}  "
          f"max rel gap {report.max_rel_gap:.3e}  "
          f"mean rel gap {report.mean_rel_gap:.3e}")
    _render(args, plots.plot_validation, report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpulse",
        description="Multi-pulse impulse-radio link experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=DEFAULT_CONFIG,
                        help="system config file "
                             f"(default {DEFAULT_CONFIG})")
    common.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    common.add_argument("--taps", type=int, default=None,
                        help="channel tap count (default "
                             "the standard 20-tap profile)")
    common.add_argument("--out", default=None,
                        help="CSV destination; a .png figure lands beside it")
    common.add_argument("--no-plot", action="store_true",
                        help="skip figure rendering")

    pulses = argparse.ArgumentParser(add_help=False)
    pulses.add_argument("--np", dest="n_p", type=int, default=None,
                        help="number of pulse types (orders default to "
                             f"{DEFAULT_FIRST_ORDER},"
                             f"{DEFAULT_FIRST_ORDER + 1},...)")
    pulses.add_argument("--mhp-orders", default=None,
                        help="comma-separated pulse orders")

    p = sub.add_parser("ber", parents=[common, pulses],
                       help="bit-error-rate sweep over an SNR grid")
    p.add_argument("--snr", default="0:20:2",
                   help="grid as A:B:STEP dB or a comma list (default "
                        "0:20:2)")
    p.add_argument("--trials", type=int, default=200000,
                   help="max trials per SNR point (default 200000)")
    p.add_argument("--engine", choices=(ENGINE_SEMI, ENGINE_WAVEFORM),
                   default=ENGINE_SEMI,
                   help="decision engine (default semi)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes (default 1)")
    p.add_argument("--min-errors", type=int, default=50,
                   help="per-point error target for early stop (default 50)")
    p.set_defaults(func=_cmd_ber)

    p = sub.add_parser("psd", parents=[common, pulses],
                       help="transmit spectrum versus the analytic average")
    p.add_argument("--trials", type=int, default=1200,
                   help="symbols to synthesize (default 1200)")
    p.set_defaults(func=_cmd_psd)

    p = sub.add_parser("ifi", parents=[common],
                       help="spill-power study, one versus two pulse types")
    p.add_argument("--draws", type=int, default=1000,
                   help="channel draws (default 1000)")
    p.set_defaults(func=_cmd_ifi)

    p = sub.add_parser("gauss", parents=[common],
                       help="normality check for interference components")
    p.add_argument("--trials", type=int, default=10000,
                   help="code draws per ratio (default 10000)")
    p.set_defaults(func=_cmd_gauss)

    p = sub.add_parser("validate", parents=[common, pulses],
                       help="table engine versus waveform engine")
    p.add_argument("--trials", type=int, default=1000,
                   help="random trials (default 1000)")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
