"""Command-line interface.

Subcommands: ``sweep`` runs an experiment from a JSON config, ``figure``
runs one of the built-in sweeps, ``verify-lemma`` stress-tests the
eigen-optimal jamming design, and ``mse`` evaluates a single scenario and
prints one CSV row. Exit codes: 0 on success, 2 for usage/config errors,
1 for compute or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .channel import exponential_covariance
from .experiments import (
    CSV_HEADER,
    ConfigError,
    FIGURE_SEED,
    JAMMING_CHOICES,
    ResultRow,
    ExperimentSpec,
    figure_spec,
    row_fields,
    run_sweep,
    spec_from_dict,
    write_results,
)
from .jammer import optimal_jamming, single_shot_jamming, verify_lemma
from .training import (
    ESTIMATOR_MODES,
    PILOT_DESIGNS,
    TrainingConfig,
    empirical_mse,
    optimal_pilots,
    random_unitary_pilots,
    scenario_closed_form_mse,
    worst_case_pilots,
)

__all__ = ["build_parser", "main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fddjam",
        description=(
            "Channel-training MSE for a massive-MIMO downlink under a "
            "multi-antenna jammer"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run an experiment sweep from a JSON config")
    p_sweep.add_argument("--config", required=True, type=Path, help="JSON config file")
    p_sweep.add_argument("--out", required=True, type=Path, help="output directory")

    p_fig = sub.add_parser("figure", help="run a built-in sweep (1, 2 or 3)")
    p_fig.add_argument("figure", type=int, choices=(1, 2, 3))
    p_fig.add_argument("--out", required=True, type=Path, help="output directory")
    p_fig.add_argument("--trials", type=int, default=0,
                       help="Monte-Carlo trials per point (0 = closed form only)")
    p_fig.add_argument("--seed", type=int, default=FIGURE_SEED)

    p_ver = sub.add_parser(
        "verify-lemma",
        help="stress-test eigen-optimal jamming against random candidates",
    )
    p_ver.add_argument("--config", required=True, type=Path, help="JSON config file")

    p_mse = sub.add_parser("mse", help="evaluate one scenario, print one CSV row")
    p_mse.add_argument("--M", type=int, required=True, help="BS antennas")
    p_mse.add_argument("--N", type=int, default=None,
                       help="jammer antennas (default: same as --M)")
    p_mse.add_argument("--L", type=int, required=True, help="training length")
    p_mse.add_argument("--r", type=float, required=True,
                       help="BS channel correlation coefficient")
    p_mse.add_argument("--rg", type=float, default=None,
                       help="jammer channel correlation (default: same as --r)")
    p_mse.add_argument("--pb-db", type=float, required=True,
                       help="BS power in dB relative to the noise variance")
    p_mse.add_argument("--pj-db", type=float, default=None,
                       help="jammer power in dB (default: same as --pb-db)")
    p_mse.add_argument("--pilot", choices=PILOT_DESIGNS, default="optimal")
    p_mse.add_argument("--jamming", choices=JAMMING_CHOICES, default="silent")
    p_mse.add_argument("--estimator", choices=ESTIMATOR_MODES, default="jammer-aware")
    p_mse.add_argument("--trials", type=int, default=0,
                       help="Monte-Carlo trials (0 = closed form only)")
    p_mse.add_argument("--seed", type=int, default=0)
    return parser


def _load_json(path: Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _write_sweep(spec: ExperimentSpec, out_dir: Path, stem: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = run_sweep(spec)
    csv_path = out_dir / f"{stem}.csv"
    write_results(rows, csv_path, spec=spec)
    print(f"wrote {len(rows)} rows to {csv_path}")


def _cmd_sweep(args) -> int:
    spec = spec_from_dict(_load_json(args.config))
    _write_sweep(spec, args.out, args.config.stem)
    return 0


def _cmd_figure(args) -> int:
    spec = figure_spec(args.figure, monte_carlo_trials=args.trials, seed=args.seed)
    _write_sweep(spec, args.out, f"figure{args.figure}")
    return 0


_VERIFY_KEYS = frozenset(
    {"num_bs_antennas", "num_jammer_antennas", "pilot_length", "bs_power_db",
     "jammer_power_db", "noise_variance", "bs_correlation", "jammer_correlation",
     "pilot_design", "num_random", "seed"}
)


def _cmd_verify_lemma(args) -> int:
    data = _load_json(args.config)
    if not isinstance(data, dict):
        raise ConfigError(f"config must be a JSON object, got {type(data).__name__}")
    unknown = set(data) - _VERIFY_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    required = {"num_bs_antennas", "num_jammer_antennas", "pilot_length",
                "bs_power_db", "bs_correlation"}
    missing = required - set(data)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    cfg = TrainingConfig(
        num_bs_antennas=data["num_bs_antennas"],
        num_jammer_antennas=data["num_jammer_antennas"],
        pilot_length=data["pilot_length"],
        bs_power_db=float(data["bs_power_db"]),
        jammer_power_db=float(data.get("jammer_power_db", data["bs_power_db"])),
        noise_variance=float(data.get("noise_variance", 1.0)),
        bs_correlation=float(data["bs_correlation"]),
        jammer_correlation=(
            None if data.get("jammer_correlation") is None
            else float(data["jammer_correlation"])
        ),
    )
    pilot_design = data.get("pilot_design", "optimal")
    num_random = data.get("num_random", 500)
    seed = data.get("seed", 0)

    bs_cov = exponential_covariance(cfg.num_bs_antennas, cfg.bs_correlation)
    jam_cov = exponential_covariance(cfg.num_jammer_antennas, cfg.jammer_correlation)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if pilot_design == "optimal":
        pilots = optimal_pilots(bs_cov, cfg.pilot_length)
    elif pilot_design == "worst-case":
        pilots = worst_case_pilots(bs_cov, cfg.pilot_length)
    elif pilot_design == "random-unitary":
        pilots = random_unitary_pilots(cfg.num_bs_antennas, cfg.pilot_length, rng)
    else:
        raise ConfigError(
            f"unknown pilot design {pilot_design!r}; expected one of {PILOT_DESIGNS}"
        )
    verdict = verify_lemma(bs_cov, jam_cov, pilots, cfg, num_random, rng)

    def fmt(value):
        return "n/a" if value is None else format(value, ".12g")

    print(f"eigen-optimal objective: {fmt(verdict.optimal_objective)}")
    print(f"eigen-optimal MSE:       {fmt(verdict.optimal_mse)}")
    print(f"best random objective:   {fmt(verdict.best_random_objective)}")
    print(f"best random MSE:         {fmt(verdict.best_random_mse)}")
    print(f"random samples:          {verdict.num_samples}")
    print(f"MSE counterexample:      {'yes' if verdict.mse_counterexample_found else 'no'}")
    return 0


def _cmd_mse(args) -> int:
    cfg = TrainingConfig(
        num_bs_antennas=args.M,
        num_jammer_antennas=args.N if args.N is not None else args.M,
        pilot_length=args.L,
        bs_power_db=args.pb_db,
        jammer_power_db=args.pj_db if args.pj_db is not None else args.pb_db,
        noise_variance=1.0,
        bs_correlation=args.r,
        jammer_correlation=args.rg,
    )
    if args.trials < 0:
        raise ConfigError(f"--trials must be non-negative, got {args.trials}")
    bs_cov = exponential_covariance(cfg.num_bs_antennas, cfg.bs_correlation)
    jam_cov = exponential_covariance(cfg.num_jammer_antennas, cfg.jammer_correlation)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    if args.pilot == "optimal":
        pilots = optimal_pilots(bs_cov, cfg.pilot_length)
    elif args.pilot == "worst-case":
        pilots = worst_case_pilots(bs_cov, cfg.pilot_length)
    else:
        pilots = random_unitary_pilots(cfg.num_bs_antennas, cfg.pilot_length, rng)
    if args.jamming == "silent":
        jamming = None
    elif args.jamming == "single-shot":
        jamming = single_shot_jamming(cfg.num_jammer_antennas, cfg.pilot_length)
    else:
        jamming = optimal_jamming(jam_cov, cfg.pilot_length)

    closed = scenario_closed_form_mse(pilots, jamming, bs_cov, jam_cov, cfg, args.estimator)
    mse_mc = std_err = None
    if args.trials > 0:
        mc = empirical_mse(
            pilots, jamming, bs_cov, jam_cov, cfg,
            trials=args.trials, rng=rng, estimator_mode=args.estimator,
        )
        mse_mc, std_err = mc.mean, mc.std_error
    row = ResultRow(
        axis_value=cfg.pilot_length,
        pilot_design=args.pilot,
        jamming=args.jamming,
        estimator_mode=args.estimator,
        closed_form_mse=closed,
        empirical_mse=mse_mc,
        empirical_std_err=std_err,
    )
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerow(row_fields(row))
    return 0


_COMMANDS = {
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
    "verify-lemma": _cmd_verify_lemma,
    "mse": _cmd_mse,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
