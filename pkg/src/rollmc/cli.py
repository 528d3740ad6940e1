"""Command line front end: run, tune-subsample, analyze, default-config."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .analysis import coverage_report, kaplan_meier, write_coverage_csv, write_survival_csv
from .config import RunConfig, default_config_text, load_config
from .engine import tune_subsample
from .errors import ConfigError, RollmcError
from .harness import (
    SystemRun,
    build_football_run,
    build_lgm_run,
    build_synthetic_football_run,
    read_lifetimes_csv,
    read_predictions_csv,
)
from .models import football as fb

MODELS = ("lgm", "football", "football-synth")


def _load_run_config(args) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    if getattr(args, "batch_mode", None):
        config = config.overridden(batch_mode=args.batch_mode)
    return config


def _build(model_name: str, config: RunConfig, data_path):
    if model_name == "lgm":
        model, events, _, _ = build_lgm_run(config)
    elif model_name == "football":
        if not data_path:
            raise ConfigError("--data is required for the football model")
        model, events = build_football_run(fb.read_results_csv(data_path), config)
    else:
        model, events, _ = build_synthetic_football_run(config)
    return model, events


def cmd_run(args) -> int:
    config = _load_run_config(args)
    model, events = _build(args.model, config, args.data)
    os.makedirs(args.out, exist_ok=True)
    db_path = args.db_path or os.path.join(args.out, "checkpoint.db")
    if args.resume:
        run = SystemRun.load_checkpoint(db_path, model, events, config)
    else:
        run = SystemRun(model, events, config, seed=args.seed)
    run.run_to_completion(db_path=db_path)
    run.write_outputs(args.out)
    last = run.reports[-1]
    print(
        f"run complete: {run.data_batches} batches, {run.resumes} resumes, "
        f"{last.mcmc_steps} MCMC steps, final accuracy {last.accuracy:.6g}"
    )
    return 0


def cmd_tune_subsample(args) -> int:
    config = _load_run_config(args)
    model, events = _build(args.model, config, args.data)
    for step, payload in events:
        model.advance(step, payload)
    rng = np.random.default_rng(args.seed)
    value = model.initial_value(rng)
    stats = np.empty(args.pilot_steps)
    for i in range(args.pilot_steps):
        value = model.mcmc_steps(value, 1, rng)
        stats[i] = model.pilot_statistic(value)
    stride = tune_subsample(stats, target_rho=args.target_rho)
    print(f"suggested subsample stride: {stride}")
    return 0


def cmd_analyze(args) -> int:
    if not (args.survival or args.coverage):
        raise ConfigError("nothing to do: pass --survival and/or --coverage")
    if args.survival:
        lifetimes = read_lifetimes_csv(os.path.join(args.indir, "lifetimes.csv"))
        km = kaplan_meier(lifetimes)
        write_survival_csv(os.path.join(args.indir, "survival.csv"), km)
        print("batches_survived  survival  at_risk  events")
        for u, s, r, d in zip(km.times, km.survival, km.at_risk, km.events):
            print(f"{u:16g}  {s:8.4f}  {r:7d}  {d:6d}")
    if args.coverage:
        rows, ranks = read_predictions_csv(os.path.join(args.indir, "predictions.csv"))
        if not rows:
            raise ConfigError("no resolved predictions found in predictions.csv")
        report = coverage_report(rows, ranks)
        write_coverage_csv(os.path.join(args.indir, "coverage.csv"), report)
        print("level  avg_mass  realized_coverage")
        for row in report:
            print(f"{row.level:5g}  {row.avg_mass:8.4f}  {row.realized_coverage:17.4f}")
    return 0


def cmd_default_config(args) -> int:
    sys.stdout.write(default_config_text())
    return 0


def _add_model_args(parser, with_mode: bool = True):
    parser.add_argument("--model", required=True, choices=MODELS)
    parser.add_argument("--config", help="flat key=value config file (defaults otherwise)")
    parser.add_argument("--data", help="results CSV, required for --model football")
    if with_mode:
        parser.add_argument(
            "--batch-mode", choices=fb.BATCH_MODES, help="override the configured batch mode"
        )
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rollmc",
        description="Rolling MCMC runs with accuracy-controlled pausing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="execute a rolling run over a data stream")
    _add_model_args(runp)
    runp.add_argument("--out", required=True, help="output directory for the report files")
    runp.add_argument("--db-path", help="checkpoint path (default: OUT/checkpoint.db)")
    runp.add_argument(
        "--resume", action="store_true",
        help="continue from the checkpoint at --db-path instead of starting fresh",
    )
    runp.set_defaults(func=cmd_run)

    tunep = sub.add_parser(
        "tune-subsample", help="suggest a thinning stride from a pilot chain"
    )
    _add_model_args(tunep)
    tunep.add_argument("--pilot-steps", type=int, default=20000)
    tunep.add_argument("--target-rho", type=float, default=2.0)
    tunep.set_defaults(func=cmd_tune_subsample)

    anap = sub.add_parser("analyze", help="post-hoc summaries from a run directory")
    anap.add_argument("--survival", action="store_true", help="sample survival curve")
    anap.add_argument("--coverage", action="store_true", help="rank interval coverage")
    anap.add_argument("--in", dest="indir", required=True, help="run output directory")
    anap.set_defaults(func=cmd_analyze)

    confp = sub.add_parser("default-config", help="print every config key with its default")
    confp.set_defaults(func=cmd_default_config)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RollmcError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
