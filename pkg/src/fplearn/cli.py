"""Command-line front end.

Subcommands::

    fplearn run --config experiment.json [--out DIR] [--seeds 1,2,3]
                [--horizon N] [--workers N]
    fplearn compare summary.json [summary2.json ...] [--out comparison.csv]
    fplearn validate-schedule [--beta B | --sequence-file F]
                              [--sample-c C --sample-gamma G
                               --sample-rounding {ceil,floor}] [--t-check N]
    fplearn list-games
"""

import argparse
import json
import sys

from .estimation import validate_step_schedule
from .exceptions import ConfigError, MismatchedExperiments, OracleUnavailable
from .experiments import ExperimentConfig, compare_summaries, run_experiment
from .gamefiles import list_builtin_games
from .schedules import SampleCountSchedule


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fplearn",
        description="Repeated-play learning experiments on finite games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("--config", required=True, help="experiment config JSON")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--seeds", default=None, help="comma-separated seed overrides")
    p_run.add_argument("--horizon", type=int, default=None, help="horizon override")
    p_run.add_argument("--workers", type=int, default=1, help="process-pool size")

    p_cmp = sub.add_parser("compare", help="compare arms across run summaries")
    p_cmp.add_argument("summaries", nargs="+", help="summary.json paths")
    p_cmp.add_argument("--out", default=None, help="write plot-ready comparison CSV here")

    p_val = sub.add_parser("validate-schedule", help="check schedule assumptions")
    p_val.add_argument("--beta", type=float, default=None, help="step size t^-beta")
    p_val.add_argument(
        "--sequence-file", default=None, help="JSON array of explicit step sizes"
    )
    p_val.add_argument("--t-check", type=int, default=1_000_000)
    p_val.add_argument("--sample-c", type=float, default=None)
    p_val.add_argument("--sample-gamma", type=float, default=None)
    p_val.add_argument("--sample-rounding", choices=("ceil", "floor"), default="ceil")

    sub.add_parser("list-games", help="list builtin game names")
    return parser


def _parse_seeds(text):
    try:
        return [int(s) for s in text.split(",") if s.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad --seeds list {text!r}") from exc


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    overrides = {}
    if args.seeds is not None:
        seeds = _parse_seeds(args.seeds)
        if not seeds:
            raise ConfigError("--seeds override is empty")
        if len(set(seeds)) != len(seeds):
            raise ConfigError("--seeds override has duplicates")
        overrides["seeds"] = tuple(seeds)
    if args.horizon is not None:
        if args.horizon < 1:
            raise ConfigError("--horizon must be >= 1")
        overrides["horizon"] = args.horizon
    if overrides:
        data = config.as_dict()
        data.update(
            {"seeds": list(overrides.get("seeds", config.seeds))}
        )
        if "horizon" in overrides:
            data["horizon"] = overrides["horizon"]
        config = ExperimentConfig.from_dict(data)
    out_dir = args.out or config.out_dir
    if not out_dir:
        raise ConfigError("no output directory: pass --out or set out_dir in the config")
    summary = run_experiment(config, out_dir, workers=max(1, args.workers))
    total_runs = sum(len(arm["runs"]) for arm in summary["arms"])
    print(f"wrote {total_runs} run(s) to {out_dir}")
    return 0


def _cmd_compare(args) -> int:
    lines, _ = compare_summaries(args.summaries, out_csv=args.out)
    print("\n".join(lines))
    if args.out:
        print(f"comparison CSV written to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    reports = []
    if args.sequence_file is not None and args.beta is not None:
        raise ConfigError("give either --beta or --sequence-file, not both")
    if args.sequence_file is not None:
        try:
            with open(args.sequence_file) as fh:
                seq = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read sequence file: {exc}") from exc
        reports.append(validate_step_schedule(seq, t_check=args.t_check))
    elif args.beta is not None:
        reports.append(validate_step_schedule(args.beta, t_check=args.t_check))
    if args.sample_c is not None or args.sample_gamma is not None:
        schedule = SampleCountSchedule(
            c=args.sample_c if args.sample_c is not None else 1.0,
            gamma=args.sample_gamma if args.sample_gamma is not None else 0.6,
            rounding=args.sample_rounding,
        )
        reports.append(schedule.validate())
    if not reports:
        raise ConfigError(
            "nothing to validate: give --beta, --sequence-file, or --sample-* flags"
        )
    ok = True
    for report in reports:
        print("\n".join(report.lines()))
        ok = ok and report.passed
    return 0 if ok else 1


def _cmd_list_games(args) -> int:
    for name, desc in list_builtin_games():
        print(f"{name:<44} {desc}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "compare": _cmd_compare,
        "validate-schedule": _cmd_validate,
        "list-games": _cmd_list_games,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, MismatchedExperiments, OracleUnavailable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
