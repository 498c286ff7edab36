"""Experiment harness: run (arm x seed) grids, write artifacts, compare.

An experiment config (JSON) names a game, a horizon, a seed list, and one
or more arms (algorithm plus schedule parameters). `run_experiment`
executes every (arm, seed) pair — optionally in a process pool — and
writes one per-run CSV plus a single ``summary.json``; all files are
deterministic except wall-clock fields. `compare_summaries` aggregates
two or more arms over seeds (median and interquartile range at each
metric round) into a plot-ready CSV and a text table.
"""

import concurrent.futures
import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .engines import ALGORITHMS, run
from .exceptions import ConfigError, MismatchedExperiments
from .gamefiles import game_fingerprint, game_from_spec, load_game
from .schedules import SampleCountSchedule, StepSizeSchedule

CONFIG_SCHEMA_VERSION = 1
SUMMARY_SCHEMA_VERSION = 1

_QUANTITIES = (
    "nash_gap",
    "gwfp_epsilon",
    "max_estimate_error",
    "expected_travel_time",
    "potential_value",
    "cumulative_samples",
    "cumulative_wall_ns",
)


@dataclass(frozen=True)
class ArmSpec:
    """One algorithm configuration inside an experiment."""

    name: str
    algorithm: str
    c: float = 1.0
    gamma: float = 0.6
    rounding: str = "ceil"
    beta: float = 0.6
    sequence: tuple | None = None
    shared: bool = True

    @classmethod
    def from_dict(cls, d, index) -> "ArmSpec":
        if not isinstance(d, dict):
            raise ConfigError(f"arm {index} must be an object")
        algorithm = d.get("algorithm")
        if algorithm not in ALGORITHMS:
            raise ConfigError(
                f"arm {index}: algorithm must be one of {ALGORITHMS}, got {algorithm!r}"
            )
        known = {"name", "algorithm", "c", "gamma", "rounding", "beta", "sequence", "shared"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"arm {index}: unknown fields {sorted(unknown)}")
        seq = d.get("sequence")
        return cls(
            name=str(d.get("name", algorithm)),
            algorithm=algorithm,
            c=float(d.get("c", 1.0)),
            gamma=float(d.get("gamma", 0.6)),
            rounding=str(d.get("rounding", "ceil")),
            beta=float(d.get("beta", 0.6)),
            sequence=tuple(float(v) for v in seq) if seq is not None else None,
            shared=bool(d.get("shared", True)),
        )

    def as_dict(self) -> dict:
        out = {"name": self.name, "algorithm": self.algorithm, "shared": self.shared}
        if self.algorithm == "sampled_fp":
            out.update({"c": self.c, "gamma": self.gamma, "rounding": self.rounding})
        elif self.algorithm == "cesfp":
            if self.sequence is not None:
                out["sequence"] = list(self.sequence)
            else:
                out["beta"] = self.beta
        return out

    def run_kwargs(self) -> dict:
        kwargs = {"shared_samples": self.shared}
        if self.algorithm == "sampled_fp":
            kwargs["sample_schedule"] = SampleCountSchedule(
                c=self.c, gamma=self.gamma, rounding=self.rounding
            )
        elif self.algorithm == "cesfp":
            if self.sequence is not None:
                kwargs["step_schedule"] = StepSizeSchedule(sequence=self.sequence)
            else:
                kwargs["step_schedule"] = StepSizeSchedule(beta=self.beta)
        return kwargs


@dataclass
class ExperimentConfig:
    """Validated experiment description."""

    game_spec: object
    horizon: int
    seeds: tuple
    arms: tuple
    metric_times: object = "geometric"
    tie_rule: str = "lowest_index"
    initial_action: object = "first"
    out_dir: str | None = None

    @classmethod
    def from_dict(cls, d) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        version = d.get("schema_version")
        if version != CONFIG_SCHEMA_VERSION:
            raise ConfigError(
                f"config schema_version must be {CONFIG_SCHEMA_VERSION}, got {version!r}"
            )
        if "game" in d:
            game_spec = d["game"]
        elif "game_file" in d:
            try:
                game = load_game(d["game_file"])
            except ConfigError:
                raise
            game_spec = game.describe()
        else:
            raise ConfigError("config needs a 'game' spec or a 'game_file' path")
        try:
            horizon = int(d.get("horizon", 0))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad horizon: {d.get('horizon')!r}") from exc
        if horizon < 1:
            raise ConfigError("horizon must be >= 1")
        seeds_raw = d.get("seeds")
        if not isinstance(seeds_raw, (list, tuple)) or not seeds_raw:
            raise ConfigError("seeds must be a non-empty list of integers")
        try:
            seeds = tuple(int(s) for s in seeds_raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad seeds list {seeds_raw!r}") from exc
        if len(set(seeds)) != len(seeds):
            raise ConfigError("seeds must be distinct")
        arms_raw = d.get("arms")
        if not isinstance(arms_raw, list) or not arms_raw:
            raise ConfigError("config needs at least one arm")
        arms = tuple(ArmSpec.from_dict(a, i) for i, a in enumerate(arms_raw))
        names = [a.name for a in arms]
        if len(set(names)) != len(names):
            raise ConfigError(f"arm names must be unique, got {names}")
        metric_times = d.get("metric_times", "geometric")
        if isinstance(metric_times, list):
            metric_times = tuple(int(t) for t in metric_times)
        config = cls(
            game_spec=game_spec,
            horizon=horizon,
            seeds=seeds,
            arms=arms,
            metric_times=metric_times,
            tie_rule=str(d.get("tie_rule", "lowest_index")),
            initial_action=d.get("initial_action", "first"),
            out_dir=d.get("out_dir"),
        )
        config.build_game()  # validate the game spec eagerly
        return config

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def build_game(self):
        return game_from_spec(self.game_spec)

    def as_dict(self) -> dict:
        metric_times = self.metric_times
        if isinstance(metric_times, tuple):
            metric_times = list(metric_times)
        initial = self.initial_action
        if isinstance(initial, tuple):
            initial = list(initial)
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "game": self.game_spec,
            "horizon": self.horizon,
            "seeds": list(self.seeds),
            "arms": [a.as_dict() for a in self.arms],
            "metric_times": metric_times,
            "tie_rule": self.tie_rule,
            "initial_action": initial,
        }


def _execute_task(payload):
    """Run one (arm, seed) pair; top-level so process pools can pickle it."""
    config = ExperimentConfig.from_dict(payload["config"])
    arm = config.arms[payload["arm_index"]]
    game = config.build_game()
    return run(
        game,
        arm.algorithm,
        config.horizon,
        tie_rule=config.tie_rule,
        initial_action=config.initial_action,
        metric_times=config.metric_times,
        random_state=payload["seed"],
        **arm.run_kwargs(),
    )


def run_experiment(config: ExperimentConfig, out_dir, workers=1) -> dict:
    """Execute all (arm, seed) pairs and write CSVs plus summary.json.

    Returns the summary dict. Files: ``<arm>__seed<seed>.csv`` per run,
    ``summary.json`` for the whole experiment; a single process writes
    everything regardless of the worker count.
    """
    os.makedirs(out_dir, exist_ok=True)
    game = config.build_game()
    fingerprint = game_fingerprint(game)
    config_dict = config.as_dict()
    tasks = [
        {"config": config_dict, "arm_index": ai, "seed": seed}
        for ai in range(len(config.arms))
        for seed in config.seeds
    ]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_execute_task, tasks))
    else:
        records = [_execute_task(t) for t in tasks]

    arms_out = []
    idx = 0
    for arm in config.arms:
        runs_out = []
        for seed in config.seeds:
            record = records[idx]
            idx += 1
            csv_name = f"{arm.name}__seed{seed}.csv"
            record.to_csv(os.path.join(out_dir, csv_name))
            entry = record.summary()
            entry["csv"] = csv_name
            runs_out.append(entry)
        arms_out.append(
            {"name": arm.name, "algorithm": arm.algorithm, "params": arm.as_dict(), "runs": runs_out}
        )
    summary = {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "game": {"fingerprint": fingerprint, "spec": game.describe()},
        "horizon": config.horizon,
        "config": config_dict,
        "arms": arms_out,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _load_summary(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read summary {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"summary {path} is not valid JSON: {exc}") from exc


def compare_summaries(paths, out_csv=None):
    """Aggregate arms across seeds and summaries into a comparison report.

    All summaries must describe the same game (by fingerprint) and
    horizon; raises MismatchedExperiments otherwise. Needs at least two
    arms in total. Returns (table_lines, rows); rows are plot-ready
    dicts (one per arm, metric round, and quantity) with median and
    interquartile range across seeds, optionally written to `out_csv`.
    """
    summaries = [_load_summary(p) for p in paths]
    if not summaries:
        raise ConfigError("need at least one summary file")
    fingerprints = {s.get("game", {}).get("fingerprint") for s in summaries}
    if len(fingerprints) != 1 or None in fingerprints:
        raise MismatchedExperiments(f"summaries describe different games: {fingerprints}")
    horizons = {s.get("horizon") for s in summaries}
    if len(horizons) != 1:
        raise MismatchedExperiments(f"summaries have different horizons: {horizons}")

    arms = []
    seen_names = set()
    for si, summary in enumerate(summaries):
        for arm in summary.get("arms", []):
            name = arm["name"]
            if name in seen_names:
                name = f"{name}#{si}"
            seen_names.add(name)
            arms.append((name, arm))
    if len(arms) < 2:
        raise MismatchedExperiments("need at least two arms to compare")

    rows = []
    lines = [
        f"comparison over {len(arms)} arms, horizon {next(iter(horizons))}",
        f"{'arm':<24} {'algorithm':<12} {'seeds':>5} {'samples(med)':>14} "
        f"{'wall_ms(med)':>13} {'final_gap(med)':>15}",
    ]
    for name, arm in arms:
        runs = arm.get("runs", [])
        per_seed_snaps = [
            {snap["t"]: snap for snap in run_entry.get("snapshots", [])}
            for run_entry in runs
        ]
        common_ts = sorted(set.intersection(*(set(s) for s in per_seed_snaps))) if per_seed_snaps else []
        for t in common_ts:
            for quantity in _QUANTITIES:
                values = [s[t].get(quantity) for s in per_seed_snaps]
                if any(v is None for v in values):
                    continue
                arr = np.asarray(values, dtype=float)
                rows.append(
                    {
                        "arm": name,
                        "algorithm": arm.get("algorithm", ""),
                        "t": t,
                        "quantity": quantity,
                        "median": float(np.median(arr)),
                        "q25": float(np.percentile(arr, 25)),
                        "q75": float(np.percentile(arr, 75)),
                    }
                )
        samples = np.asarray([r.get("cumulative_samples", 0) for r in runs], dtype=float)
        wall = np.asarray([r.get("total_wall_ns", 0) for r in runs], dtype=float)
        gaps = [
            (r.get("final") or {}).get("nash_gap")
            for r in runs
        ]
        gap_txt = "n/a"
        if gaps and all(g is not None for g in gaps):
            gap_txt = f"{float(np.median(np.asarray(gaps, dtype=float))):.6g}"
        lines.append(
            f"{name:<24} {arm.get('algorithm', ''):<12} {len(runs):>5} "
            f"{float(np.median(samples)):>14.0f} {float(np.median(wall)) / 1e6:>13.3f} "
            f"{gap_txt:>15}"
        )

    if out_csv is not None:
        with open(out_csv, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh,
                fieldnames=["arm", "algorithm", "t", "quantity", "median", "q25", "q75"],
            )
            writer.writeheader()
            writer.writerows(rows)
    return lines, rows
