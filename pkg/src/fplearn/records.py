"""Round-by-round run records and their CSV/JSON serializations."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .metrics import MetricSnapshot

CSV_COLUMNS = (
    "t",
    "samples_this_round",
    "cumulative_samples",
    "wall_ns",
    "nash_gap",
    "gwfp_epsilon",
    "expected_travel_time",
    "potential",
)

# Snapshot field -> CSV column for the metric cells.
_SNAPSHOT_TO_CSV = {
    "nash_gap": "nash_gap",
    "gwfp_epsilon": "gwfp_epsilon",
    "expected_travel_time": "expected_travel_time",
    "potential_value": "potential",
}


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


@dataclass
class RunRecord:
    """Everything one engine run produced.

    Per-round arrays cover rounds t = 1..horizon: the joint action chosen
    for round t+1, samples drawn in round t, and the time spent on the
    algorithm step (instrumentation excluded) on two clocks — monotonic
    wall time and thread CPU time. The CPU clock gives a
    contention-immune view of the same per-iteration cost on busy
    machines. Snapshots hold metric values at the configured rounds. Two
    runs of the same configuration are identical except for the timing
    fields.
    """

    algorithm: str
    horizon: int
    seed: int | None
    game_description: dict
    params: dict
    initial_actions: np.ndarray
    actions: np.ndarray
    samples_per_round: np.ndarray
    wall_ns: np.ndarray
    cpu_ns: np.ndarray = None
    snapshots: list = field(default_factory=list)
    final_empirical: object = None
    final_estimates: object = None
    estimate_rows: np.ndarray | None = None

    @property
    def cumulative_samples(self) -> np.ndarray:
        return np.cumsum(self.samples_per_round)

    @property
    def total_samples(self) -> int:
        return int(self.samples_per_round.sum())

    @property
    def total_wall_ns(self) -> int:
        return int(self.wall_ns.sum())

    @property
    def cumulative_wall_ns(self) -> np.ndarray:
        return np.cumsum(self.wall_ns)

    def action_history(self) -> np.ndarray:
        """All played joint actions a(1)..a(horizon+1), shape (T+1, n)."""
        return np.vstack([self.initial_actions[None, :], self.actions])

    def snapshot_at(self, t: int) -> MetricSnapshot:
        for snap in self.snapshots:
            if snap.t == t:
                return snap
        raise KeyError(f"no snapshot at round {t}")

    def to_csv(self, path) -> None:
        """One row per round in the documented column layout.

        Metric cells are filled on snapshot rounds and left empty
        elsewhere; `wall_ns` is the only non-deterministic column.
        """
        by_t = {snap.t: snap for snap in self.snapshots}
        cum = self.cumulative_samples
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for idx in range(self.horizon):
                t = idx + 1
                row = [
                    str(t),
                    str(int(self.samples_per_round[idx])),
                    str(int(cum[idx])),
                    str(int(self.wall_ns[idx])),
                ]
                snap = by_t.get(t)
                for fld in _SNAPSHOT_TO_CSV:
                    row.append(_fmt(getattr(snap, fld)) if snap is not None else "")
                writer.writerow(row)

    def summary(self) -> dict:
        """JSON-ready per-run summary used by the experiment harness."""
        cum_samples = self.cumulative_samples
        cum_wall = self.cumulative_wall_ns
        snaps = []
        for snap in self.snapshots:
            entry = snap.as_dict()
            entry["cumulative_samples"] = int(cum_samples[snap.t - 1])
            entry["cumulative_wall_ns"] = int(cum_wall[snap.t - 1])
            snaps.append(entry)
        final = self.snapshots[-1].as_dict() if self.snapshots else None
        return {
            "seed": self.seed,
            "algorithm": self.algorithm,
            "horizon": self.horizon,
            "cumulative_samples": self.total_samples,
            "total_wall_ns": self.total_wall_ns,
            "final": final,
            "snapshots": snaps,
        }

    def equals_ignoring_time(self, other: "RunRecord") -> bool:
        """Bit-identical comparison of everything except wall-clock fields."""
        if (
            self.algorithm != other.algorithm
            or self.horizon != other.horizon
            or self.params != other.params
            or not np.array_equal(self.initial_actions, other.initial_actions)
            or not np.array_equal(self.actions, other.actions)
            or not np.array_equal(self.samples_per_round, other.samples_per_round)
        ):
            return False
        if len(self.snapshots) != len(other.snapshots):
            return False
        for a, b in zip(self.snapshots, other.snapshots):
            if a.as_dict() != b.as_dict():
                return False
        mine = self.final_empirical
        theirs = other.final_empirical
        if (mine is None) != (theirs is None):
            return False
        if mine is not None:
            for va, vb in zip(mine.vectors, theirs.vectors, strict=True):
                if not np.array_equal(va, vb):
                    return False
        return True
