"""Repeated-play learning engines.

Three ways to pick next-round actions against the empirical history of
play, sharing one loop:

- ``fp_exact``: best-respond to exact expected utilities (needs an exact
  oracle: an enumerable game or a congestion game); draws no samples.
- ``sampled_fp``: each round draw k_t joint test actions from the
  empirical distribution, average the pure utilities they induce, and
  best-respond to the averages; estimates start afresh every round.
- ``cesfp``: draw a single test action per round and fold its pure
  utilities into a running estimate table with weight rho(t); the table
  persists across rounds, so one sample per round suffices.

Runs are deterministic given (game, algorithm, schedules, horizon, seed):
re-running produces bit-identical records except wall-clock fields.

The sklearn-style wrappers (`FictitiousPlay`, `SampledFictitiousPlay`,
`SingleSampleFictitiousPlay`) expose the engines as estimators with
``fit(game)`` and get_params/set_params for sweep tooling.
"""

import itertools
import math
import time

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .congestion import (
    CongestionGame,
    expected_rosenthal_potential,
    expected_total_travel_time,
)
from .exceptions import EnumerationTooLarge, OracleUnavailable, StepSizeOutOfRange
from .games import ENUMERATION_GUARD, MixedStrategyProfile, profile_vectors, _readonly
from .metrics import CLAMP, MetricSnapshot
from .records import RunRecord
from .schedules import SampleCountSchedule, StepSizeSchedule
from .validation import as_rng, check_joint_action, check_simplex, check_step_size

ALGORITHMS = ("fp_exact", "sampled_fp", "cesfp")


class EmpiricalDistribution:
    """Normalized histogram of each player's past actions.

    After t rounds, vector i holds the relative frequency of each of
    player i's actions, so t * q_i has integer entries.
    """

    __slots__ = ("vectors", "t")

    def __init__(self, vectors, t):
        t = int(t)
        if t < 1:
            raise ValueError("round counter must be >= 1")
        checked = tuple(
            _readonly(check_simplex(v, name=f"empirical vector of player {i}"))
            for i, v in enumerate(vectors)
        )
        object.__setattr__(self, "vectors", checked)
        object.__setattr__(self, "t", t)

    def __setattr__(self, name, value):
        raise AttributeError("EmpiricalDistribution is immutable")

    def __reduce__(self):
        return (type(self), ([np.asarray(v) for v in self.vectors], self.t))

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, player):
        return self.vectors[player]

    @classmethod
    def from_joint_action(cls, action_counts, joint_action):
        """Point masses on the first-round actions."""
        vecs = []
        for m, a in zip(action_counts, joint_action, strict=True):
            v = np.zeros(int(m))
            v[int(a)] = 1.0
            vecs.append(v)
        return cls(vecs, 1)

    @classmethod
    def from_actions(cls, action_counts, actions):
        """Batch histogram over a full action history, shape (T, n)."""
        actions = np.asarray(actions, dtype=np.intp)
        if actions.ndim != 2 or actions.shape[0] == 0:
            raise ValueError("actions must be a non-empty (rounds, players) array")
        rounds, players = actions.shape
        if players != len(action_counts):
            raise ValueError("column count must match the number of players")
        vecs = [
            np.bincount(actions[:, i], minlength=int(m)) / rounds
            for i, m in enumerate(action_counts)
        ]
        return cls(vecs, rounds)

    def as_profile(self) -> MixedStrategyProfile:
        return MixedStrategyProfile(self.vectors)


def empirical_update(q: EmpiricalDistribution, joint_action) -> EmpiricalDistribution:
    """Fold one more joint action into the running average.

    Returns the distribution after round t+1:
    q_i(t+1) = q_i(t) + (one_hot(a_i) - q_i(t)) / (t + 1).
    """
    step = 1.0 / (q.t + 1)
    vecs = []
    for v, a in zip(q.vectors, joint_action, strict=True):
        a = int(a)
        if not 0 <= a < v.shape[0]:
            raise ValueError(f"action {a} out of range for a {v.shape[0]}-action player")
        new = v - step * v
        new[a] += step
        vecs.append(new)
    return EmpiricalDistribution(vecs, q.t + 1)


def draw_test_action(q, rng) -> tuple:
    """Draw one joint action, each player's component independently from q_i."""
    rng = as_rng(rng)
    vecs = getattr(q, "vectors", q)
    joint = []
    for v in vecs:
        v = np.asarray(v, dtype=float)
        idx = int(np.searchsorted(np.cumsum(v), rng.random(), side="left"))
        joint.append(min(idx, v.shape[0] - 1))
    return tuple(joint)


class UtilityEstimateTable:
    """Per-player, per-action expected-utility estimates."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        checked = []
        for i, row in enumerate(rows):
            arr = np.asarray(row, dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"estimate row of player {i} must be a vector")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"estimate row of player {i} has non-finite entries")
            checked.append(_readonly(arr))
        object.__setattr__(self, "rows", tuple(checked))

    def __setattr__(self, name, value):
        raise AttributeError("UtilityEstimateTable is immutable")

    def __reduce__(self):
        return (type(self), ([np.asarray(r) for r in self.rows],))

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, player):
        return self.rows[player]

    @classmethod
    def zeros(cls, action_counts):
        return cls([np.zeros(int(m)) for m in action_counts])


def sampled_fp_estimate(game, player, q, k, rng) -> np.ndarray:
    """Monte-Carlo utility estimates for one player from k fresh samples.

    Draws k joint test actions from q and returns, for each own action,
    the average pure utility against the sampled opponents. Stateless:
    nothing carries over between calls.
    """
    k = int(k)
    if k < 1:
        raise ValueError("sample count k must be >= 1")
    rng = as_rng(rng)
    acc = np.zeros(game.action_counts[player])
    for _ in range(k):
        joint = draw_test_action(q, rng)
        acc += game.pure_utility_row(player, joint)
    return acc / k


def cesfp_estimate_update(game, table, player, test_action, rho_t) -> UtilityEstimateTable:
    """Fold one test action into one player's estimate row.

    Returns a new table with row i replaced by
    (1 - rho_t) * old + rho_t * u_i(. , a*_{-i}); exactly one test action
    is consumed per round per table.
    """
    rho_t = check_step_size(rho_t)
    joint = check_joint_action(game, test_action)
    sample_row = game.pure_utility_row(player, joint)
    rows = list(table.rows)
    rows[player] = (1.0 - rho_t) * rows[player] + rho_t * sample_row
    return UtilityEstimateTable(rows)


def resolve_metric_times(horizon, spec="geometric") -> frozenset:
    """Rounds at which metrics are recorded.

    "geometric" (default): powers of two up to the horizon, plus the
    final round. An int means every that-many rounds (plus round 1 and
    the final round). An iterable is used as given, filtered to range.
    """
    horizon = int(horizon)
    if spec is None or spec == "geometric":
        times = {1, horizon}
        v = 2
        while v < horizon:
            times.add(v)
            v *= 2
        return frozenset(times)
    if isinstance(spec, (int, np.integer)):
        if spec < 1:
            raise ValueError("metric interval must be >= 1")
        times = set(range(int(spec), horizon + 1, int(spec)))
        times.update((1, horizon))
        return frozenset(times)
    times = {int(t) for t in spec}
    if any(t < 1 for t in times):
        raise ValueError("metric times must be >= 1")
    return frozenset(t for t in times if t <= horizon)


def _expected_potential_enumerated(game, vectors, potential_fn) -> float:
    size = game.joint_space_size()
    if size > ENUMERATION_GUARD:
        raise EnumerationTooLarge(
            f"joint space has {size} outcomes, guard is {ENUMERATION_GUARD}"
        )
    total = 0.0
    for y in itertools.product(*(range(m) for m in game.action_counts)):
        w = 1.0
        for j, a in enumerate(y):
            w *= vectors[j][a]
        if w != 0.0:
            total += w * float(potential_fn(y))
    return total


def _resolve_initial(initial_action, counts, rng) -> np.ndarray:
    n = counts.shape[0]
    if isinstance(initial_action, str):
        if initial_action == "first":
            return np.zeros(n, dtype=np.intp)
        if initial_action == "random":
            return rng.integers(0, counts, dtype=np.intp)
        raise ValueError(f"unknown initial_action {initial_action!r}")
    arr = np.asarray(initial_action, dtype=np.intp)
    if arr.shape != (n,):
        raise ValueError(f"initial_action must give one action per player ({n})")
    if np.any(arr < 0) or np.any(arr >= counts):
        raise ValueError("initial_action entries out of range")
    return arr


def run(
    game,
    algorithm,
    horizon,
    *,
    sample_schedule=None,
    step_schedule=None,
    tie_rule="lowest_index",
    initial_action="first",
    shared_samples=True,
    metric_times="geometric",
    compute_metrics="auto",
    potential=None,
    record_estimate_rows=False,
    random_state=None,
) -> RunRecord:
    """Execute one repeated-play run and record it round by round.

    Parameters
    ----------
    game : NormalFormGame
    algorithm : {"fp_exact", "sampled_fp", "cesfp"}
    horizon : int
        Number of iterate rounds t = 1..horizon; round t picks the joint
        action a(t+1) and updates the empirical distribution to q(t+1).
    sample_schedule : SampleCountSchedule, for sampled_fp
    step_schedule : StepSizeSchedule, for cesfp
    tie_rule : {"lowest_index", "seeded_uniform"}
        Argmax tie-breaking; seeded_uniform draws from the run's stream.
    initial_action : "first", "random", or one action per player
    shared_samples : bool
        Share each round's test action(s) across players (default), or
        let every player draw independently; either way the recorded
        per-round sample count follows the algorithm's schedule.
    metric_times : see `resolve_metric_times`
    compute_metrics : "auto" | bool
        Record metric snapshots; "auto" enables them exactly when an
        exact oracle is available.
    potential : callable (joint action) -> float, optional
        Potential function whose expected value is recorded; congestion
        games use their built-in potential automatically.
    record_estimate_rows : bool
        Keep the full (horizon, players, actions) array of per-round
        decision values; for diagnostics on small runs.
    random_state : None, int, or numpy Generator

    Returns a RunRecord; identical inputs give identical records except
    wall-clock fields.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if tie_rule not in ("lowest_index", "seeded_uniform"):
        raise ValueError(f"unknown tie rule {tie_rule!r}")

    rng = as_rng(random_state)
    seed = int(random_state) if isinstance(random_state, (int, np.integer)) else None
    n = game.num_players
    counts = np.asarray(game.action_counts, dtype=np.intp)
    m_max = int(counts.max())
    counts_minus1 = counts - 1
    homogeneous = bool((counts == m_max).all())
    mask = None
    if not homogeneous:
        mask = np.zeros((n, m_max), dtype=bool)
        for i in range(n):
            mask[i, : counts[i]] = True

    exact_available = game.has_exact_oracle
    if algorithm == "fp_exact" and not exact_available:
        raise OracleUnavailable(
            "fp_exact needs an exact expected-utility oracle; this game is too "
            "large to enumerate and has no structured oracle"
        )
    if compute_metrics == "auto":
        metrics_on = exact_available
    else:
        metrics_on = bool(compute_metrics)
        if metrics_on and not exact_available:
            raise OracleUnavailable("metric snapshots need an exact oracle")

    k_arr = None
    rho_arr = None
    params = {
        "tie_rule": tie_rule,
        "initial_action": initial_action if isinstance(initial_action, str) else list(map(int, initial_action)),
        "shared_samples": bool(shared_samples),
    }
    if algorithm == "sampled_fp":
        if sample_schedule is None:
            sample_schedule = SampleCountSchedule()
        k_arr = sample_schedule.counts(horizon)
        params["sample_schedule"] = sample_schedule.describe()
    elif algorithm == "cesfp":
        if step_schedule is None:
            step_schedule = StepSizeSchedule()
        rho_arr = step_schedule.values(horizon)
        if not np.all(np.isfinite(rho_arr)) or rho_arr.min() <= 0 or rho_arr.max() > 1:
            raise StepSizeOutOfRange(
                "cesfp needs 0 < rho(t) <= 1 over the whole horizon"
            )
        params["step_schedule"] = step_schedule.describe()

    metric_set = resolve_metric_times(horizon, metric_times) if metrics_on else frozenset()
    is_congestion = isinstance(game, CongestionGame)

    initial = _resolve_initial(initial_action, counts, rng)
    arange_n = np.arange(n)
    q = np.zeros((n, m_max))
    q[arange_n, initial] = 1.0

    table = np.zeros((n, m_max)) if algorithm == "cesfp" else None
    samples_arr = np.zeros(horizon, dtype=np.int64)
    wall_arr = np.zeros(horizon, dtype=np.int64)
    cpu_arr = np.zeros(horizon, dtype=np.int64)
    actions_arr = np.zeros((horizon, n), dtype=np.int32)
    est_store = np.zeros((horizon, n, m_max)) if record_estimate_rows else None
    snapshots = []
    perf = time.perf_counter_ns
    cpu = time.thread_time_ns

    for t in range(1, horizon + 1):
        c0 = cpu()
        t0 = perf()
        if algorithm == "fp_exact":
            rows = game._mixed_rows_matrix(q)
            k_t = 0
        elif algorithm == "sampled_fp":
            k_t = int(k_arr[t - 1])
            cum = np.cumsum(q, axis=1)
            if shared_samples:
                acc = np.zeros((n, m_max))
                for _ in range(k_t):
                    u = rng.random(n)
                    joint = np.minimum((cum < u[:, None]).sum(axis=1), counts_minus1)
                    acc += game._pure_rows_matrix(joint)
                rows = acc / k_t
            else:
                rows = np.empty((n, m_max))
                for i in range(n):
                    acc_i = np.zeros(m_max)
                    for _ in range(k_t):
                        u = rng.random(n)
                        joint = np.minimum((cum < u[:, None]).sum(axis=1), counts_minus1)
                        acc_i += game._pure_rows_matrix(joint)[i]
                    rows[i] = acc_i / k_t
        else:  # cesfp
            k_t = 1
            rho = rho_arr[t - 1]
            cum = np.cumsum(q, axis=1)
            if shared_samples:
                u = rng.random(n)
                joint = np.minimum((cum < u[:, None]).sum(axis=1), counts_minus1)
                table += rho * (game._pure_rows_matrix(joint) - table)
            else:
                for i in range(n):
                    u = rng.random(n)
                    joint = np.minimum((cum < u[:, None]).sum(axis=1), counts_minus1)
                    row = game._pure_rows_matrix(joint)[i]
                    table[i] += rho * (row - table[i])
            rows = table

        if tie_rule == "lowest_index":
            if homogeneous:
                a_next = np.argmax(rows, axis=1)
            else:
                a_next = np.argmax(np.where(mask, rows, -np.inf), axis=1)
        else:
            a_next = np.empty(n, dtype=np.intp)
            for i in range(n):
                row = rows[i, : counts[i]]
                ties = np.flatnonzero(row == row.max())
                a_next[i] = ties[rng.integers(ties.shape[0])]
        elapsed = perf() - t0
        elapsed_cpu = cpu() - c0

        actions_arr[t - 1] = a_next
        samples_arr[t - 1] = k_t
        if est_store is not None:
            est_store[t - 1] = rows
        if t in metric_set:
            snapshots.append(
                _snapshot(game, t, q, counts, a_next, rows, algorithm, is_congestion, potential)
            )

        c1 = cpu()
        t1 = perf()
        q *= t / (t + 1.0)
        q[arange_n, a_next] += 1.0 / (t + 1.0)
        wall_arr[t - 1] = elapsed + (perf() - t1)
        cpu_arr[t - 1] = elapsed_cpu + (cpu() - c1)

    final_empirical = EmpiricalDistribution(
        [q[i, : counts[i]].copy() for i in range(n)], horizon + 1
    )
    final_estimates = None
    if algorithm in ("sampled_fp", "cesfp"):
        final_estimates = UtilityEstimateTable(
            [rows[i, : counts[i]].copy() for i in range(n)]
        )

    return RunRecord(
        algorithm=algorithm,
        horizon=horizon,
        seed=seed,
        game_description=game.describe(),
        params=params,
        initial_actions=np.asarray(initial, dtype=np.int32),
        actions=actions_arr,
        samples_per_round=samples_arr,
        wall_ns=wall_arr,
        cpu_ns=cpu_arr,
        snapshots=snapshots,
        final_empirical=final_empirical,
        final_estimates=final_estimates,
        estimate_rows=est_store,
    )


def _snapshot(game, t, q, counts, a_next, rows, algorithm, is_congestion, potential):
    n = counts.shape[0]
    vectors = tuple(q[i, : counts[i]].copy() for i in range(n))
    exact = rows if algorithm == "fp_exact" else game._mixed_rows_matrix(q)
    gap = -math.inf
    eps = -math.inf
    est_err = 0.0
    for i in range(n):
        row = exact[i, : counts[i]]
        best = row.max()
        gap = max(gap, best - row @ vectors[i])
        eps = max(eps, best - row[a_next[i]])
        if algorithm != "fp_exact":
            est_err = max(est_err, np.abs(rows[i, : counts[i]] - row).max())
    travel = expected_total_travel_time(game, vectors) if is_congestion else None
    if is_congestion:
        potential_value = expected_rosenthal_potential(game, vectors)
    elif potential is not None:
        potential_value = _expected_potential_enumerated(game, vectors, potential)
    else:
        potential_value = None
    return MetricSnapshot(
        t=t,
        nash_gap=0.0 if gap < CLAMP else float(gap),
        gwfp_epsilon=0.0 if eps < CLAMP else float(eps),
        max_estimate_error=None if algorithm == "fp_exact" else float(est_err),
        expected_travel_time=travel,
        potential_value=potential_value,
        empirical=vectors,
    )


# -- sklearn-style estimator wrappers -------------------------------------


class _RepeatedPlayEstimator(BaseEstimator):
    """Common fit/inspection machinery for the three engines."""

    _algorithm = None

    def fit(self, game, y=None):
        """Run the engine on a game; y is ignored (sklearn signature)."""
        self.record_ = run(game, self._algorithm, self.horizon, **self._run_kwargs())
        self.empirical_ = self.record_.final_empirical
        self.estimates_ = self.record_.final_estimates
        self.n_rounds_ = self.record_.horizon
        return self

    def _run_kwargs(self) -> dict:
        return {
            "tie_rule": self.tie_rule,
            "initial_action": self.initial_action,
            "metric_times": self.metric_times,
            "compute_metrics": self.compute_metrics,
            "random_state": self.random_state,
        }

    def final_profile(self) -> MixedStrategyProfile:
        """Empirical mixed-strategy profile after the run."""
        if not hasattr(self, "record_"):
            raise NotFittedError(f"{type(self).__name__} has not been fitted yet")
        return self.empirical_.as_profile()


class FictitiousPlay(_RepeatedPlayEstimator):
    """Best-response play against exact expected utilities.

    Needs a game with an exact oracle. Draws no samples; the classic
    deterministic baseline the sampling variants are measured against.
    """

    _algorithm = "fp_exact"

    def __init__(
        self,
        horizon=1000,
        tie_rule="lowest_index",
        initial_action="first",
        metric_times="geometric",
        compute_metrics="auto",
        random_state=None,
    ):
        self.horizon = horizon
        self.tie_rule = tie_rule
        self.initial_action = initial_action
        self.metric_times = metric_times
        self.compute_metrics = compute_metrics
        self.random_state = random_state


class SampledFictitiousPlay(_RepeatedPlayEstimator):
    """Best-response play against fresh Monte-Carlo utility estimates.

    Round t draws k_t = rounding(C * t^gamma) joint test actions from the
    empirical distribution and best-responds to the per-action average
    utilities; previous rounds' samples are discarded.
    """

    _algorithm = "sampled_fp"

    def __init__(
        self,
        horizon=1000,
        sample_count=1.0,
        sample_exponent=0.6,
        rounding="ceil",
        shared_samples=True,
        tie_rule="lowest_index",
        initial_action="first",
        metric_times="geometric",
        compute_metrics="auto",
        random_state=None,
    ):
        self.horizon = horizon
        self.sample_count = sample_count
        self.sample_exponent = sample_exponent
        self.rounding = rounding
        self.shared_samples = shared_samples
        self.tie_rule = tie_rule
        self.initial_action = initial_action
        self.metric_times = metric_times
        self.compute_metrics = compute_metrics
        self.random_state = random_state

    def _run_kwargs(self):
        kwargs = super()._run_kwargs()
        kwargs["sample_schedule"] = SampleCountSchedule(
            c=self.sample_count, gamma=self.sample_exponent, rounding=self.rounding
        )
        kwargs["shared_samples"] = self.shared_samples
        return kwargs


class SingleSampleFictitiousPlay(_RepeatedPlayEstimator):
    """Best-response play against a recursively tracked estimate table.

    Draws one test action per round and updates every action's estimate
    with weight rho(t) = t^-beta (or a supplied sequence); the table
    carries over between rounds, so the per-round sampling cost stays
    constant. Registered under the algorithm id "cesfp".
    """

    _algorithm = "cesfp"

    def __init__(
        self,
        horizon=1000,
        step_exponent=0.6,
        step_sequence=None,
        shared_test_action=True,
        tie_rule="lowest_index",
        initial_action="first",
        metric_times="geometric",
        compute_metrics="auto",
        random_state=None,
    ):
        self.horizon = horizon
        self.step_exponent = step_exponent
        self.step_sequence = step_sequence
        self.shared_test_action = shared_test_action
        self.tie_rule = tie_rule
        self.initial_action = initial_action
        self.metric_times = metric_times
        self.compute_metrics = compute_metrics
        self.random_state = random_state

    def _run_kwargs(self):
        kwargs = super()._run_kwargs()
        if self.step_sequence is not None:
            kwargs["step_schedule"] = StepSizeSchedule(sequence=self.step_sequence)
        else:
            kwargs["step_schedule"] = StepSizeSchedule(beta=self.step_exponent)
        kwargs["shared_samples"] = self.shared_test_action
        return kwargs


ESTIMATORS = {
    "fp_exact": FictitiousPlay,
    "sampled_fp": SampledFictitiousPlay,
    "cesfp": SingleSampleFictitiousPlay,
}
