"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

The desk-scale routing benchmark (50 drivers, 10 heterogeneous affine
routes, fixed seed) stands in for the full-size instance; full-size runs
are exercised at a short horizon in the CLI tests.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from fplearn import (
    AffineCost,
    CongestionGame,
    EmpiricalDistribution,
    MixedStrategyProfile,
    SampleCountSchedule,
    StepSizeSchedule,
    TabularCost,
    TrackingEstimator,
    benchmark_instance,
    congestion_mixed_utility,
    coordination_2x2,
    empirical_update,
    gwfp_epsilon,
    matching_pennies,
    mixed_utility_exact,
    poisson_binomial_pmf,
    run,
    toeplitz_average_step,
    validate_step_schedule,
)
from fplearn.cli import main as cli_main
from fplearn.records import CSV_COLUMNS
from conftest import enumeration_row, three_player_match


def report(number, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {number:02d} {status}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def desk_runs():
    """Shared desk-scale runs at T = 1e4 (used by criteria 5 and 6).

    The short unmeasured runs first are benchmark warm-up: the first run
    in a process pays one-off interpreter and allocator costs that would
    otherwise inflate its early rounds and skew per-iteration timing.
    """
    game = benchmark_instance()
    run(game, "sampled_fp", 2000, random_state=1)
    run(game, "cesfp", 1000, random_state=1)
    sampled = run(game, "sampled_fp", 10_000, random_state=0)
    cesfp = run(game, "cesfp", 10_000, random_state=0)
    return {"game": game, "sampled_fp": sampled, "cesfp": cesfp}


def test_criterion_01_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(42)
    worst_utility = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(2, 5))
        routes = []
        for _ in range(m):
            if rng.random() < 0.5:
                routes.append(TabularCost(tuple(np.sort(rng.uniform(0.0, 10.0, n)))))
            else:
                routes.append(AffineCost(float(rng.uniform(0.2, 3.0)), float(rng.uniform(0.0, 5.0))))
        game = CongestionGame(n, routes)
        prof = MixedStrategyProfile([rng.dirichlet(np.ones(m)) for _ in range(n)])
        player = int(rng.integers(n))
        route = int(rng.integers(m))
        dp = congestion_mixed_utility(game, player, route, prof)
        brute = mixed_utility_exact(game, player, route, prof)
        worst_utility = max(worst_utility, abs(dp - brute))

    worst_pmf = 0.0
    for trial in range(20):
        n = int(rng.integers(1, 11))
        probs = rng.uniform(0.0, 1.0, size=n)
        pmf = poisson_binomial_pmf(probs)
        brute = np.zeros(n + 1)
        for outcome in itertools.product((0, 1), repeat=n):
            w = 1.0
            for p, o in zip(probs, outcome):
                w *= p if o else 1.0 - p
            brute[sum(outcome)] += w
        worst_pmf = max(worst_pmf, float(np.abs(pmf - brute).max()))
    elapsed = time.perf_counter() - start
    ok = worst_utility <= 1e-9 and worst_pmf <= 1e-12 and elapsed < 30.0
    report(
        1,
        ok,
        f"oracle equivalence: worst utility dev {worst_utility:.2e} (<=1e-9), "
        f"worst pmf dev {worst_pmf:.2e} (<=1e-12), {elapsed:.1f}s (<30s)",
    )


def test_criterion_02_potential_game_convergence():
    start = time.perf_counter()
    coord = run(
        coordination_2x2(), "fp_exact", 10_000, initial_action=[0, 1], metric_times=[10_000]
    )
    gap_coord = coord.snapshots[-1].nash_gap
    linear = CongestionGame(
        10, [AffineCost(1.0, 0.0), AffineCost(1.5, 0.0), AffineCost(2.0, 0.0)]
    )
    traffic = run(linear, "fp_exact", 10_000, metric_times=[10_000])
    gap_traffic = traffic.snapshots[-1].nash_gap
    elapsed = time.perf_counter() - start
    ok = gap_coord <= 0.05 and gap_traffic <= 0.05 and elapsed < 10.0
    report(
        2,
        ok,
        f"exact-play convergence: coordination gap {gap_coord:.2e}, "
        f"10-driver routing gap {gap_traffic:.2e} (both <=0.05), {elapsed:.1f}s (<10s)",
    )


def test_criterion_03_zero_sum_convergence():
    game = matching_pennies()
    fp_rec = run(game, "fp_exact", 100_000, metric_times=[100_000])
    fp_err = max(float(np.abs(v - 0.5).max()) for v in fp_rec.snapshots[-1].empirical)

    hits = 0
    worst = 0.0
    for seed in range(10):
        rec = run(game, "cesfp", 100_000, metric_times=[100_000], random_state=seed)
        err = max(float(np.abs(v - 0.5).max()) for v in rec.snapshots[-1].empirical)
        worst = max(worst, err)
        hits += err <= 0.1
    ok = fp_err <= 0.1 and hits >= 9
    report(
        3,
        ok,
        f"zero-sum: exact-play L-inf {fp_err:.4f} (<=0.1); single-sample play "
        f"{hits}/10 seeds within 0.1 (worst {worst:.4f}, need >=9)",
    )


def test_criterion_04_estimate_tracking():
    start = time.perf_counter()
    rng = np.random.default_rng(17)
    routes = [
        TabularCost(tuple(np.cumsum(rng.uniform(0.2, 1.5, 20)))) for _ in range(5)
    ]
    game = CongestionGame(20, routes)  # tabular costs force the convolution oracle
    early, late = [], []
    for seed in range(10):
        rec = run(game, "cesfp", 10_000, metric_times=[100, 10_000], random_state=seed)
        early.append(rec.snapshot_at(100).max_estimate_error)
        late.append(rec.snapshot_at(10_000).max_estimate_error)
    med_early = float(np.median(early))
    med_late = float(np.median(late))
    elapsed = time.perf_counter() - start
    ok = med_late < 0.5 * med_early and elapsed < 60.0
    report(
        4,
        ok,
        f"estimate tracking: median error {med_early:.4f} at t=1e2 -> {med_late:.4f} "
        f"at t=1e4 (need < half), {elapsed:.1f}s (<60s)",
    )


def test_criterion_05_sample_cost_contrast(desk_runs):
    cesfp_total = desk_runs["cesfp"].total_samples
    sampled_total = desk_runs["sampled_fp"].total_samples
    expected = sum(math.ceil(t**0.6) for t in range(1, 10_001))
    ok = (
        cesfp_total == 10_000
        and abs(sampled_total - expected) <= 0.01 * expected
        and sampled_total >= 100 * cesfp_total
    )
    report(
        5,
        ok,
        f"sample cost: single-sample total {cesfp_total} (=1e4), fresh-sampling total "
        f"{sampled_total} vs sum of ceil(t^0.6) = {expected}, ratio {sampled_total / cesfp_total:.0f}x (>=100x)",
    )


def test_criterion_06_per_iteration_time_shape(desk_runs):
    # Judged on the thread-CPU clock: shared CI machines show multi-second
    # contention bursts that corrupt wall-clock medians, while CPU time
    # measures the same per-iteration cost contention-free. The wall-clock
    # ratio is reported alongside.
    def ratio(values):
        return float(np.median(values[8999:10_000]) / np.median(values[0:1000]))

    sampled_ratio = ratio(desk_runs["sampled_fp"].cpu_ns)
    cesfp_ratio = ratio(desk_runs["cesfp"].cpu_ns)
    wall_sampled = ratio(desk_runs["sampled_fp"].wall_ns)
    wall_cesfp = ratio(desk_runs["cesfp"].wall_ns)
    ok = sampled_ratio >= 5.0 and cesfp_ratio <= 2.0
    report(
        6,
        ok,
        f"per-iteration cpu time late/early: fresh-sampling {sampled_ratio:.2f} (>=5), "
        f"single-sample {cesfp_ratio:.2f} (<=2); wall-clock ratios "
        f"{wall_sampled:.2f} / {wall_cesfp:.2f}",
    )


def test_criterion_07_travel_time_trend():
    game = benchmark_instance()
    medians = {}
    for algorithm in ("sampled_fp", "cesfp"):
        early, final = [], []
        for seed in range(10):
            rec = run(game, algorithm, 5000, metric_times=[50, 5000], random_state=seed)
            early.append(rec.snapshot_at(50).expected_travel_time)
            final.append(rec.snapshot_at(5000).expected_travel_time)
        medians[algorithm] = (float(np.median(early)), float(np.median(final)))
    declines = all(final < early for early, final in medians.values())
    f_sampled = medians["sampled_fp"][1]
    f_cesfp = medians["cesfp"][1]
    rel = abs(f_sampled - f_cesfp) / min(f_sampled, f_cesfp)
    ok = declines and rel <= 0.05
    report(
        7,
        ok,
        "travel-time trend: medians t=50 -> t=5000 "
        + ", ".join(f"{k}: {e:.1f}->{f:.1f}" for k, (e, f) in medians.items())
        + f"; final values differ by {rel * 100:.2f}% (<=5%)",
    )


def test_criterion_08_tracking_lemma_suites():
    start = time.perf_counter()
    # recursive averaging follows a convergent input sequence
    y = 0.0
    for t in range(1, 100_001):
        y = toeplitz_average_step(y, 1.0 + 1.0 / t, t**-0.6)
    toeplitz_ok = abs(y - 1.0) <= 0.02

    # drifting-mean tracking
    est = TrackingEstimator(schedule=StepSizeSchedule(beta=0.6))
    mu = 0.0
    for t in range(1, 100_001):
        mu = 1.0 - 1.0 / t
        est.update(mu)
    drift_ok = abs(est.estimate - mu) <= 0.02

    # zero-mean noise averaging, statistical clause at >= 19/20 seeds
    hits = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        tracker = TrackingEstimator(schedule=StepSizeSchedule(beta=0.6))
        for x in rng.uniform(-1.0, 1.0, size=100_000):
            tracker.update(x)
        hits += abs(tracker.estimate) <= 0.05

    # schedule validation examples
    good = validate_step_schedule(0.6)
    inv_t = validate_step_schedule(1.0)
    low = validate_step_schedule(0.4)
    schedule_ok = (
        good.passed
        and good.inv_t_rho_final == pytest.approx(10**-2.4, rel=1e-9)
        and (not inv_t.limit_vanishes)
        and (not low.sq_summable)
    )
    elapsed = time.perf_counter() - start
    ok = toeplitz_ok and drift_ok and hits >= 19 and schedule_ok and elapsed < 60.0
    report(
        8,
        ok,
        f"averaging/tracking suites: toeplitz dev {abs(y - 1.0):.4f}, drift dev "
        f"{abs(est.estimate - mu):.4f} (<=0.02), noise {hits}/20 seeds (>=19), "
        f"schedule checks {'ok' if schedule_ok else 'bad'}, {elapsed:.1f}s (<60s)",
    )


def test_criterion_09_determinism(tmp_path):
    config = {
        "schema_version": 1,
        "game": {"kind": "congestion_random", "num_drivers": 12, "num_routes": 4, "seed": 5},
        "horizon": 400,
        "seeds": [3, 4],
        "arms": [
            {"name": "cesfp", "algorithm": "cesfp", "beta": 0.6},
            {"name": "sampled", "algorithm": "sampled_fp", "gamma": 0.6},
        ],
        "metric_times": [1, 100, 400],
    }
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(config))
    outs = []
    for sub in ("one", "two"):
        out = tmp_path / sub
        assert cli_main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        outs.append(out)

    wall_col = CSV_COLUMNS.index("wall_ns")
    identical = True
    for name in ("cesfp__seed3.csv", "cesfp__seed4.csv", "sampled__seed3.csv", "sampled__seed4.csv"):
        lines = []
        for out in outs:
            with open(out / name) as fh:
                rows = [line.rstrip("\r\n").split(",") for line in fh]
            lines.append([",".join(c for i, c in enumerate(r) if i != wall_col) for r in rows])
        identical = identical and lines[0] == lines[1]

    def strip_wall(obj):
        if isinstance(obj, dict):
            return {k: strip_wall(v) for k, v in obj.items() if "wall" not in k}
        if isinstance(obj, list):
            return [strip_wall(v) for v in obj]
        return obj

    summaries = []
    for out in outs:
        with open(out / "summary.json") as fh:
            summaries.append(strip_wall(json.load(fh)))
    identical = identical and summaries[0] == summaries[1]
    report(9, identical, "repeated cmd_run gives identical non-timing output bytes")


def test_criterion_10_exact_play_has_zero_epsilon():
    cases = [
        (matching_pennies(), 2000, "first"),
        (coordination_2x2(), 2000, [0, 1]),
        (three_player_match(), 500, [0, 1, 0]),
        (CongestionGame(4, [AffineCost(1.0, 0.0), AffineCost(1.3, 0.5), AffineCost(0.8, 1.0)]), 300, "first"),
    ]
    worst = 0.0
    rounds_checked = 0
    for game, horizon, init in cases:
        record = run(game, "fp_exact", horizon, initial_action=init)
        hist = record.action_history()
        q = EmpiricalDistribution.from_actions(game.action_counts, hist[:1])
        for t in range(1, horizon + 1):
            eps = gwfp_epsilon(game, q, hist[t], oracle=enumeration_row)
            worst = max(worst, eps)
            rounds_checked += 1
            q = empirical_update(q, hist[t])
    ok = worst == 0.0
    report(
        10,
        ok,
        f"exact play epsilon: {rounds_checked} rounds across 4 games, worst {worst:.2e} (=0)",
    )
