"""Fictitious-play learning for finite normal-form games.

Exact best-response dynamics plus two sampling variants (fresh Monte-Carlo
estimates with a growing per-round budget, and single-sample recursive
tracking), a parallel-route congestion benchmark with a polynomial exact
oracle, equilibrium-quality metrics, and a reproducible experiment
harness with a CLI.
"""

from .congestion import (
    AffineCost,
    CongestionGame,
    TabularCost,
    benchmark_instance,
    congestion_mixed_utility,
    expected_rosenthal_potential,
    expected_total_travel_time,
    poisson_binomial_pmf,
    random_affine_instance,
    rosenthal_potential,
    route_loads,
)
from .engines import (
    EmpiricalDistribution,
    FictitiousPlay,
    SampledFictitiousPlay,
    SingleSampleFictitiousPlay,
    UtilityEstimateTable,
    cesfp_estimate_update,
    draw_test_action,
    empirical_update,
    resolve_metric_times,
    run,
    sampled_fp_estimate,
)
from .estimation import (
    StepScheduleReport,
    TrackingEstimator,
    toeplitz_average_step,
    validate_step_schedule,
)
from .exceptions import (
    ConfigError,
    EnumerationTooLarge,
    MismatchedExperiments,
    NonFiniteValue,
    OracleUnavailable,
    ProbabilityOutOfRange,
    StepSizeOutOfRange,
)
from .experiments import ArmSpec, ExperimentConfig, compare_summaries, run_experiment
from .gamefiles import (
    builtin_game,
    game_fingerprint,
    game_from_spec,
    list_builtin_games,
    load_game,
    save_game,
)
from .games import (
    MatrixGame,
    MixedStrategyProfile,
    NormalFormGame,
    best_response,
    check_potential_property,
    coordination_2x2,
    has_identical_interests,
    matching_pennies,
    mixed_utility_exact,
)
from .metrics import (
    MetricSnapshot,
    estimate_error,
    gwfp_epsilon,
    nash_gap,
    profile_distance,
)
from .records import RunRecord
from .schedules import SampleCountSchedule, SampleScheduleReport, StepSizeSchedule

__version__ = "0.1.0"

__all__ = [
    "AffineCost",
    "ArmSpec",
    "CongestionGame",
    "ConfigError",
    "EmpiricalDistribution",
    "EnumerationTooLarge",
    "ExperimentConfig",
    "FictitiousPlay",
    "MatrixGame",
    "MetricSnapshot",
    "MismatchedExperiments",
    "MixedStrategyProfile",
    "NonFiniteValue",
    "NormalFormGame",
    "OracleUnavailable",
    "ProbabilityOutOfRange",
    "RunRecord",
    "SampleCountSchedule",
    "SampleScheduleReport",
    "SampledFictitiousPlay",
    "SingleSampleFictitiousPlay",
    "StepScheduleReport",
    "StepSizeOutOfRange",
    "StepSizeSchedule",
    "TabularCost",
    "TrackingEstimator",
    "UtilityEstimateTable",
    "benchmark_instance",
    "best_response",
    "builtin_game",
    "cesfp_estimate_update",
    "check_potential_property",
    "compare_summaries",
    "congestion_mixed_utility",
    "coordination_2x2",
    "draw_test_action",
    "empirical_update",
    "estimate_error",
    "expected_rosenthal_potential",
    "expected_total_travel_time",
    "game_fingerprint",
    "game_from_spec",
    "gwfp_epsilon",
    "has_identical_interests",
    "list_builtin_games",
    "load_game",
    "matching_pennies",
    "mixed_utility_exact",
    "nash_gap",
    "poisson_binomial_pmf",
    "profile_distance",
    "random_affine_instance",
    "resolve_metric_times",
    "rosenthal_potential",
    "route_loads",
    "run",
    "run_experiment",
    "sampled_fp_estimate",
    "save_game",
    "toeplitz_average_step",
    "validate_step_schedule",
]
