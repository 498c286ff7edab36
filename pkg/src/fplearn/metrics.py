"""Equilibrium-quality and learning-progress measurements.

`nash_gap` is the primary convergence measure: the largest expected-utility
gain any single player can get by deviating from their own mixed strategy,
which is zero exactly at Nash equilibria and computable whenever an exact
expected-utility oracle applies. `gwfp_epsilon` measures how far the
actions actually chosen in a round fall short of exact best responses to
the current empirical play, and `estimate_error` compares maintained
utility estimates against their exact targets. Negative floating-point
residue below 1e-12 is clamped to zero.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import OracleUnavailable
from .games import profile_vectors
from .validation import check_joint_action

CLAMP = 1e-12


def _clamp(value: float) -> float:
    return 0.0 if value < CLAMP else float(value)


def _exact_rows(game, vecs, oracle):
    """Exact utility rows U_i(alpha, p_{-i}) for every player."""
    if oracle is None:
        if not game.has_exact_oracle:
            raise OracleUnavailable(
                "game is too large to enumerate and has no structured exact oracle"
            )
        return [game.exact_utility_row(i, vecs) for i in range(game.num_players)]
    return [
        np.asarray(oracle(game, i, vecs), dtype=float) for i in range(game.num_players)
    ]


def nash_gap(game, profile, oracle=None) -> float:
    """Largest unilateral expected-utility improvement available at `profile`.

    Returns max_i [ max_alpha U_i(alpha, p_{-i}) - U_i(p_i, p_{-i}) ],
    clamped to be non-negative. Zero iff the profile is a Nash
    equilibrium. `oracle(game, player, vectors) -> row` overrides the
    game's exact expected-utility path when given.
    """
    vecs = profile_vectors(game, profile)
    rows = _exact_rows(game, vecs, oracle)
    gap = max(
        float(row.max() - row @ vecs[i]) for i, row in enumerate(rows)
    )
    return _clamp(gap)


def gwfp_epsilon(game, q_prev, joint_action_next, oracle=None) -> float:
    """Best-response deficiency of the chosen actions against prior play.

    Given the empirical distribution q(t) and the joint action a(t+1)
    chosen for the next round, returns
    max_i [ max_alpha U_i(alpha, q_{-i}(t)) - U_i(a_i(t+1), q_{-i}(t)) ],
    clamped at zero. Vanishing values along a run certify that play
    remains an (eps_t -> 0)-best-response process.
    """
    vecs = profile_vectors(game, q_prev)
    joint = check_joint_action(game, joint_action_next)
    rows = _exact_rows(game, vecs, oracle)
    eps = max(float(row.max() - row[joint[i]]) for i, row in enumerate(rows))
    return _clamp(eps)


def estimate_error(game, table, q, oracle=None) -> float:
    """Worst-case deviation of utility estimates from their exact targets.

    Returns max over (player, action) of |table[i][alpha] -
    U_i(alpha, q_{-i})|, with exact values from the oracle.
    """
    vecs = profile_vectors(game, q)
    rows = _exact_rows(game, vecs, oracle)
    table_rows = getattr(table, "rows", table)
    err = 0.0
    for i, row in enumerate(rows):
        est = np.asarray(table_rows[i], dtype=float)
        if est.shape != row.shape:
            raise ValueError(
                f"estimate row of player {i} has shape {est.shape}, expected {row.shape}"
            )
        err = max(err, float(np.abs(est - row).max()))
    return err


def profile_distance(profile_a, profile_b) -> float:
    """Euclidean distance between two profiles (concatenated vectors).

    Used to report distance to an analytically known equilibrium on the
    small test games where one is available.
    """
    vecs_a = getattr(profile_a, "vectors", profile_a)
    vecs_b = getattr(profile_b, "vectors", profile_b)
    total = 0.0
    for a, b in zip(vecs_a, vecs_b, strict=True):
        diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        total += float(diff @ diff)
    return float(np.sqrt(total))


@dataclass
class MetricSnapshot:
    """Metrics recorded at one round of a run.

    Fields are None when not applicable: exact-oracle metrics need an
    exact oracle, travel time needs a congestion game, potential needs a
    potential function. `empirical` carries the per-player empirical
    vectors at the snapshot round.
    """

    t: int
    nash_gap: float | None = None
    gwfp_epsilon: float | None = None
    max_estimate_error: float | None = None
    expected_travel_time: float | None = None
    potential_value: float | None = None
    empirical: tuple | None = None

    METRIC_FIELDS = (
        "nash_gap",
        "gwfp_epsilon",
        "max_estimate_error",
        "expected_travel_time",
        "potential_value",
    )

    def as_dict(self) -> dict:
        out = {"t": self.t}
        for name in self.METRIC_FIELDS:
            out[name] = getattr(self, name)
        return out
