"""Finite normal-form games, mixed strategies, and exact expected utility.

Games are `NormalFormGame` objects: a player count, per-player action
counts, and a pure-strategy utility oracle ``u(player, joint_action)``.
Actions are plain integer indices. All game objects are immutable after
construction and safe to share across workers.

`mixed_utility_exact` evaluates the expected utility of one action against
independently mixing opponents by full enumeration of the opponents' joint
action space; it is the reference oracle that every faster evaluation path
in this package is tested against.
"""

import itertools
import math

import numpy as np

from .exceptions import EnumerationTooLarge
from .validation import (
    as_rng,
    check_action,
    check_finite_values,
    check_joint_action,
    check_player,
    check_simplex,
)

# Exact enumeration refuses joint spaces larger than this.
ENUMERATION_GUARD = 10_000_000

KNOWN_TAGS = frozenset({"identical_interest", "zero_sum", "potential"})


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


class MixedStrategyProfile:
    """One probability vector per player.

    Each vector is non-negative and sums to 1 within 1e-9. Vectors are
    stored read-only; build a new profile instead of mutating one.
    """

    __slots__ = ("vectors",)

    def __init__(self, vectors):
        checked = []
        for i, vec in enumerate(vectors):
            checked.append(_readonly(check_simplex(vec, name=f"strategy of player {i}")))
        if not checked:
            raise ValueError("profile must contain at least one strategy vector")
        object.__setattr__(self, "vectors", tuple(checked))

    def __setattr__(self, name, value):
        raise AttributeError("MixedStrategyProfile is immutable")

    def __reduce__(self):
        return (type(self), ([np.asarray(v) for v in self.vectors],))

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, player):
        return self.vectors[player]

    def __iter__(self):
        return iter(self.vectors)

    def __repr__(self):
        inner = ", ".join(np.array2string(v, precision=4) for v in self.vectors)
        return f"MixedStrategyProfile([{inner}])"

    @classmethod
    def uniform(cls, action_counts):
        return cls([np.full(m, 1.0 / m) for m in action_counts])

    @classmethod
    def point_mass(cls, action_counts, joint_action):
        vecs = []
        for m, a in zip(action_counts, joint_action, strict=True):
            v = np.zeros(m)
            v[int(a)] = 1.0
            vecs.append(v)
        return cls(vecs)


def profile_vectors(game, profile) -> tuple:
    """Normalize a profile argument to one vector per player of the game.

    Accepts a MixedStrategyProfile, an EmpiricalDistribution, or a plain
    sequence of vectors.
    """
    vecs = getattr(profile, "vectors", profile)
    vecs = tuple(np.asarray(v, dtype=float) for v in vecs)
    if len(vecs) != game.num_players:
        raise ValueError(
            f"profile has {len(vecs)} strategies, game has {game.num_players} players"
        )
    for i, v in enumerate(vecs):
        if v.shape != (game.action_counts[i],):
            raise ValueError(
                f"strategy of player {i} has shape {v.shape}, "
                f"expected ({game.action_counts[i]},)"
            )
    return vecs


class NormalFormGame:
    """A finite normal-form game with a pure-strategy utility oracle.

    Parameters
    ----------
    action_counts : sequence of int
        Number of actions per player; at least two players.
    utility_oracle : callable (player, joint_action) -> float
        Pure-strategy utility. Must be a pure function of its arguments.
    tags : iterable of str
        Optional structural flags: "identical_interest", "zero_sum",
        "potential". Tags are declarative; `has_identical_interests`
        verifies the first on enumerable games.
    """

    def __init__(self, action_counts, utility_oracle, tags=()):
        counts = tuple(int(m) for m in action_counts)
        if len(counts) < 2:
            raise ValueError("a game needs at least 2 players")
        if any(m < 1 for m in counts):
            raise ValueError("every player needs at least 1 action")
        tags = frozenset(tags)
        unknown = tags - KNOWN_TAGS
        if unknown:
            raise ValueError(f"unknown game tags: {sorted(unknown)}")
        self._counts = counts
        self._oracle = utility_oracle
        self._tags = tags

    @property
    def num_players(self) -> int:
        return len(self._counts)

    @property
    def action_counts(self) -> tuple:
        return self._counts

    @property
    def tags(self) -> frozenset:
        return self._tags

    @property
    def utility_oracle(self):
        return self._oracle

    def utility(self, player, joint_action) -> float:
        """Pure-strategy utility u_i(y)."""
        return float(self._oracle(player, tuple(joint_action)))

    def joint_space_size(self) -> int:
        return math.prod(self._counts)

    def opponent_space_size(self, player) -> int:
        return math.prod(m for j, m in enumerate(self._counts) if j != player)

    @property
    def has_exact_oracle(self) -> bool:
        """Whether exact expected utilities are computable for this game."""
        return all(
            self.opponent_space_size(i) <= ENUMERATION_GUARD
            for i in range(self.num_players)
        )

    # -- exact expected-utility machinery ------------------------------

    def exact_utility_row(self, player, profile) -> np.ndarray:
        """U_i(alpha, p_{-i}) for every own action alpha, as a vector.

        The base implementation enumerates the opponents' joint action
        space; subclasses override with equivalent closed forms.
        """
        vecs = profile_vectors(self, profile)
        return self._enumerated_row(player, vecs)

    def exact_utility_rows(self, profile) -> list:
        """One exact utility row per player."""
        vecs = profile_vectors(self, profile)
        return [self.exact_utility_row(i, vecs) for i in range(self.num_players)]

    def _enumerated_row(self, player, vecs) -> np.ndarray:
        player = check_player(self, player)
        others = [j for j in range(self.num_players) if j != player]
        size = self.opponent_space_size(player)
        if size > ENUMERATION_GUARD:
            raise EnumerationTooLarge(
                f"opponent joint space has {size} outcomes, guard is {ENUMERATION_GUARD}"
            )
        m_i = self._counts[player]
        row = np.zeros(m_i)
        joint = [0] * self.num_players
        for combo in itertools.product(*(range(self._counts[j]) for j in others)):
            w = 1.0
            for j, y in zip(others, combo):
                w *= vecs[j][y]
            if w == 0.0:
                continue
            for j, y in zip(others, combo):
                joint[j] = y
            for alpha in range(m_i):
                joint[player] = alpha
                row[alpha] += w * self.utility(player, joint)
        return row

    def pure_utility_row(self, player, joint_action) -> np.ndarray:
        """u_i(alpha, a_{-i}) over player i's actions; own entry of the
        joint action is ignored."""
        player = check_player(self, player)
        joint = check_joint_action(self, joint_action)
        work = list(joint)
        row = np.empty(self._counts[player])
        for alpha in range(self._counts[player]):
            work[player] = alpha
            row[alpha] = self.utility(player, work)
        return row

    def pure_utility_rows(self, joint_action) -> list:
        """For each player i: the vector of u_i(alpha, a_{-i}) over own actions.

        `joint_action` supplies the opponents' pure actions; each player's
        own entry is ignored in their row.
        """
        return [self.pure_utility_row(i, joint_action) for i in range(self.num_players)]

    # -- padded-matrix views used by the learning engines ---------------

    def _pad_rows(self, rows) -> np.ndarray:
        out = np.zeros((self.num_players, max(self._counts)))
        for i, row in enumerate(rows):
            out[i, : self._counts[i]] = row
        return out

    def _pure_rows_matrix(self, joint) -> np.ndarray:
        """pure_utility_rows stacked into an (n, max_m) zero-padded matrix."""
        return self._pad_rows(self.pure_utility_rows(joint))

    def _mixed_rows_matrix(self, q_matrix) -> np.ndarray:
        """exact_utility_rows of a zero-padded (n, max_m) profile matrix."""
        vecs = [q_matrix[i, : self._counts[i]] for i in range(self.num_players)]
        return self._pad_rows(
            [self.exact_utility_row(i, vecs) for i in range(self.num_players)]
        )

    def describe(self) -> dict:
        """A JSON-serializable structural description (for fingerprints)."""
        return {
            "kind": "normal_form",
            "action_counts": list(self._counts),
            "tags": sorted(self._tags),
        }


class MatrixGame(NormalFormGame):
    """Normal-form game backed by dense per-player payoff tensors.

    `payoff_tensors[i]` has shape `action_counts` and holds u_i over joint
    actions. Expected utilities are computed by tensor contraction, which
    matches enumeration up to floating-point summation order.
    """

    def __init__(self, payoff_tensors, tags=(), name=None):
        tensors = [np.asarray(t, dtype=float) for t in payoff_tensors]
        if not tensors:
            raise ValueError("need at least one payoff tensor")
        shape = tensors[0].shape
        if len(shape) != len(tensors):
            raise ValueError(
                f"{len(tensors)} tensors of rank {len(shape)}: player count mismatch"
            )
        for t in tensors:
            if t.shape != shape:
                raise ValueError("all payoff tensors must share one shape")
            if not np.all(np.isfinite(t)):
                raise ValueError("payoff tensors must be finite")
        self._tensors = tuple(_readonly(t) for t in tensors)
        self.name = name
        super().__init__(shape, self._tensor_utility, tags=tags)

    def _tensor_utility(self, player, joint_action):
        return self._tensors[player][tuple(joint_action)]

    @property
    def payoff_tensors(self) -> tuple:
        return self._tensors

    def exact_utility_row(self, player, profile) -> np.ndarray:
        vecs = profile_vectors(self, profile)
        player = check_player(self, player)
        res = self._tensors[player]
        # Contract opponents' axes from the highest index down so the
        # remaining axis numbering stays stable.
        for j in range(self.num_players - 1, -1, -1):
            if j == player:
                continue
            res = np.tensordot(res, vecs[j], axes=(j, 0))
        return np.asarray(res, dtype=float)

    def pure_utility_row(self, player, joint_action) -> np.ndarray:
        player = check_player(self, player)
        joint = check_joint_action(self, joint_action)
        idx = tuple(
            slice(None) if j == player else joint[j] for j in range(self.num_players)
        )
        return np.array(self._tensors[player][idx], dtype=float)

    def pure_utility_rows(self, joint_action) -> list:
        joint = check_joint_action(self, joint_action)
        rows = []
        for i in range(self.num_players):
            idx = tuple(slice(None) if j == i else joint[j] for j in range(self.num_players))
            rows.append(np.array(self._tensors[i][idx], dtype=float))
        return rows

    def _pure_rows_matrix(self, joint) -> np.ndarray:
        # Engine fast path: trusts the joint action, skips re-validation.
        out = np.zeros((self.num_players, max(self.action_counts)))
        for i in range(self.num_players):
            idx = tuple(
                slice(None) if j == i else joint[j] for j in range(self.num_players)
            )
            out[i, : self.action_counts[i]] = self._tensors[i][idx]
        return out

    def describe(self) -> dict:
        return {
            "kind": "matrix",
            "action_counts": list(self.action_counts),
            "tags": sorted(self.tags),
            "payoffs": [t.ravel().tolist() for t in self._tensors],
        }


# -- core operations ----------------------------------------------------


def mixed_utility_exact(game, player, action, opponents) -> float:
    """Expected utility of one pure action against mixing opponents.

    Enumerates the opponents' joint action space and returns
    sum_y u_i(action, y) * prod_j p_j(y_j). The `opponents` profile covers
    all players; the entry of `player` is ignored. Raises
    EnumerationTooLarge when the opponent space exceeds the guard.
    """
    player = check_player(game, player)
    action = check_action(game, player, action)
    vecs = profile_vectors(game, opponents)
    size = game.opponent_space_size(player)
    if size > ENUMERATION_GUARD:
        raise EnumerationTooLarge(
            f"opponent joint space has {size} outcomes, guard is {ENUMERATION_GUARD}"
        )
    others = [j for j in range(game.num_players) if j != player]
    total = 0.0
    joint = [0] * game.num_players
    joint[player] = action
    for combo in itertools.product(*(range(game.action_counts[j]) for j in others)):
        w = 1.0
        for j, y in zip(others, combo):
            w *= vecs[j][y]
        if w == 0.0:
            continue
        for j, y in zip(others, combo):
            joint[j] = y
        total += w * game.utility(player, joint)
    return total


def best_response(values, tie_rule="lowest_index", rng=None) -> int:
    """Index of a maximal entry of `values` under the given tie rule.

    lowest_index returns the smallest argmax index; seeded_uniform draws
    uniformly among all exact argmax indices from the supplied random
    stream. Raises NonFiniteValue on NaN or infinite entries.
    """
    arr = check_finite_values(values)
    if tie_rule == "lowest_index":
        return int(np.argmax(arr))
    if tie_rule == "seeded_uniform":
        if rng is None:
            raise ValueError("seeded_uniform tie rule needs an rng")
        rng = as_rng(rng)
        ties = np.flatnonzero(arr == arr.max())
        return int(ties[rng.integers(len(ties))])
    raise ValueError(f"unknown tie rule {tie_rule!r}")


def check_potential_property(game, candidate_potential, tol=1e-9) -> bool:
    """Whether a candidate function is an exact potential for the game.

    True iff for every player, every joint action, and every unilateral
    deviation, the utility difference equals the potential difference
    within `tol`. Enumerates the full joint action space (guarded).
    """
    size = game.joint_space_size()
    if size > ENUMERATION_GUARD:
        raise EnumerationTooLarge(
            f"joint space has {size} outcomes, guard is {ENUMERATION_GUARD}"
        )
    counts = game.action_counts
    for y in itertools.product(*(range(m) for m in counts)):
        phi_y = float(candidate_potential(y))
        for i in range(game.num_players):
            u_y = game.utility(i, y)
            deviated = list(y)
            for x in range(counts[i]):
                if x == y[i]:
                    continue
                deviated[i] = x
                du = u_y - game.utility(i, deviated)
                dphi = phi_y - float(candidate_potential(tuple(deviated)))
                if abs(du - dphi) > tol:
                    return False
            deviated[i] = y[i]
    return True


def has_identical_interests(game, tol=1e-9) -> bool:
    """Verify by enumeration that all players share one utility function."""
    size = game.joint_space_size()
    if size > ENUMERATION_GUARD:
        raise EnumerationTooLarge(
            f"joint space has {size} outcomes, guard is {ENUMERATION_GUARD}"
        )
    for y in itertools.product(*(range(m) for m in game.action_counts)):
        u0 = game.utility(0, y)
        for i in range(1, game.num_players):
            if abs(game.utility(i, y) - u0) > tol:
                return False
    return True


# -- builtin test games --------------------------------------------------


def matching_pennies() -> MatrixGame:
    """2x2 zero-sum game: +1 to player 0 on a match, -1 otherwise."""
    a = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return MatrixGame([a, -a], tags={"zero_sum"}, name="matching_pennies")


def coordination_2x2() -> MatrixGame:
    """2x2 identical-interest game: payoff 1 on the diagonal, 0 off it."""
    a = np.eye(2)
    return MatrixGame(
        [a, a], tags={"identical_interest", "potential"}, name="coordination_2x2"
    )
