import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fplearn import (
    EnumerationTooLarge,
    MatrixGame,
    MixedStrategyProfile,
    NonFiniteValue,
    NormalFormGame,
    best_response,
    check_potential_property,
    coordination_2x2,
    has_identical_interests,
    matching_pennies,
    mixed_utility_exact,
)
from conftest import random_matrix_game, three_player_match


def test_profile_validation():
    MixedStrategyProfile([[0.5, 0.5], [1.0, 0.0]])
    with pytest.raises(ValueError):
        MixedStrategyProfile([[0.6, 0.6]])
    with pytest.raises(ValueError):
        MixedStrategyProfile([[-0.1, 1.1]])
    uni = MixedStrategyProfile.uniform([2, 3])
    assert np.allclose(uni[1], [1 / 3] * 3)
    point = MixedStrategyProfile.point_mass([2, 3], (1, 2))
    assert point[0].tolist() == [0.0, 1.0]
    assert point[1].tolist() == [0.0, 0.0, 1.0]


def test_profile_immutable():
    prof = MixedStrategyProfile.uniform([2, 2])
    with pytest.raises(AttributeError):
        prof.vectors = ()
    with pytest.raises(ValueError):
        prof[0][0] = 0.9  # read-only array


def test_game_construction_guards():
    with pytest.raises(ValueError):
        NormalFormGame([3], lambda i, y: 0.0)
    with pytest.raises(ValueError):
        NormalFormGame([2, 0], lambda i, y: 0.0)
    with pytest.raises(ValueError):
        NormalFormGame([2, 2], lambda i, y: 0.0, tags={"mystery"})
    with pytest.raises(ValueError):
        MatrixGame([np.eye(2)])  # one tensor for a rank-2 game


def test_matching_pennies_uniform_value_is_zero():
    game = matching_pennies()
    uniform = MixedStrategyProfile.uniform([2, 2])
    for action in (0, 1):
        assert mixed_utility_exact(game, 0, action, uniform) == pytest.approx(0.0)


def test_point_mass_opponents_reduce_to_pure_utility():
    games = [matching_pennies(), coordination_2x2(), three_player_match()]
    for game in games:
        for joint in itertools.product(*(range(m) for m in game.action_counts)):
            prof = MixedStrategyProfile.point_mass(game.action_counts, joint)
            for i in range(game.num_players):
                for action in range(game.action_counts[i]):
                    expected = game.utility(i, tuple(joint[:i]) + (action,) + tuple(joint[i + 1 :]))
                    assert mixed_utility_exact(game, i, action, prof) == pytest.approx(
                        expected, abs=1e-12
                    )


def test_three_player_match_uniform_opponents():
    # Brute force: both opponents uniform over 2 actions gives 4 equally
    # likely outcomes; exactly one of them matches either own action.
    game = three_player_match()
    expected = 0.0
    for y1 in range(2):
        for y2 in range(2):
            expected += 0.25 * game.utility(0, (0, y1, y2))
    assert expected == pytest.approx(0.25)
    uniform = MixedStrategyProfile.uniform([2, 2, 2])
    for action in (0, 1):
        assert mixed_utility_exact(game, 0, action, uniform) == pytest.approx(0.25)


def test_mixed_utility_is_multilinear(rng):
    game = random_matrix_game(rng, (2, 3, 2))
    for _ in range(25):
        vecs_p = [rng.dirichlet(np.ones(m)) for m in game.action_counts]
        vecs_q = [v.copy() for v in vecs_p]
        j = int(rng.integers(1, 3))  # blend one opponent of player 0
        vecs_q[j] = rng.dirichlet(np.ones(game.action_counts[j]))
        lam = float(rng.random())
        blended = [v.copy() for v in vecs_p]
        blended[j] = (1 - lam) * vecs_p[j] + lam * vecs_q[j]
        u_p = mixed_utility_exact(game, 0, 1, MixedStrategyProfile(vecs_p))
        u_q = mixed_utility_exact(game, 0, 1, MixedStrategyProfile(vecs_q))
        u_b = mixed_utility_exact(game, 0, 1, MixedStrategyProfile(blended))
        assert u_b == pytest.approx((1 - lam) * u_p + lam * u_q, abs=1e-9)


def test_matrix_fast_row_matches_enumeration(rng):
    game = random_matrix_game(rng, (3, 2, 4))
    vecs = [rng.dirichlet(np.ones(m)) for m in game.action_counts]
    prof = MixedStrategyProfile(vecs)
    for i in range(3):
        fast = game.exact_utility_row(i, prof)
        slow = [
            mixed_utility_exact(game, i, a, prof) for a in range(game.action_counts[i])
        ]
        assert np.allclose(fast, slow, atol=1e-9)


def test_enumeration_guard():
    big = NormalFormGame([8] * 12, lambda i, y: 0.0)
    assert not big.has_exact_oracle
    prof = MixedStrategyProfile.uniform([8] * 12)
    with pytest.raises(EnumerationTooLarge):
        mixed_utility_exact(big, 0, 0, prof)
    with pytest.raises(EnumerationTooLarge):
        check_potential_property(big, lambda y: 0.0)


def test_best_response_tie_rules():
    assert best_response([1.0, 2.0, 2.0]) == 1
    assert best_response([5.0]) == 0
    assert best_response([5.0], tie_rule="seeded_uniform", rng=0) == 0
    with pytest.raises(NonFiniteValue):
        best_response([1.0, float("nan")])
    with pytest.raises(NonFiniteValue):
        best_response([np.inf, 0.0])
    with pytest.raises(ValueError):
        best_response([])
    with pytest.raises(ValueError):
        best_response([1.0, 2.0], tie_rule="seeded_uniform")  # rng required


def test_seeded_uniform_tie_frequencies():
    rng = np.random.default_rng(7)
    draws = np.array(
        [best_response([0.0, 0.0], tie_rule="seeded_uniform", rng=rng) for _ in range(10_000)]
    )
    zeros = int((draws == 0).sum())
    # three-sigma band around Binomial(10^4, 1/2)
    assert abs(zeros - 5000) <= 3 * np.sqrt(10_000 * 0.25)
    # reproducible under a fixed seed
    r1 = np.random.default_rng(3)
    r2 = np.random.default_rng(3)
    seq1 = [best_response([0.0, 0.0], "seeded_uniform", r1) for _ in range(50)]
    seq2 = [best_response([0.0, 0.0], "seeded_uniform", r2) for _ in range(50)]
    assert seq1 == seq2


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=8))
def test_best_response_attains_maximum(values):
    idx = best_response(values)
    assert values[idx] == max(values)


def test_potential_property_identical_interest():
    game = coordination_2x2()
    assert check_potential_property(game, lambda y: game.utility(0, y))
    assert has_identical_interests(game)


def test_potential_property_rejects_matching_pennies():
    game = matching_pennies()
    assert not check_potential_property(game, lambda y: 0.0)
    assert not has_identical_interests(game)
    # exhibit one violating deviation explicitly: player 0 switching from a
    # match to a mismatch changes u_0 by 2 while phi = 0 never moves
    assert game.utility(0, (0, 0)) - game.utility(0, (1, 0)) == pytest.approx(2.0)


def test_potential_property_congestion_two_drivers():
    from fplearn import AffineCost, CongestionGame

    game = CongestionGame(2, [AffineCost(1.0, 0.0), AffineCost(2.0, 1.0)])

    def summed_marginal_cost(y):
        loads = [0, 0]
        for a in y:
            loads[a] += 1
        total = 0.0
        for r, load in enumerate(loads):
            for k in range(1, load + 1):
                total += game.route_cost(r, k)
        return -total

    assert check_potential_property(game, summed_marginal_cost)


def test_tags_and_describe():
    game = matching_pennies()
    assert game.tags == {"zero_sum"}
    desc = game.describe()
    assert desc["kind"] == "matrix"
    assert desc["action_counts"] == [2, 2]
    assert len(desc["payoffs"]) == 2
