import numpy as np
import pytest

from fplearn import MatrixGame
from fplearn.games import NormalFormGame


def three_player_match() -> MatrixGame:
    """Identical-interest game: payoff 1 iff all three players match."""
    t = np.zeros((2, 2, 2))
    for a in range(2):
        t[a, a, a] = 1.0
    return MatrixGame([t, t, t], tags={"identical_interest", "potential"})


def enumeration_row(game, player, vectors):
    """Independent exact oracle: full enumeration of opponents' outcomes.

    Bypasses any fast path a game subclass provides.
    """
    return NormalFormGame._enumerated_row(game, player, vectors)


def random_matrix_game(rng, counts, span=2.0) -> MatrixGame:
    tensors = [rng.uniform(-span, span, size=tuple(counts)) for _ in counts]
    return MatrixGame(tensors)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
