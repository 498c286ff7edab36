"""Input-validation helpers used by the public API.

Small, reusable checks in the spirit of scikit-learn's utils: each helper
either returns a normalized value or raises with a message naming the
offending argument.
"""

import numbers

import numpy as np

from .exceptions import NonFiniteValue, ProbabilityOutOfRange, StepSizeOutOfRange

SIMPLEX_TOL = 1e-9


def as_rng(random_state) -> np.random.Generator:
    """Return a numpy Generator from None, an int seed, or a Generator."""
    if random_state is None:
        return np.random.default_rng()
    if isinstance(random_state, np.random.Generator):
        return random_state
    if isinstance(random_state, (int, np.integer)):
        return np.random.default_rng(int(random_state))
    raise TypeError(
        f"random_state must be None, an int, or a numpy Generator, got {random_state!r}"
    )


def check_probabilities(values, name="probabilities") -> np.ndarray:
    """Validate a flat sequence of probabilities in [0, 1]."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ProbabilityOutOfRange(f"{name} contains non-finite entries")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ProbabilityOutOfRange(f"{name} has entries outside [0, 1]")
    return arr


def check_simplex(vec, size=None, name="strategy", tol=SIMPLEX_TOL) -> np.ndarray:
    """Validate a probability vector: non-negative, sums to 1 within tol."""
    arr = np.asarray(vec, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a vector, got shape {arr.shape}")
    if size is not None and arr.shape[0] != size:
        raise ValueError(f"{name} has length {arr.shape[0]}, expected {size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.any(arr < -tol):
        raise ValueError(f"{name} has negative entries")
    total = float(arr.sum())
    if abs(total - 1.0) > tol:
        raise ValueError(f"{name} sums to {total}, not 1 within {tol}")
    return np.clip(arr, 0.0, None)


def check_finite_values(values, name="values") -> np.ndarray:
    """Validate a non-empty vector of finite reals (for argmax inputs)."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name} contains NaN or infinite entries")
    return arr


def check_step_size(rho, name="rho") -> float:
    """Validate a step size in (0, 1]."""
    if not isinstance(rho, numbers.Real) or not np.isfinite(rho):
        raise StepSizeOutOfRange(f"{name} must be a finite real, got {rho!r}")
    rho = float(rho)
    if not 0.0 < rho <= 1.0:
        raise StepSizeOutOfRange(f"{name}={rho} outside (0, 1]")
    return rho


def check_player(game, player) -> int:
    """Validate a player index against the game."""
    player = int(player)
    if not 0 <= player < game.num_players:
        raise ValueError(f"player {player} out of range for {game.num_players} players")
    return player


def check_action(game, player, action) -> int:
    """Validate an action index for one player."""
    action = int(action)
    if not 0 <= action < game.action_counts[player]:
        raise ValueError(
            f"action {action} out of range for player {player} "
            f"with {game.action_counts[player]} actions"
        )
    return action


def check_joint_action(game, joint) -> tuple:
    """Validate a joint pure action, one index per player."""
    joint = tuple(int(a) for a in joint)
    if len(joint) != game.num_players:
        raise ValueError(
            f"joint action has {len(joint)} entries, expected {game.num_players}"
        )
    for i, a in enumerate(joint):
        if not 0 <= a < game.action_counts[i]:
            raise ValueError(f"joint action entry {a} invalid for player {i}")
    return joint
