"""Game description files: JSON schema, builtin names, fingerprints.

A game file is a JSON document with a ``schema_version`` and a ``kind``:

- ``{"kind": "builtin", "name": "matching_pennies"}`` — a named builtin;
  ``congestion:drivers=50,routes=10,seed=7`` names a randomly generated
  affine congestion instance.
- ``{"kind": "matrix", "action_counts": [2, 2], "payoffs": [...], "tags": [...]}``
  — dense payoff tensors, one flat row-major list per player.
- ``{"kind": "congestion", "num_drivers": 10, "routes": [{"affine": [1, 0]}, ...]}``
- ``{"kind": "congestion_random", "num_drivers": 50, "num_routes": 10, "seed": 7}``
  — affine costs drawn uniformly from configurable ranges.
"""

import hashlib
import json
import math

import numpy as np

from .congestion import CongestionGame, random_affine_instance
from .exceptions import ConfigError
from .games import MatrixGame, coordination_2x2, matching_pennies

GAME_SCHEMA_VERSION = 1

BUILTIN_GAMES = {
    "matching_pennies": (
        matching_pennies,
        "2x2 zero-sum: +1 to player 0 on matching actions, -1 otherwise",
    ),
    "coordination_2x2": (
        coordination_2x2,
        "2x2 identical-interest: payoff 1 on the diagonal, 0 off it",
    ),
}

CONGESTION_PREFIX = "congestion:"


def list_builtin_games() -> list:
    """(name, description) rows for every builtin form."""
    rows = [(name, desc) for name, (_, desc) in sorted(BUILTIN_GAMES.items())]
    rows.append(
        (
            CONGESTION_PREFIX + "drivers=N,routes=M,seed=S",
            "random affine congestion instance (defaults: drivers=50, routes=10, seed=7)",
        )
    )
    return rows


def _parse_congestion_name(name: str) -> CongestionGame:
    params = {"drivers": 50, "routes": 10, "seed": 7}
    body = name[len(CONGESTION_PREFIX) :]
    if body:
        for part in body.split(","):
            if "=" not in part:
                raise ConfigError(f"bad congestion parameter {part!r} in {name!r}")
            key, _, value = part.partition("=")
            key = key.strip()
            if key not in params:
                raise ConfigError(f"unknown congestion parameter {key!r} in {name!r}")
            try:
                params[key] = int(value)
            except ValueError as exc:
                raise ConfigError(f"bad integer for {key!r} in {name!r}") from exc
    return random_affine_instance(params["drivers"], params["routes"], params["seed"])


def builtin_game(name: str):
    if name in BUILTIN_GAMES:
        return BUILTIN_GAMES[name][0]()
    if name.startswith(CONGESTION_PREFIX):
        return _parse_congestion_name(name)
    raise ConfigError(
        f"unknown builtin game {name!r}; known: "
        + ", ".join(sorted(BUILTIN_GAMES) + [CONGESTION_PREFIX + "<params>"])
    )


def game_from_spec(spec):
    """Build a game from a spec dict or a builtin name string."""
    if isinstance(spec, str):
        return builtin_game(spec)
    if not isinstance(spec, dict):
        raise ConfigError(f"game spec must be a dict or builtin name, got {type(spec)}")
    version = spec.get("schema_version", GAME_SCHEMA_VERSION)
    if version != GAME_SCHEMA_VERSION:
        raise ConfigError(f"unsupported game schema_version {version}")
    kind = spec.get("kind")
    if kind == "builtin":
        return builtin_game(spec.get("name", ""))
    if kind == "matrix":
        return _matrix_from_spec(spec)
    if kind == "congestion":
        try:
            return CongestionGame(spec.get("num_drivers", 0), spec.get("routes", []))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad congestion game spec: {exc}") from exc
    if kind == "congestion_random":
        return _random_congestion_from_spec(spec)
    raise ConfigError(f"unknown game kind {kind!r}")


def _matrix_from_spec(spec) -> MatrixGame:
    counts = spec.get("action_counts")
    payoffs = spec.get("payoffs")
    if not counts or not payoffs:
        raise ConfigError("matrix game spec needs action_counts and payoffs")
    counts = [int(m) for m in counts]
    if "num_players" in spec and int(spec["num_players"]) != len(counts):
        raise ConfigError("num_players does not match action_counts length")
    if len(payoffs) != len(counts):
        raise ConfigError(
            f"need one payoff tensor per player: got {len(payoffs)} for {len(counts)} players"
        )
    size = math.prod(counts)
    tensors = []
    for i, flat in enumerate(payoffs):
        arr = np.asarray(flat, dtype=float)
        if arr.size != size:
            raise ConfigError(
                f"payoff tensor of player {i} has {arr.size} entries, expected {size}"
            )
        tensors.append(arr.reshape(counts))
    try:
        return MatrixGame(tensors, tags=spec.get("tags", ()))
    except ValueError as exc:
        raise ConfigError(f"bad matrix game spec: {exc}") from exc


def _random_congestion_from_spec(spec) -> CongestionGame:
    try:
        return random_affine_instance(
            int(spec["num_drivers"]),
            int(spec["num_routes"]),
            int(spec["seed"]),
            slope_range=tuple(spec.get("slope_range", (0.5, 2.0))),
            intercept_range=tuple(spec.get("intercept_range", (0.0, 5.0))),
        )
    except KeyError as exc:
        raise ConfigError(f"congestion_random spec missing field {exc}") from exc
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad congestion_random spec: {exc}") from exc


def load_game(path):
    """Load a game description file (JSON, schema_version required)."""
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read game file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"game file {path} is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict) or "schema_version" not in spec:
        raise ConfigError(f"game file {path} must be an object with schema_version")
    return game_from_spec(spec)


def save_game(game, path) -> None:
    spec = dict(game.describe())
    spec["schema_version"] = GAME_SCHEMA_VERSION
    with open(path, "w") as fh:
        json.dump(spec, fh, indent=2, sort_keys=True)
        fh.write("\n")


def game_fingerprint(game) -> str:
    """Stable hash of the realized game structure (for summary matching)."""
    canonical = json.dumps(game.describe(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
