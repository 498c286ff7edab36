"""Parallel-route traffic games with a polynomial-time exact utility oracle.

All drivers share one origin and destination and pick one of `m` parallel
routes; the delay on a route depends only on how many drivers chose it.
Because strategies are independent, the number of opponents on a route is
Poisson-binomial distributed, which gives exact expected utilities in
O(n^2) per (player, route) instead of enumerating m^(n-1) outcomes. Routes
with affine costs reduce further to closed forms by linearity.
"""

from dataclasses import dataclass

import numpy as np

from .games import NormalFormGame, profile_vectors, _readonly
from .validation import check_joint_action, check_player, check_probabilities


@dataclass(frozen=True)
class AffineCost:
    """Route delay c(k) = slope * k + intercept for load k >= 1."""

    slope: float
    intercept: float

    def __post_init__(self):
        if not np.isfinite(self.slope) or not np.isfinite(self.intercept):
            raise ValueError("affine cost parameters must be finite")
        if self.slope < 0:
            raise ValueError("affine cost slope must be non-negative")

    def table(self, num_drivers: int) -> np.ndarray:
        return self.slope * np.arange(1, num_drivers + 1) + self.intercept

    def describe(self) -> dict:
        return {"affine": [self.slope, self.intercept]}


@dataclass(frozen=True)
class TabularCost:
    """Route delay given explicitly for every load 1..num_drivers."""

    values: tuple

    def table(self, num_drivers: int) -> np.ndarray:
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (num_drivers,):
            raise ValueError(
                f"cost table has {arr.shape[0]} entries, expected {num_drivers}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("cost table must be finite")
        return arr

    def describe(self) -> dict:
        return {"table": [float(v) for v in self.values]}


def _as_cost(spec):
    if isinstance(spec, (AffineCost, TabularCost)):
        return spec
    if isinstance(spec, dict):
        if "affine" in spec:
            a, b = spec["affine"]
            return AffineCost(float(a), float(b))
        if "table" in spec:
            return TabularCost(tuple(float(v) for v in spec["table"]))
        raise ValueError(f"route spec dict needs 'affine' or 'table': {spec!r}")
    if isinstance(spec, tuple) and len(spec) == 2:
        return AffineCost(float(spec[0]), float(spec[1]))
    raise TypeError(f"cannot interpret route cost spec {spec!r}")


class CongestionGame(NormalFormGame):
    """Congestion game on parallel routes.

    Parameters
    ----------
    num_drivers : int
        Number of players; each picks one route.
    routes : sequence
        One cost spec per route: AffineCost, TabularCost, a dict
        ``{"affine": [a, b]}`` / ``{"table": [...]}``, or an ``(a, b)``
        tuple meaning an affine cost.

    The induced utility is u_i(y) = -c_{y_i}(load of route y_i under y),
    so the game is a potential game with the standard summed-marginal-cost
    potential (see `rosenthal_potential`).
    """

    def __init__(self, num_drivers, routes):
        num_drivers = int(num_drivers)
        costs = [_as_cost(r) for r in routes]
        if num_drivers < 2:
            raise ValueError("need at least 2 drivers")
        if not costs:
            raise ValueError("need at least one route")
        m = len(costs)
        # _cost_table[r, k] = c_r(k) for loads k = 1..n; column 0 unused.
        table = np.zeros((m, num_drivers + 1))
        slopes = np.full(m, np.nan)
        intercepts = np.full(m, np.nan)
        for r, cost in enumerate(costs):
            table[r, 1:] = cost.table(num_drivers)
            if isinstance(cost, AffineCost):
                slopes[r] = cost.slope
                intercepts[r] = cost.intercept
        self.num_drivers = num_drivers
        self.num_routes = m
        self._costs = tuple(costs)
        self._cost_table = _readonly(table)
        self._cum_cost = _readonly(np.cumsum(table, axis=1))
        self._affine_mask = np.isfinite(slopes)
        self._slopes = _readonly(slopes)
        self._intercepts = _readonly(intercepts)
        self._route_idx = np.arange(m)[None, :]
        self._driver_idx = np.arange(num_drivers)
        super().__init__(
            [m] * num_drivers, self._congestion_utility, tags={"potential"}
        )

    @property
    def all_affine(self) -> bool:
        return bool(self._affine_mask.all())

    @property
    def cost_table(self) -> np.ndarray:
        """Delay per (route, load); column 0 is padding."""
        return self._cost_table

    def route_cost(self, route, load) -> float:
        if not 1 <= load <= self.num_drivers:
            raise ValueError(f"load {load} outside 1..{self.num_drivers}")
        return float(self._cost_table[route, load])

    def _congestion_utility(self, player, joint_action):
        route = joint_action[player]
        load = sum(1 for a in joint_action if a == route)
        return -self._cost_table[route, load]

    @property
    def has_exact_oracle(self) -> bool:
        return True

    def exact_utility_row(self, player, profile) -> np.ndarray:
        vecs = profile_vectors(self, profile)
        player = check_player(self, player)
        row = np.empty(self.num_routes)
        col_sums = None
        for r in range(self.num_routes):
            if self._affine_mask[r]:
                if col_sums is None:
                    col_sums = np.zeros(self.num_routes)
                    for j, v in enumerate(vecs):
                        if j != player:
                            col_sums += v
                expected_load = 1.0 + col_sums[r]
                row[r] = -(self._slopes[r] * expected_load + self._intercepts[r])
            else:
                row[r] = congestion_mixed_utility(self, player, r, vecs)
        return row

    def _mixed_rows_matrix(self, q_matrix) -> np.ndarray:
        """Exact utility rows for every player at once; engine fast path."""
        if not self.all_affine:
            return super()._mixed_rows_matrix(q_matrix)
        # Expected load on r seen by i is 1 + sum_j q_j(r) - q_i(r).
        col_sums = q_matrix.sum(axis=0)
        loads = 1.0 + col_sums[None, :] - q_matrix
        return -(self._slopes[None, :] * loads + self._intercepts[None, :])

    def _pure_rows_matrix(self, joint) -> np.ndarray:
        joint = np.asarray(joint, dtype=np.intp)
        loads = np.bincount(joint, minlength=self.num_routes)
        own = np.zeros((self.num_drivers, self.num_routes), dtype=np.intp)
        own[self._driver_idx, joint] = 1
        opp_loads = loads[None, :] - own
        return -self._cost_table[self._route_idx, opp_loads + 1]

    def pure_utility_row(self, player, joint_action) -> np.ndarray:
        player = check_player(self, player)
        joint = check_joint_action(self, joint_action)
        loads = np.bincount(np.asarray(joint, dtype=np.intp), minlength=self.num_routes)
        opp_loads = loads.copy()
        opp_loads[joint[player]] -= 1
        return -self._cost_table[np.arange(self.num_routes), opp_loads + 1]

    def pure_utility_rows(self, joint_action) -> list:
        joint = check_joint_action(self, joint_action)
        return list(self._pure_rows_matrix(joint))

    def describe(self) -> dict:
        return {
            "kind": "congestion",
            "num_drivers": self.num_drivers,
            "routes": [c.describe() for c in self._costs],
        }


# -- load and distribution primitives ------------------------------------


def route_loads(game: CongestionGame, joint_action) -> np.ndarray:
    """Number of drivers on each route under a joint pure action."""
    joint = check_joint_action(game, joint_action)
    return np.bincount(np.asarray(joint, dtype=np.intp), minlength=game.num_routes)


def poisson_binomial_pmf(probabilities) -> np.ndarray:
    """Distribution of the number of successes of independent Bernoulli trials.

    Entry k is the probability that exactly k of the trials succeed,
    computed by iterative convolution in O(n^2). An empty input yields the
    point mass [1.0].
    """
    probs = check_probabilities(probabilities)
    n = probs.shape[0]
    pmf = np.zeros(n + 1)
    pmf[0] = 1.0
    for k, p in enumerate(probs):
        pmf[1 : k + 2] = pmf[1 : k + 2] * (1.0 - p) + pmf[: k + 1] * p
        pmf[0] *= 1.0 - p
    return pmf


def congestion_mixed_utility(game: CongestionGame, player, route, opponents) -> float:
    """Exact expected utility of taking `route` against mixing opponents.

    Returns -E[c_route(1 + B)] where B is the Poisson-binomial count of
    opponents choosing the route. Agrees with `mixed_utility_exact` up to
    floating-point summation on every enumerable instance.
    """
    player = check_player(game, player)
    route = int(route)
    if not 0 <= route < game.num_routes:
        raise ValueError(f"route {route} out of range")
    vecs = profile_vectors(game, opponents)
    probs = [vecs[j][route] for j in range(game.num_drivers) if j != player]
    pmf = poisson_binomial_pmf(probs)
    # B = k opponents on the route means our load is k + 1.
    return float(-(pmf @ game.cost_table[route, 1:]))


def _load_moments(game: CongestionGame, vecs):
    """Per-route mean and second moment of the load over all drivers."""
    q = np.stack(vecs)
    mean = q.sum(axis=0)
    var = (q * (1.0 - q)).sum(axis=0)
    return mean, var + mean**2


def expected_total_travel_time(game: CongestionGame, profile) -> float:
    """E[sum_r load_r * c_r(load_r)] under independent mixed strategies.

    Affine routes use exact load moments; tabular routes use the
    Poisson-binomial load distribution. Both equal the defining sum
    sum_r sum_k pmf_r(k) * k * c_r(k).
    """
    vecs = profile_vectors(game, profile)
    mean, second = _load_moments(game, vecs)
    total = 0.0
    for r in range(game.num_routes):
        if game._affine_mask[r]:
            total += game._slopes[r] * second[r] + game._intercepts[r] * mean[r]
        else:
            pmf = poisson_binomial_pmf([v[r] for v in vecs])
            k = np.arange(pmf.shape[0])
            total += float(pmf @ (k * game.cost_table[r, k]))
    return total


def rosenthal_potential(game: CongestionGame, joint_action) -> float:
    """Exact potential of a joint pure action: -sum_r sum_{k<=load_r} c_r(k)."""
    loads = route_loads(game, joint_action)
    return float(-game._cum_cost[np.arange(game.num_routes), loads].sum())


def expected_rosenthal_potential(game: CongestionGame, profile) -> float:
    """Expected value of the potential under independent mixed strategies."""
    vecs = profile_vectors(game, profile)
    mean, second = _load_moments(game, vecs)
    total = 0.0
    for r in range(game.num_routes):
        if game._affine_mask[r]:
            # sum_{k<=L} (a k + b) = a L(L+1)/2 + b L, in expectation.
            total += (
                game._slopes[r] * 0.5 * (second[r] + mean[r])
                + game._intercepts[r] * mean[r]
            )
        else:
            pmf = poisson_binomial_pmf([v[r] for v in vecs])
            total += float(pmf @ game._cum_cost[r, : pmf.shape[0]])
    return -total


# -- instance generators ---------------------------------------------------

# Desk-scale benchmark defaults: 50 drivers on 10 heterogeneous affine
# routes, generated from this fixed seed so results are reproducible.
BENCHMARK_SEED = 7
BENCHMARK_DRIVERS = 50
BENCHMARK_ROUTES = 10


def random_affine_instance(
    num_drivers,
    num_routes,
    seed,
    slope_range=(0.5, 2.0),
    intercept_range=(0.0, 5.0),
) -> CongestionGame:
    """Congestion game with affine costs drawn uniformly from given ranges."""
    rng = np.random.default_rng(seed)
    slopes = rng.uniform(*slope_range, size=num_routes)
    intercepts = rng.uniform(*intercept_range, size=num_routes)
    routes = [AffineCost(float(a), float(b)) for a, b in zip(slopes, intercepts)]
    return CongestionGame(num_drivers, routes)


def benchmark_instance(
    num_drivers=BENCHMARK_DRIVERS,
    num_routes=BENCHMARK_ROUTES,
    seed=BENCHMARK_SEED,
) -> CongestionGame:
    """The desk-scale routing benchmark (scales up to 1000 drivers, 50 routes)."""
    return random_affine_instance(num_drivers, num_routes, seed)
