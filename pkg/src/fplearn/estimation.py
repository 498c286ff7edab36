"""Stochastic-approximation primitives used by the single-sample engine.

The recursive average y_t = (1 - rho_t) y_{t-1} + rho_t x_t, under a
diminishing step-size schedule, tracks a slowly drifting mean from one
bounded noisy sample per round. This module provides that recursion in
isolation (`toeplitz_average_step`, `TrackingEstimator`) together with a
diagnostic (`validate_step_schedule`) for the three conditions a schedule
must satisfy: 0 < rho(t) <= 1, square-summability, and 1/(t*rho(t)) -> 0.
The last condition implies sum rho(t) = infinity, so it doubles as the
divergence certificate.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .schedules import StepSizeSchedule
from .validation import check_step_size


def toeplitz_average_step(y_prev: float, x_t: float, rho_t: float) -> float:
    """One recursive-averaging step: (1 - rho_t) * y_prev + rho_t * x_t."""
    rho_t = check_step_size(rho_t)
    return (1.0 - rho_t) * y_prev + rho_t * x_t


class TrackingEstimator:
    """Scalar mean tracker driven by one bounded sample per round.

    Applies `toeplitz_average_step` with rho from the supplied schedule.
    With rho(1) = 1 the initial value is overwritten by the first sample,
    and the estimate always stays within the range of observed samples
    and the initial value.
    """

    def __init__(self, schedule=None, initial=0.0):
        if schedule is None:
            schedule = StepSizeSchedule()
        elif not isinstance(schedule, StepSizeSchedule):
            schedule = StepSizeSchedule(beta=float(schedule))
        self.schedule = schedule
        self.estimate = float(initial)
        self.t = 0

    def update(self, sample: float) -> "TrackingEstimator":
        """Consume one sample, advance the round counter, return self."""
        sample = float(sample)
        if not math.isfinite(sample):
            raise ValueError("sample must be finite")
        self.t += 1
        self.estimate = toeplitz_average_step(self.estimate, sample, self.schedule(self.t))
        return self

    def __repr__(self):
        return f"TrackingEstimator(t={self.t}, estimate={self.estimate:.6g})"


@dataclass
class StepScheduleReport:
    """Clause-by-clause diagnostic of a step-size schedule.

    Power schedules get analytic verdicts; explicit sequences get numeric
    ones (trend checks and a decay-exponent fit over the last decade of
    the horizon), which are necessarily heuristic.
    """

    t_check: int
    analytic: bool
    rho_min: float
    rho_max: float
    positive_le_one: bool
    sq_partial_sum: float
    sq_tail_bound: float | None
    sq_summable: bool
    inv_t_rho_final: float
    inv_t_rho_mid: float
    limit_vanishes: bool
    divergence_certified: bool
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.positive_le_one and self.sq_summable and self.limit_vanishes

    def lines(self) -> list:
        ok = {True: "pass", False: "FAIL"}
        out = [
            f"step-size schedule checked to t = {self.t_check}"
            + (" (analytic)" if self.analytic else " (numeric)"),
            f"  0 < rho <= 1:      {ok[self.positive_le_one]}"
            f" (min {self.rho_min:.3g}, max {self.rho_max:.3g})",
            f"  sum rho^2 finite:  {ok[self.sq_summable]}"
            f" (partial sum {self.sq_partial_sum:.6g}"
            + (
                f", tail bound {self.sq_tail_bound:.6g})"
                if self.sq_tail_bound is not None and math.isfinite(self.sq_tail_bound)
                else ", tail bound diverges)"
                if self.sq_tail_bound is not None
                else ")"
            ),
            f"  1/(t rho(t)) -> 0: {ok[self.limit_vanishes]}"
            f" (at t_check: {self.inv_t_rho_final:.6g}, at t_check/4: {self.inv_t_rho_mid:.6g})",
            f"  sum rho diverges:  {ok[self.divergence_certified]}",
            f"  overall:           {ok[self.passed]}",
        ]
        out.extend(f"  note: {n}" for n in self.notes)
        return out


def validate_step_schedule(schedule, t_check=1_000_000) -> StepScheduleReport:
    """Check a step-size schedule against the tracking conditions.

    `schedule` is a StepSizeSchedule, a float beta (meaning t^-beta), or
    an explicit sequence of rho values. `t_check` is the evaluation
    horizon (at least 1000); sequences shorter than t_check are checked
    over their full length.
    """
    if isinstance(schedule, StepSizeSchedule):
        sched = schedule
    elif np.isscalar(schedule):
        sched = StepSizeSchedule(beta=float(schedule))
    else:
        sched = StepSizeSchedule(sequence=schedule)
    t_check = int(t_check)
    if t_check < 1000:
        raise ValueError("t_check must be at least 1000")

    notes = []
    if sched.is_power:
        beta = sched.beta
        rho = np.arange(1, t_check + 1, dtype=float) ** -beta
        sq_partial = float((rho**2).sum())
        # Integral tail bound for sum_{t > T} t^(-2 beta), finite iff beta > 1/2.
        if 2 * beta > 1:
            tail = t_check ** (1 - 2 * beta) / (2 * beta - 1)
        else:
            tail = math.inf
        sq_summable = 2 * beta > 1
        inv_final = 1.0 / (t_check * rho[-1])
        mid = max(1, t_check // 4)
        inv_mid = 1.0 / (mid * rho[mid - 1])
        limit_vanishes = beta < 1  # 1/(t rho) = t^(beta-1)
        if beta == 1:
            notes.append("1/(t rho(t)) = 1 for all t; the limit clause needs beta < 1")
        divergence = beta <= 1  # sum t^-beta diverges iff beta <= 1
        return StepScheduleReport(
            t_check=t_check,
            analytic=True,
            rho_min=float(rho.min()),
            rho_max=float(rho.max()),
            positive_le_one=bool(rho.min() > 0 and rho.max() <= 1.0),
            sq_partial_sum=sq_partial,
            sq_tail_bound=tail,
            sq_summable=sq_summable,
            inv_t_rho_final=inv_final,
            inv_t_rho_mid=inv_mid,
            limit_vanishes=limit_vanishes,
            divergence_certified=divergence,
            notes=notes,
        )

    rho = sched.sequence
    if rho.shape[0] < t_check:
        t_check = rho.shape[0]
        notes.append(f"sequence shorter than requested horizon; checked {t_check} terms")
        if t_check < 1000:
            raise ValueError("step-size sequences must supply at least 1000 terms")
    rho = rho[:t_check]
    t = np.arange(1, t_check + 1, dtype=float)
    positive = bool(rho.min() > 0 and rho.max() <= 1.0)
    sq_partial = float((rho**2).sum())
    # Fit rho ~ t^-b over the last decade; rho^2 is summable iff b > 1/2.
    window = t >= t_check / 10
    with np.errstate(divide="ignore"):
        logs = np.log(np.where(rho > 0, rho, np.nan))
    b_fit = float(-np.polyfit(np.log(t[window]), logs[window], 1)[0]) if positive else math.nan
    sq_summable = positive and b_fit > 0.51
    notes.append(f"fitted decay exponent over last decade: {b_fit:.3f}")
    inv = 1.0 / (t * rho) if positive else np.full_like(t, math.inf)
    inv_final = float(inv[-1])
    mid = max(1, t_check // 4)
    inv_mid = float(inv[mid - 1])
    limit_vanishes = positive and inv_final < 0.995 * inv_mid
    return StepScheduleReport(
        t_check=t_check,
        analytic=False,
        rho_min=float(rho.min()),
        rho_max=float(rho.max()),
        positive_le_one=positive,
        sq_partial_sum=sq_partial,
        sq_tail_bound=None,
        sq_summable=sq_summable,
        inv_t_rho_final=inv_final,
        inv_t_rho_mid=inv_mid,
        limit_vanishes=limit_vanishes,
        # 1/(t rho(t)) -> 0 forces rho(t) >= c/t eventually, whose sum diverges.
        divergence_certified=limit_vanishes,
        notes=notes,
    )
