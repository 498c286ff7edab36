"""Per-round sampling budgets and step-size weights for the engines.

Two schedule families drive the sampling algorithms: `SampleCountSchedule`
gives the number of fresh samples k_t drawn in round t (a power law
C * t^gamma with configurable rounding), and `StepSizeSchedule` gives the
recursive-averaging weight rho(t) (a power law t^-beta or an explicit
sequence). Validators check the sufficient conditions under which the
algorithms are known to learn equilibria: gamma strictly above 1/2 for
sample counts; rho in (0, 1], square-summable, with t*rho(t) diverging
for step sizes (see `fplearn.estimation.validate_step_schedule`).
"""

import math
from dataclasses import dataclass

import numpy as np


class SampleCountSchedule:
    """k_t = round(C * t^gamma) with ceil or floor rounding, clamped to >= 1.

    Defaults C=1, gamma=0.6 with ceil rounding; floor rounding matches the
    benchmark variant floor(t^0.6). Learning guarantees for the sampled
    algorithm are stated for the ceil form with gamma > 1/2.
    """

    def __init__(self, c=1.0, gamma=0.6, rounding="ceil"):
        if rounding not in ("ceil", "floor"):
            raise ValueError(f"rounding must be 'ceil' or 'floor', got {rounding!r}")
        self.c = float(c)
        self.gamma = float(gamma)
        self.rounding = rounding

    def __call__(self, t: int) -> int:
        if t < 1:
            raise ValueError("rounds are numbered from 1")
        raw = self.c * t**self.gamma
        k = math.ceil(raw) if self.rounding == "ceil" else math.floor(raw)
        return max(1, k)

    def counts(self, horizon: int) -> np.ndarray:
        """k_t for t = 1..horizon."""
        t = np.arange(1, horizon + 1, dtype=float)
        raw = self.c * t**self.gamma
        k = np.ceil(raw) if self.rounding == "ceil" else np.floor(raw)
        return np.maximum(1, k.astype(np.int64))

    def cumulative(self, horizon: int) -> int:
        return int(self.counts(horizon).sum())

    def validate(self) -> "SampleScheduleReport":
        return SampleScheduleReport(
            c=self.c,
            gamma=self.gamma,
            rounding=self.rounding,
            c_positive=self.c > 0,
            gamma_above_half=self.gamma > 0.5,
            form_matches_assumption=self.rounding == "ceil",
        )

    def describe(self) -> dict:
        return {"c": self.c, "gamma": self.gamma, "rounding": self.rounding}


@dataclass(frozen=True)
class SampleScheduleReport:
    """Checks of the sample-growth condition ceil(C t^gamma), gamma > 1/2."""

    c: float
    gamma: float
    rounding: str
    c_positive: bool
    gamma_above_half: bool
    # Informational: floor rounding is supported but the stated guarantee
    # covers the ceil form.
    form_matches_assumption: bool

    @property
    def passed(self) -> bool:
        return self.c_positive and self.gamma_above_half

    def lines(self) -> list:
        ok = {True: "pass", False: "FAIL"}
        return [
            f"sample schedule k_t = {self.rounding}({self.c} * t^{self.gamma})",
            f"  C > 0:        {ok[self.c_positive]} (C = {self.c})",
            f"  gamma > 1/2:  {ok[self.gamma_above_half]} (gamma = {self.gamma})",
            f"  ceil form:    {'yes' if self.form_matches_assumption else 'no (floor variant)'}",
            f"  overall:      {ok[self.passed]}",
        ]


class StepSizeSchedule:
    """rho(t) = t^-beta, or an explicit caller-supplied sequence.

    The power form with beta in (0.5, 1) satisfies all conditions needed
    for single-sample utility tracking; rho(1) = 1 makes the zero
    initialization of estimate tables irrelevant.
    """

    def __init__(self, beta=0.6, sequence=None):
        if sequence is not None:
            arr = np.asarray(sequence, dtype=float)
            if arr.ndim != 1 or arr.shape[0] == 0:
                raise ValueError("step-size sequence must be a non-empty vector")
            if not np.all(np.isfinite(arr)):
                raise ValueError("step-size sequence must be finite")
            self.sequence = arr
            self.beta = None
        else:
            self.sequence = None
            self.beta = float(beta)

    @property
    def is_power(self) -> bool:
        return self.sequence is None

    def __call__(self, t: int) -> float:
        if t < 1:
            raise ValueError("rounds are numbered from 1")
        if self.is_power:
            return float(t) ** -self.beta
        if t > self.sequence.shape[0]:
            raise ValueError(
                f"step-size sequence has {self.sequence.shape[0]} entries, "
                f"round {t} requested"
            )
        return float(self.sequence[t - 1])

    def values(self, horizon: int) -> np.ndarray:
        """rho(t) for t = 1..horizon."""
        if self.is_power:
            return np.arange(1, horizon + 1, dtype=float) ** -self.beta
        if horizon > self.sequence.shape[0]:
            raise ValueError(
                f"step-size sequence has {self.sequence.shape[0]} entries, "
                f"horizon {horizon} requested"
            )
        return self.sequence[:horizon].copy()

    def describe(self) -> dict:
        if self.is_power:
            return {"beta": self.beta}
        return {"sequence_length": int(self.sequence.shape[0])}
