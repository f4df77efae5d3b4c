"""Restarting Bernoulli sequential probability-ratio test.

Each rescaled anomaly score is binarized against a threshold; the running
count of ones is compared against two straight-line boundaries in (t, count)
space, derived from the classic likelihood-ratio thresholds for testing
success probability p_null against p_alt with error targets alpha (false
alarm) and beta (miss). Crossing the upper line declares drift, crossing the
lower line declares stable behaviour, and — unlike the classical test, which
stops — the monitor restarts from zero after *either* terminal decision so
monitoring continues indefinitely.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ._validation import check_probability
from .errors import ConfigError, InputError


class Decision(enum.Enum):
    CONTINUE = "continue"
    DRIFT_DETECTED = "drift_detected"
    NO_DRIFT = "no_drift"


@dataclass(frozen=True)
class SprtConfig:
    p_null: float = 0.45      # exceedance probability under stable behaviour
    p_alt: float = 0.5        # exceedance probability under drift
    alpha: float = 0.05       # tolerated false-alarm rate
    beta: float = 0.005       # tolerated miss rate
    bin_threshold: float = 0.65  # score -> binary exceedance cut

    def __post_init__(self):
        check_probability(self.p_null, "p_null")
        check_probability(self.p_alt, "p_alt")
        check_probability(self.alpha, "alpha")
        check_probability(self.beta, "beta")
        if self.p_alt <= self.p_null:
            raise ConfigError(
                f"p_alt ({self.p_alt}) must exceed p_null ({self.p_null})"
            )
        if self.alpha + self.beta >= 1.0:
            raise ConfigError(
                f"alpha + beta must stay below 1, got {self.alpha + self.beta}"
            )
        if not 0.0 <= self.bin_threshold <= 1.0:
            raise ConfigError("bin_threshold must lie in [0, 1]")


def binarize(score: float, threshold: float) -> int:
    """1 when the score strictly exceeds the threshold, else 0."""
    if not 0.0 <= score <= 1.0:
        raise InputError(f"score must lie in [0, 1], got {score}")
    return 1 if score > threshold else 0


def sprt_limits(config: SprtConfig, t: int) -> tuple[float, float]:
    """(lower, upper) decision boundaries for the cumulative count at time t.

    Both are lines in t with the same slope; the cumulative number of
    exceedances is compared against them after each sample.
    """
    if t < 0:
        raise InputError(f"t must be nonnegative, got {t}")
    p0, p1, a, b = config.p_null, config.p_alt, config.alpha, config.beta
    denom = math.log(p1 / p0) - math.log((1.0 - p1) / (1.0 - p0))
    slope_term = t * math.log((1.0 - p0) / (1.0 - p1))
    upper = (math.log((1.0 - b) / a) + slope_term) / denom
    lower = (math.log(b / (1.0 - a)) + slope_term) / denom
    return lower, upper


@dataclass(frozen=True)
class SprtStepResult:
    decision: Decision
    t: int            # samples consumed in the (just-ended or ongoing) round
    cm: int           # cumulative exceedances at decision time, pre-restart
    lower: float
    upper: float


class SprtMonitor:
    """Stateful restarting test over a stream of 0/1 exceedance indicators."""

    def __init__(self, config: SprtConfig | None = None):
        self.config = config or SprtConfig()
        self.t = 0
        self.cm = 0
        self.last_decision = Decision.CONTINUE

    def step(self, c: int) -> SprtStepResult:
        """Consume one indicator; decide and restart on a terminal decision."""
        if c not in (0, 1):
            raise InputError(f"indicator must be 0 or 1, got {c!r}")
        self.t += 1
        self.cm += c
        lower, upper = sprt_limits(self.config, self.t)
        if self.cm > upper:
            decision = Decision.DRIFT_DETECTED
        elif self.cm < lower:
            decision = Decision.NO_DRIFT
        else:
            decision = Decision.CONTINUE
        result = SprtStepResult(
            decision=decision, t=self.t, cm=self.cm, lower=lower, upper=upper
        )
        self.last_decision = decision
        if decision is not Decision.CONTINUE:
            self.t = 0
            self.cm = 0
        return result

    def step_score(self, score: float) -> SprtStepResult:
        """Binarize a rescaled score against the configured cut, then step."""
        return self.step(binarize(score, self.config.bin_threshold))

    def state(self) -> dict:
        return {"t": self.t, "cm": self.cm, "last_decision": self.last_decision.value}

    def load_state(self, state: dict) -> None:
        self.t = int(state["t"])
        self.cm = int(state["cm"])
        self.last_decision = Decision(state["last_decision"])


def combine_decisions(decisions: list[Decision]) -> Decision:
    """Fuse per-dimension decisions into one stream-level decision.

    Any dimension reporting drift wins; stability requires every dimension
    to report it; anything else keeps monitoring.
    """
    if not decisions:
        raise InputError("cannot combine an empty decision list")
    if any(d is Decision.DRIFT_DETECTED for d in decisions):
        return Decision.DRIFT_DETECTED
    if all(d is Decision.NO_DRIFT for d in decisions):
        return Decision.NO_DRIFT
    return Decision.CONTINUE
