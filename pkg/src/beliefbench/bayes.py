"""Normative belief updating for binomial data under Beta priors.

Conjugate updates, cohort aggregation, perceived-data back-calculation,
weighting classification, and mean/sd residuals. Everything here is a pure
function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .betadist import BetaParams, beta_mean, beta_mode, beta_sd
from .errors import EmptyInputError, ValidationError

__all__ = [
    "ObservedData",
    "PerceivedData",
    "WeightingClass",
    "aggregate",
    "classify_weighting",
    "normative_update",
    "perceived_data",
    "residuals",
]

DEFAULT_ICON_UNIT = 600


@dataclass(frozen=True)
class ObservedData:
    """A binomial observation shown to participants: counts plus display hints."""

    successes: int
    failures: int
    label: str = ""
    icon_unit: int = DEFAULT_ICON_UNIT

    def __post_init__(self) -> None:
        for name in ("successes", "failures"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValidationError(
                    f"{name} must be a nonnegative integer, got {value!r}", path=(name,)
                )
        if self.successes + self.failures == 0:
            raise ValidationError("successes + failures must be positive")
        if not isinstance(self.icon_unit, int) or isinstance(self.icon_unit, bool) or self.icon_unit <= 0:
            raise ValidationError(
                f"icon_unit must be a positive integer, got {self.icon_unit!r}",
                path=("icon_unit",),
            )

    @property
    def total(self) -> int:
        return self.successes + self.failures

    @property
    def display_proportion(self) -> float:
        return self.successes / self.total

    def to_dict(self) -> dict:
        return {
            "successes": self.successes,
            "failures": self.failures,
            "label": self.label,
            "icon_unit": self.icon_unit,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ObservedData":
        return cls(
            successes=d["successes"],
            failures=d["failures"],
            label=d.get("label", ""),
            icon_unit=d.get("icon_unit", DEFAULT_ICON_UNIT),
        )


class WeightingClass(str, Enum):
    """How a posterior sits relative to the normative one. Exactly one applies."""

    ALIGNED = "Aligned"
    OVERWEIGHT_DATA = "OverweightData"
    OVERWEIGHT_PRIOR = "OverweightPrior"
    BEYOND_PRIOR = "BeyondPrior"


@dataclass(frozen=True)
class PerceivedData:
    """Back-calculated data a rational updater would have needed.

    Components may be negative when the participant moved away from the data;
    they are reported as-is with the flag set, never clamped.
    """

    alpha_perceived: float
    beta_perceived: float
    negative_flag: bool

    @property
    def n_perceived(self) -> float:
        return self.alpha_perceived + self.beta_perceived

    def to_dict(self) -> dict:
        return {
            "alpha_perceived": self.alpha_perceived,
            "beta_perceived": self.beta_perceived,
            "n_perceived": self.n_perceived,
            "negative_flag": self.negative_flag,
        }


def normative_update(prior: BetaParams, data: ObservedData) -> BetaParams:
    """Conjugate posterior Beta(alpha + successes, beta + failures)."""
    return BetaParams(prior.alpha + data.successes, prior.beta + data.failures)


def aggregate(params: Sequence[BetaParams]) -> BetaParams:
    """Component-wise mean of alphas and betas across a cohort."""
    if len(params) == 0:
        raise EmptyInputError("aggregate requires at least one BetaParams")
    first = params[0]
    if all(p == first for p in params[1:]):
        # The mean of identical elements is that element; a float sum divided
        # back by n can land one ulp off, which would break the exact
        # zero-KLD sentinel for uniform cohorts.
        return first
    n = len(params)
    return BetaParams(
        math.fsum(p.alpha for p in params) / n,
        math.fsum(p.beta for p in params) / n,
    )


def _snap_count(diff: float, scale: float) -> float:
    # A conjugate update can misplace the posterior by one rounding step, so a
    # difference within two ulps of an integer is that integer. Real-world
    # fractional responses never sit that close.
    r = round(diff)
    if diff != r and abs(diff - r) <= 2.0 * math.ulp(max(abs(scale), 1.0)):
        return float(r)
    return diff


def perceived_data(prior: BetaParams, participant_posterior: BetaParams) -> PerceivedData:
    """Parameter-space difference posterior - prior, the implied observation."""
    da = _snap_count(participant_posterior.alpha - prior.alpha, participant_posterior.alpha)
    db = _snap_count(participant_posterior.beta - prior.beta, participant_posterior.beta)
    return PerceivedData(da, db, negative_flag=(da < 0.0 or db < 0.0))


def classify_weighting(
    prior: BetaParams,
    data: ObservedData,
    participant_posterior: BetaParams,
    tol: float = 0.01,
) -> WeightingClass:
    """Classify a posterior mode against the data, prior, and normative modes.

    Rules apply in order: Aligned when within tol of the normative mode,
    OverweightData when closer to the data than the normative mode is,
    BeyondPrior when farther from the data than the prior is, otherwise
    OverweightPrior. The data's mode is its observed proportion.
    """
    if not (0.0 <= tol < 1.0):
        raise ValidationError(f"tol must be a proportion, got {tol!r}")
    d = data.display_proportion
    n = beta_mode(normative_update(prior, data))
    x = beta_mode(participant_posterior)
    p = beta_mode(prior)
    if abs(x - n) <= tol:
        return WeightingClass.ALIGNED
    if abs(x - d) < abs(n - d):
        return WeightingClass.OVERWEIGHT_DATA
    if abs(x - d) > abs(p - d):
        return WeightingClass.BEYOND_PRIOR
    return WeightingClass.OVERWEIGHT_PRIOR


def residuals(
    participant_posterior: BetaParams, normative_posterior: BetaParams
) -> tuple[float, float]:
    """(observed - predicted) residuals of the mean and standard deviation."""
    return (
        beta_mean(participant_posterior) - beta_mean(normative_posterior),
        beta_sd(participant_posterior) - beta_sd(normative_posterior),
    )
