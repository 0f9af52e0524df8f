"""Synthetic participants for pipeline validation, plus HOPs frame sampling.

ExactBayesian agents invert each elicitation format so the fitted Betas
reproduce the intended prior and normative posterior; where a format cannot
carry the distribution exactly (histogram balls quantize, saturated interval
probabilities) the record is flagged rather than silently degraded.
SampleBased agents hold the same distributions but reason through a handful
of mental draws: the location of each reported belief is the mean of k draws
while its spread stays the believer's own, so individual records scatter
around the normative answer and a cohort average converges back onto it.
That is the behavioral signature the analysis pipeline is built to detect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bayes import ObservedData, normative_update
from .betadist import BetaParams, beta_cdf, beta_mean, beta_mode, beta_sd
from .errors import ValidationError
from .fitting import (
    BIN_WIDTH,
    HISTOGRAM_BALLS,
    HISTOGRAM_BINS,
    WITHIN_BIN_VARIANCE,
    FitConfig,
    HistogramResponse,
    ModeIntervalResponse,
    SampleSetResponse,
    bin_midpoint,
    interval_for_mode,
)
from .records import (
    AttentionAnswer,
    Condition,
    Dataset,
    ElicitationArm,
    ElicitedBelief,
    ParticipantRecord,
    ResponseFormat,
    UncertaintyArm,
    attention_range_for,
    fill_fits,
    payload_kind,
)

__all__ = [
    "AgentSpec",
    "HopsSequence",
    "FLAG_CANNOT_ENCODE",
    "generate_hops",
    "simulate_agent",
    "simulate_cohort",
]

FLAG_CANNOT_ENCODE = "format-cannot-encode"

KIND_EXACT = "exact"
KIND_SAMPLE = "sample"


@dataclass(frozen=True)
class AgentSpec:
    kind: str  # "exact" or "sample"
    prior: BetaParams
    response_format: ResponseFormat
    seed: object = 0
    k: int = 5  # samples per response, sample-based agents only

    def __post_init__(self) -> None:
        if self.kind not in (KIND_EXACT, KIND_SAMPLE):
            raise ValidationError(f"kind must be 'exact' or 'sample', got {self.kind!r}")
        if not (1 <= self.k <= 10):
            raise ValidationError(f"k must be in 1..10, got {self.k}")


@dataclass(frozen=True)
class HopsSequence:
    frames: tuple
    source: ObservedData
    seed: int
    frame_duration_ms: int = 400

    def __post_init__(self) -> None:
        if len(self.frames) == 0:
            raise ValidationError("frames must be nonempty")
        if any(not (0.0 <= f <= 1.0) for f in self.frames):
            raise ValidationError("every frame must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "frames": list(self.frames),
            "frame_duration_ms": self.frame_duration_ms,
            "source": self.source.to_dict(),
            "seed": self.seed,
        }


def generate_hops(data: ObservedData, frame_count: int, seed: int) -> HopsSequence:
    """i.i.d. Binomial(n, p)/n draws shown as an animated frame sequence."""
    if frame_count < 1:
        raise ValidationError(f"frame_count must be positive, got {frame_count}")
    rng = np.random.default_rng(seed)
    n = data.total
    draws = rng.binomial(n, data.display_proportion, size=frame_count)
    return HopsSequence(tuple(float(d) / n for d in draws), data, seed)


def _beta_variance(p: BetaParams) -> float:
    s = beta_sd(p)
    return s * s


def _encode_samples(params: BetaParams) -> tuple[ElicitedBelief, list]:
    """Five-point pattern matching the first two moments exactly.

    [m-s, m-s, m, m+s, m+s] has mean m and population variance 0.8 s^2, so
    s = sqrt(1.25 v) reproduces the target variance and Method of Moments
    inverts it without loss. Clamping (distribution too wide for its mean)
    breaks exactness and is flagged.
    """
    m = beta_mean(params)
    v = _beta_variance(params)
    s = math.sqrt(1.25 * v)
    raw = (m - s, m - s, m, m + s, m + s)
    flags = []
    if raw[0] < 0.0 or raw[-1] > 1.0:
        flags.append(FLAG_CANNOT_ENCODE)
        raw = tuple(min(1.0, max(0.0, x)) for x in raw)
    return SampleSetResponse(raw, (100, 100, 100, 100, 100)), flags


def _encode_mode_interval(params: BetaParams) -> tuple[ElicitedBelief, list]:
    """True mode plus the exact band probability; the fitter inverts both."""
    flags = []
    if params.alpha > 1.0 and params.beta > 1.0:
        mode = beta_mode(params)
    else:
        # No interior mode exists; the format cannot carry this shape.
        flags.append(FLAG_CANNOT_ENCODE)
        mode = min(1.0 - 1e-9, max(1e-9, beta_mean(params)))
    band = interval_for_mode(mode)
    sp = beta_cdf(band.hi, params) - beta_cdf(band.lo, params)
    if not (0.0 < sp < 1.0):
        # Saturated probability carries no concentration information.
        flags.append(FLAG_CANNOT_ENCODE)
        sp = min(1.0, max(0.0, sp))
    return ModeIntervalResponse(mode, sp), flags


def _histogram_moments(counts: Sequence[int]) -> tuple[float, float]:
    n = HISTOGRAM_BALLS
    mean = sum(c * bin_midpoint(i) for i, c in enumerate(counts)) / n
    var = sum(c * (bin_midpoint(i) - mean) ** 2 for i, c in enumerate(counts)) / n
    return mean, var


def _encode_histogram(params: BetaParams, cfg: FitConfig) -> tuple[ElicitedBelief, list]:
    """Three-bin ball placement matching mean and variance up to quantization.

    The fitter adds the within-bin variance back when its toggle is on, so the
    placement targets the true variance minus that term. Counts are integers,
    so moments rarely match exactly; any quantization loss is flagged.
    """
    mean = beta_mean(params)
    v_target = _beta_variance(params)
    if cfg.histogram_bin_variance:
        v_target -= WITHIN_BIN_VARIANCE
    i0 = min(HISTOGRAM_BINS - 1, max(0, int(mean / BIN_WIDTH)))
    c = bin_midpoint(i0)
    delta = mean - c
    if v_target <= 0.0:
        counts = [0] * HISTOGRAM_BINS
        counts[i0] = HISTOGRAM_BALLS
        return HistogramResponse(tuple(counts)), [FLAG_CANNOT_ENCODE]

    best = None
    for k in range(1, HISTOGRAM_BINS):
        if i0 - k < 0 or i0 + k >= HISTOGRAM_BINS:
            break
        d = k * BIN_WIDTH
        n_side = HISTOGRAM_BALLS * (v_target + delta * delta) / (d * d)
        diff = HISTOGRAM_BALLS * delta / d
        n_plus = round((n_side + diff) / 2.0)
        n_minus = round((n_side - diff) / 2.0)
        n_center = HISTOGRAM_BALLS - n_plus - n_minus
        if min(n_plus, n_minus, n_center) < 0:
            continue
        counts = [0] * HISTOGRAM_BINS
        counts[i0 - k] = n_minus
        counts[i0] = n_center
        counts[i0 + k] = n_plus
        got_mean, got_var = _histogram_moments(counts)
        score = (got_mean - mean) ** 2 + (got_var - v_target) ** 2
        if best is None or score < best[0]:
            best = (score, counts)
    if best is None:
        counts = [0] * HISTOGRAM_BINS
        counts[i0] = HISTOGRAM_BALLS
        return HistogramResponse(tuple(counts)), [FLAG_CANNOT_ENCODE]
    score, counts = best
    flags = [] if score < 1e-24 else [FLAG_CANNOT_ENCODE]
    return HistogramResponse(tuple(counts)), flags


def _encode_belief(
    params: BetaParams, fmt: ResponseFormat, cfg: FitConfig
) -> tuple[ElicitedBelief, list]:
    kind = payload_kind(fmt)
    if kind == "samples":
        return _encode_samples(params)
    if kind == "mode_interval":
        return _encode_mode_interval(params)
    return _encode_histogram(params, cfg)


def _approximate_belief(params: BetaParams, k: int, rng: np.random.Generator) -> BetaParams:
    """The belief a k-draw reasoner reports in place of ``params``.

    The agent holds the full distribution but judges its location from k
    mental draws, so the reported mean is the draws' average while the
    reported spread stays the distribution's own. Location noise scales as
    1/sqrt(k) per agent and averages out across a cohort, which is what lets
    aggregate analyses land near the normative answer even though individual
    records miss it.
    """
    draws = rng.beta(params.alpha, params.beta, size=k)
    m = float(np.clip(np.mean(draws), 1e-9, 1.0 - 1e-9))
    concentration = params.alpha + params.beta
    return BetaParams(m * concentration, (1.0 - m) * concentration)


def simulate_agent(
    spec: AgentSpec,
    data: ObservedData,
    cfg: Optional[FitConfig] = None,
    *,
    agent_id: Optional[str] = None,
    dataset: Dataset = Dataset.TECH_SMALL,
    uncertainty: UncertaintyArm = UncertaintyArm.NO_UNCERTAINTY,
) -> ParticipantRecord:
    """One synthetic participant as a fitted, flagged ParticipantRecord."""
    cfg = cfg or FitConfig()
    posterior = normative_update(spec.prior, data)
    flags: list = []
    if spec.kind == KIND_EXACT:
        prior_belief: BetaParams = spec.prior
        posterior_belief: BetaParams = posterior
        view_time = 30.0
    else:
        rng = np.random.default_rng(spec.seed)
        prior_belief = _approximate_belief(spec.prior, spec.k, rng)
        posterior_belief = _approximate_belief(posterior, spec.k, rng)
        view_time = float(rng.uniform(10.0, 60.0))
    prior_resp, f1 = _encode_belief(prior_belief, spec.response_format, cfg)
    post_resp, f2 = _encode_belief(posterior_belief, spec.response_format, cfg)
    flags.extend(f"prior:{f}" for f in f1)
    flags.extend(f"posterior:{f}" for f in f2)
    record = ParticipantRecord(
        id=agent_id or f"sim-{spec.kind}-{spec.seed}",
        dataset=dataset,
        condition=Condition(spec.response_format, uncertainty, ElicitationArm.ELICITATION),
        prior_response=prior_resp,
        posterior_response=post_resp,
        flags=tuple(flags),
        view_time=view_time,
        attention_answer=attention_range_for(data),
        attention_pass=True,
        simulated=True,
    )
    return fill_fits(record, cfg)


def simulate_cohort(
    n: int,
    kind: str,
    prior: BetaParams,
    response_format: ResponseFormat,
    data: ObservedData,
    seed: int,
    cfg: Optional[FitConfig] = None,
    k: int = 5,
    dataset: Dataset = Dataset.TECH_SMALL,
    uncertainty: UncertaintyArm = UncertaintyArm.NO_UNCERTAINTY,
) -> list[ParticipantRecord]:
    """n agents with per-agent seeds derived from (seed, index)."""
    records = []
    for i in range(n):
        spec = AgentSpec(kind=kind, prior=prior, response_format=response_format, seed=[seed, i], k=k)
        records.append(
            simulate_agent(
                spec,
                data,
                cfg,
                agent_id=f"sim-{i:05d}",
                dataset=dataset,
                uncertainty=uncertainty,
            )
        )
    return records
