"""Fit Beta distributions to raw elicitation responses.

Three response formats are supported: free-form sample sets with confidence
weights (graphical or text entry), a mode plus the subjective probability of
the +/-25% interval around it, and a 100-ball histogram over twenty 5% bins.
Sample sets and histograms go through the Method of Moments; mode+interval
responses are fit by derivative-free minimization of a two-term squared
objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .betadist import BetaParams, Interval, beta_cdf
from .errors import DomainError, ValidationError
from .optimize import nelder_mead

__all__ = [
    "SampleSetResponse",
    "ModeIntervalResponse",
    "HistogramResponse",
    "FitConfig",
    "FitResult",
    "fit_from_samples",
    "fit_from_histogram",
    "fit_from_mode_interval",
    "interval_for_mode",
    "FLAG_DEVIANT",
    "FLAG_INVALID_MOMENTS",
    "FLAG_FIT_WARNING",
    "FLAG_DEGENERATE_SP",
]

HISTOGRAM_BINS = 20
HISTOGRAM_BALLS = 100
BIN_WIDTH = 1.0 / HISTOGRAM_BINS
# Variance of a uniform draw within one bin, added when each ball is treated
# as known only to within its bin.
WITHIN_BIN_VARIANCE = BIN_WIDTH * BIN_WIDTH / 12.0

MAX_SAMPLES = 5

FLAG_DEVIANT = "deviant"
FLAG_INVALID_MOMENTS = "invalid-moments"
FLAG_FIT_WARNING = "fit-warning"
FLAG_DEGENERATE_SP = "degenerate-subjective-probability"


@dataclass(frozen=True)
class SampleSetResponse:
    """One to five elicited samples with 0-100 confidence weights."""

    samples: tuple
    confidences: tuple

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(float(s) for s in self.samples))
        object.__setattr__(self, "confidences", tuple(self.confidences))
        if not self.samples:
            raise ValidationError("at least one sample required", ("samples",))
        if len(self.samples) > MAX_SAMPLES:
            raise ValidationError(
                f"at most {MAX_SAMPLES} samples allowed, got {len(self.samples)}", ("samples",)
            )
        if len(self.confidences) != len(self.samples):
            raise ValidationError(
                f"{len(self.confidences)} confidences for {len(self.samples)} samples",
                ("confidences",),
            )
        for i, s in enumerate(self.samples):
            if not (0.0 <= s <= 1.0):
                raise ValidationError(f"sample {s} outside [0, 1]", ("samples", i))
        for i, c in enumerate(self.confidences):
            if c != int(c) or not (0 <= int(c) <= 100):
                raise ValidationError(f"confidence {c} must be an integer in [0, 100]", ("confidences", i))
        object.__setattr__(self, "confidences", tuple(int(c) for c in self.confidences))


@dataclass(frozen=True)
class ModeIntervalResponse:
    """Most probable value plus subjective probability of its +/-25% interval."""

    mode: float
    subjective_probability: float

    def __post_init__(self):
        object.__setattr__(self, "mode", float(self.mode))
        object.__setattr__(self, "subjective_probability", float(self.subjective_probability))
        if not (0.0 < self.mode < 1.0):
            raise ValidationError(f"mode {self.mode} outside (0, 1)", ("mode",))
        if not (0.0 <= self.subjective_probability <= 1.0):
            raise ValidationError(
                f"subjective probability {self.subjective_probability} outside [0, 1]",
                ("subjective_probability",),
            )


@dataclass(frozen=True)
class HistogramResponse:
    """Exactly 100 balls dropped into twenty 5%-wide bins."""

    bin_counts: tuple

    def __post_init__(self):
        object.__setattr__(self, "bin_counts", tuple(self.bin_counts))
        if len(self.bin_counts) != HISTOGRAM_BINS:
            raise ValidationError(
                f"expected {HISTOGRAM_BINS} bins, got {len(self.bin_counts)}", ("bin_counts",)
            )
        for i, c in enumerate(self.bin_counts):
            if c != int(c) or int(c) < 0:
                raise ValidationError(f"count {c} must be a nonnegative integer", ("bin_counts", i))
        object.__setattr__(self, "bin_counts", tuple(int(c) for c in self.bin_counts))
        total = sum(self.bin_counts)
        if total != HISTOGRAM_BALLS:
            raise ValidationError(
                f"bin counts must sum to {HISTOGRAM_BALLS}, got {total}", ("bin_counts",)
            )


@dataclass(frozen=True)
class FitConfig:
    """Knobs for the fitting procedures.

    ``deviant_policy`` decides what degenerate responses (zero variance, all
    confidence zero, or unusable moments) map to: ``"uniform"`` is Beta(1, 1),
    ``"peaked"`` is a mode-matched Beta with total concentration
    ``peaked_concentration``.
    """

    deviant_policy: str = "uniform"
    peaked_concentration: Optional[float] = None
    objective_tol: float = 1e-10
    max_iterations: int = 400
    histogram_bin_variance: bool = True

    def __post_init__(self):
        if self.deviant_policy not in ("uniform", "peaked"):
            raise ValidationError(
                f"unknown deviant policy {self.deviant_policy!r}", ("deviant_policy",)
            )
        if self.deviant_policy == "peaked":
            if self.peaked_concentration is None or self.peaked_concentration <= 2.0:
                raise ValidationError(
                    "peaked policy needs concentration > 2", ("peaked_concentration",)
                )
        if self.objective_tol <= 0:
            raise ValidationError("objective tolerance must be positive", ("objective_tol",))
        if self.max_iterations <= 0:
            raise ValidationError("max iterations must be positive", ("max_iterations",))

    def to_dict(self) -> dict:
        return {
            "deviant_policy": self.deviant_policy,
            "peaked_concentration": self.peaked_concentration,
            "objective_tol": self.objective_tol,
            "max_iterations": self.max_iterations,
            "histogram_bin_variance": self.histogram_bin_variance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitConfig":
        return cls(**{k: d[k] for k in d if k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class FitResult:
    """A fitted Beta plus any warning flags raised along the way."""

    params: BetaParams
    flags: tuple = ()

    @property
    def flagged(self) -> bool:
        return bool(self.flags)


def _deviant_fit(cfg: FitConfig, target_mode: float, extra_flags: tuple = ()) -> FitResult:
    flags = (FLAG_DEVIANT,) + extra_flags
    if cfg.deviant_policy == "uniform":
        return FitResult(BetaParams(1.0, 1.0), flags)
    c = cfg.peaked_concentration
    m = min(1.0, max(0.0, target_mode))
    return FitResult(BetaParams(1.0 + m * (c - 2.0), 1.0 + (1.0 - m) * (c - 2.0)), flags)


def _moments_to_beta(mean: float, variance: float) -> Optional[BetaParams]:
    """Invert mean/variance to Beta(alpha, beta); None when out of range."""
    if not (0.0 < mean < 1.0) or variance <= 0.0:
        return None
    scale = mean * (1.0 - mean) / variance - 1.0
    if scale <= 0.0:
        return None
    alpha = mean * scale
    beta = (1.0 - mean) * scale
    if alpha <= 0.0 or beta <= 0.0:
        return None
    return BetaParams(alpha, beta)


def fit_from_samples(r: SampleSetResponse, cfg: FitConfig) -> FitResult:
    """Method-of-Moments fit from confidence-weighted samples.

    Confidences are normalized to weights; the weighted mean and weighted
    population variance are matched exactly by the returned Beta whenever the
    moment solution is admissible. Degenerate responses (all confidence zero,
    zero variance, or moments outside the Beta family) fall back to the
    configured deviant policy.
    """
    total_conf = sum(r.confidences)
    if total_conf == 0:
        fallback = sum(r.samples) / len(r.samples)
        return _deviant_fit(cfg, fallback)
    if all(x == r.samples[0] for x in r.samples):
        # identical samples have zero variance by definition, but the weighted
        # mean can round an ulp away from them, leaving variance as dust that
        # would invert to an astronomically concentrated Beta
        return _deviant_fit(cfg, r.samples[0])
    weights = [c / total_conf for c in r.confidences]
    mean = sum(w * x for w, x in zip(weights, r.samples))
    variance = sum(w * (x - mean) ** 2 for w, x in zip(weights, r.samples))
    if variance == 0.0:
        return _deviant_fit(cfg, mean)
    fitted = _moments_to_beta(mean, variance)
    if fitted is None:
        return _deviant_fit(cfg, mean, (FLAG_INVALID_MOMENTS,))
    return FitResult(fitted)


def bin_midpoint(index: int) -> float:
    """Midpoint of histogram bin ``index`` (bin 0 is [0%, 5%))."""
    if not (0 <= index < HISTOGRAM_BINS):
        raise DomainError(f"bin index {index} outside [0, {HISTOGRAM_BINS})")
    return (index + 0.5) * BIN_WIDTH


def fit_from_histogram(r: HistogramResponse, cfg: FitConfig) -> FitResult:
    """Method-of-Moments fit treating each ball as a sample at its bin midpoint.

    With ``histogram_bin_variance`` on (the default) the uniform within-bin
    variance (bin width squared over 12) is added before inverting the
    moments, so a single-bin response still carries the information that the
    ball positions are only known to bin resolution.
    """
    n = HISTOGRAM_BALLS
    occupied = [i for i, c in enumerate(r.bin_counts) if c]
    if len(occupied) == 1:
        # single-bin case taken exactly; the weighted loop can drift an ulp
        # off the midpoint and turn the zero variance into dust
        mean = bin_midpoint(occupied[0])
        variance = 0.0
    else:
        mean = sum(c * bin_midpoint(i) for i, c in enumerate(r.bin_counts)) / n
        variance = sum(c * (bin_midpoint(i) - mean) ** 2 for i, c in enumerate(r.bin_counts)) / n
    if cfg.histogram_bin_variance:
        variance += WITHIN_BIN_VARIANCE
    if variance == 0.0:
        return _deviant_fit(cfg, mean)
    fitted = _moments_to_beta(mean, variance)
    if fitted is None:
        return _deviant_fit(cfg, mean, (FLAG_INVALID_MOMENTS,))
    return FitResult(fitted)


def interval_for_mode(m: float) -> Interval:
    """The +/-25% band [0.75 m, 1.25 m] around a mode, clipped to [0, 1]."""
    m = float(m)
    if not (0.0 < m < 1.0):
        raise DomainError(f"mode must lie in (0, 1), got {m}")
    return Interval(max(0.0, 0.75 * m), min(1.0, 1.25 * m))


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


# Concentration ladder for the five fixed multistart points.
_START_CONCENTRATIONS = (6.0, 20.0, 100.0, 500.0, 2500.0)
# exp() guard: concentrations beyond ~1e9 are numerically meaningless for the
# interval probability and only arise for degenerate subjective probabilities.
_MAX_LOG_EXCESS = 21.0
# Remaining restarts are skipped once a fit reaches this level; it is the
# practical floor set by the rounding noise of the interval probability.
_POLISH_TARGET = 1e-26


def _theta_mode(z: float) -> float:
    m = _sigmoid(min(40.0, max(-40.0, z)))
    return min(1.0 - 1e-12, max(1e-12, m))


def _params_from_theta(theta: Sequence[float]) -> BetaParams:
    m = _theta_mode(theta[0])
    excess = math.exp(min(_MAX_LOG_EXCESS, theta[1]))
    return BetaParams(1.0 + m * excess, 1.0 + (1.0 - m) * excess)


def _bisect_band_concentration(
    theta0_mode: float, band: Interval, sp: float
) -> float | None:
    """Log-concentration whose band probability matches sp at a fixed mode.

    Along theta = (theta0_mode, t) the fitted mode equals the target exactly,
    so the objective reduces to the band-probability mismatch, which rises
    monotonically with concentration. The simplex search cannot track it once
    the probability is within a few ulps of 1: the objective turns into a flat
    plateau wider than the solution basin. Bisection has no such limit.
    Returns None when no sign change brackets a root (sp below the
    uniform-distribution band probability, an inconsistent response).
    """

    def gap(t: float) -> float:
        params = _params_from_theta((theta0_mode, t))
        return (beta_cdf(band.hi, params) - beta_cdf(band.lo, params)) - sp

    lo, hi = -30.0, _MAX_LOG_EXCESS
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if (g_lo > 0.0) == (g_hi > 0.0):
        return None
    best_t, best_gap = (lo, abs(g_lo)) if abs(g_lo) < abs(g_hi) else (hi, abs(g_hi))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        g_mid = gap(mid)
        if abs(g_mid) < best_gap:
            best_t, best_gap = mid, abs(g_mid)
        if g_mid == 0.0:
            break
        if (g_mid > 0.0) == (g_hi > 0.0):
            hi, g_hi = mid, g_mid
        else:
            lo, g_lo = mid, g_mid
    return best_t


def fit_from_mode_interval(r: ModeIntervalResponse, cfg: FitConfig) -> FitResult:
    """Fit by minimizing squared error in (mode, interval probability).

    The search runs over (logit(mode), log(concentration - 2)), mapped back to
    alpha, beta > 1 so the interior mode always exists, with five fixed
    concentration multistarts. If no restart reaches ``cfg.objective_tol`` the
    best fit is returned carrying a warning flag.
    """
    band = interval_for_mode(r.mode)
    sp = r.subjective_probability

    def objective(theta: Sequence[float]) -> float:
        params = _params_from_theta(theta)
        # (alpha-1)/(alpha+beta-2) reduces to the clamped sigmoid of theta[0];
        # recovering it from the params instead turns into 0/0 once the
        # concentration excess rounds away inside alpha and beta
        fitted_mode = _theta_mode(theta[0])
        prob = beta_cdf(band.hi, params) - beta_cdf(band.lo, params)
        return (fitted_mode - r.mode) ** 2 + (prob - sp) ** 2

    theta0_mode = _logit(min(1.0 - 1e-9, max(1e-9, r.mode)))
    best = None
    for conc in _START_CONCENTRATIONS:
        # Each restart runs to simplex collapse; cfg.objective_tol only
        # decides flagging. High-concentration targets leave the objective
        # extremely flat in log-concentration, so the collapse tolerances
        # must sit near the numerical noise floor.
        res = nelder_mead(
            objective,
            (theta0_mode, math.log(conc - 2.0)),
            step=0.75,
            fun_tol=1e-28,
            x_tol=1e-9,
            max_iter=cfg.max_iterations,
            target=_POLISH_TARGET,
        )
        if best is None or res.fun < best.fun:
            best = res
        if best.fun <= _POLISH_TARGET:
            break

    best_theta = tuple(best.x)
    best_fun = best.fun
    if 0.0 < sp < 1.0:
        # The simplex can report convergence on a plateau where the band
        # probability rounds to 1.0, indistinguishable by objective value from
        # a true optimum. The bisection stage is immune, so it always runs;
        # ties go to it because its mode term is exactly zero.
        t1 = _bisect_band_concentration(theta0_mode, band, sp)
        if t1 is not None:
            theta = (theta0_mode, t1)
            fun = objective(theta)
            polish = nelder_mead(
                objective,
                theta,
                step=0.005,
                fun_tol=1e-30,
                x_tol=1e-12,
                max_iter=cfg.max_iterations,
            )
            if polish.fun < fun:
                theta, fun = tuple(polish.x), polish.fun
            if fun <= best_fun:
                best_theta, best_fun = theta, fun

    flags = []
    # sp == 0 carries no band information at all; sp within a few ulps of 1
    # leaves fewer distinct band probabilities than the cdf can resolve, so
    # the concentration is unidentifiable either way.
    if sp <= 0.0 or 1.0 - sp < 1e-15:
        flags.append(FLAG_DEGENERATE_SP)
    if best_fun > cfg.objective_tol:
        flags.append(FLAG_FIT_WARNING)
    return FitResult(_params_from_theta(best_theta), tuple(flags))
