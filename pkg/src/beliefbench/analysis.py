"""Cohort-level statistics over fitted participant records.

Log KLD summaries (individual and aggregate), percentile-bootstrap confidence
intervals, first-n sample sensitivity, and the Bayesian linear regression of
log KLD on design covariates. Zero-KLD records surface as a -inf sentinel and
are excluded from means with an explicit count, since log(0) has no value to
average.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .bayes import (
    ObservedData,
    WeightingClass,
    aggregate,
    classify_weighting,
    normative_update,
    perceived_data,
    residuals,
)
from .betadist import BetaParams, beta_kld
from .errors import (
    EmptyInputError,
    MissingFitError,
    NoInteriorModeError,
    ValidationError,
)
from .fitting import FitConfig, SampleSetResponse
from .records import ParticipantRecord, fit_belief

__all__ = [
    "BootstrapSpec",
    "CoefficientSummary",
    "LogKldSummary",
    "RegressionResult",
    "RegressionSpec",
    "aggregate_log_kld",
    "bootstrap_aggregate_ci",
    "build_analysis_report",
    "first_n_analysis",
    "impute_missing_priors",
    "individual_log_klds",
    "regress_log_kld",
    "report_to_json",
]

NEG_INF = float("-inf")


def _require_fits(records: Sequence[ParticipantRecord]) -> None:
    for r in records:
        if r.prior_fit is None or r.posterior_fit is None:
            raise MissingFitError(f"record {r.id!r} lacks prior_fit or posterior_fit")


def impute_missing_priors(
    records: Sequence[ParticipantRecord],
) -> list[ParticipantRecord]:
    """Fill prior fits for no-elicitation records from their dataset's cohort.

    The imputed prior is the aggregate of elicited prior fits over records
    sharing the dataset. Records from datasets with no elicited priors are
    left untouched (they will be rejected downstream if used).
    """
    by_dataset: dict = {}
    for r in records:
        if r.prior_fit is not None:
            by_dataset.setdefault(r.dataset, []).append(r.prior_fit)
    out = []
    for r in records:
        if r.prior_fit is None and r.dataset in by_dataset:
            out.append(replace(r, prior_fit=aggregate(by_dataset[r.dataset])))
        else:
            out.append(r)
    return out


@dataclass(frozen=True)
class LogKldSummary:
    """Per-record natural-log KLDs with the finite-value summary."""

    values: tuple  # one per record, -inf sentinel where KLD == 0
    mean: Optional[float]
    sd: Optional[float]
    zero_kld_count: int

    @property
    def finite_count(self) -> int:
        return len(self.values) - self.zero_kld_count


def _log_kld(participant: BetaParams, normative: BetaParams) -> float:
    kld = beta_kld(participant, normative)
    return NEG_INF if kld == 0.0 else math.log(kld)


def individual_log_klds(
    records: Sequence[ParticipantRecord], data: ObservedData
) -> LogKldSummary:
    """ln D_KL(posterior_fit || normative posterior) per record, plus summary."""
    _require_fits(records)
    values = tuple(
        _log_kld(r.posterior_fit, normative_update(r.prior_fit, data)) for r in records
    )
    finite = [v for v in values if v != NEG_INF]
    mean = math.fsum(finite) / len(finite) if finite else None
    sd = None
    if len(finite) >= 2:
        m = mean
        sd = math.sqrt(math.fsum((v - m) ** 2 for v in finite) / (len(finite) - 1))
    return LogKldSummary(values, mean, sd, len(values) - len(finite))


def aggregate_log_kld(records: Sequence[ParticipantRecord], data: ObservedData) -> float:
    """ln D_KL(aggregate posterior || update(aggregate prior, data)); may be -inf."""
    if len(records) == 0:
        raise EmptyInputError("aggregate_log_kld requires at least one record")
    _require_fits(records)
    agg_posterior = aggregate([r.posterior_fit for r in records])
    agg_prior = aggregate([r.prior_fit for r in records])
    return _log_kld(agg_posterior, normative_update(agg_prior, data))


@dataclass(frozen=True)
class BootstrapSpec:
    resample_size: int = 100
    repetitions: int = 2000
    level: float = 0.95
    seed: int = 0

    def __post_init__(self) -> None:
        if self.repetitions <= 0 or self.resample_size <= 0:
            raise ValidationError("repetitions and resample_size must be positive")
        if not (0.0 < self.level < 1.0):
            raise ValidationError(f"level must be in (0,1), got {self.level}")

    def to_dict(self) -> dict:
        return {
            "resample_size": self.resample_size,
            "repetitions": self.repetitions,
            "level": self.level,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d) -> "BootstrapSpec":
        return cls(
            resample_size=d.get("resample_size", 100),
            repetitions=d.get("repetitions", 2000),
            level=d.get("level", 0.95),
            seed=d.get("seed", 0),
        )


def bootstrap_aggregate_ci(
    records: Sequence[ParticipantRecord], data: ObservedData, spec: BootstrapSpec
) -> tuple[float, float]:
    """Percentile interval of aggregate log KLD over fitted-record resamples.

    Each replicate draws its indices from an independent stream derived from
    (seed, replicate index), so results do not depend on execution order.
    """
    if len(records) == 0:
        raise EmptyInputError("bootstrap requires at least one record")
    _require_fits(records)
    priors = np.array([(r.prior_fit.alpha, r.prior_fit.beta) for r in records])
    posteriors = np.array([(r.posterior_fit.alpha, r.posterior_fit.beta) for r in records])
    n = len(records)
    values = np.empty(spec.repetitions)
    for rep in range(spec.repetitions):
        rng = np.random.default_rng([spec.seed, rep])
        idx = rng.integers(0, n, size=spec.resample_size)
        pa, pb = priors[idx].mean(axis=0)
        qa, qb = posteriors[idx].mean(axis=0)
        values[rep] = _log_kld(
            BetaParams(qa, qb), normative_update(BetaParams(pa, pb), data)
        )
    tail = (1.0 - spec.level) / 2.0
    values.sort()
    return _interp_quantile(values, tail), _interp_quantile(values, 1.0 - tail)


def _interp_quantile(sorted_vals: np.ndarray, q: float) -> float:
    """Linear-interpolation quantile that tolerates -inf entries.

    Replicates of an all-normative cohort are exactly -inf; interpolating
    between -inf and a finite value must stay -inf instead of NaN.
    """
    pos = q * (len(sorted_vals) - 1)
    low = math.floor(pos)
    high = math.ceil(pos)
    a, b = float(sorted_vals[low]), float(sorted_vals[high])
    if a == b or a == NEG_INF:
        return a
    return a + (pos - low) * (b - a)


def first_n_analysis(
    records: Sequence[ParticipantRecord],
    data: ObservedData,
    cfg: FitConfig,
    n_values: Sequence[int] = (3, 4, 5),
) -> dict[int, float]:
    """Aggregate log KLD when only the first n samples of each response count.

    Rejects records whose raw responses are not sample sets, since truncation
    is meaningful only there.
    """
    if len(records) == 0:
        raise EmptyInputError("first_n_analysis requires at least one record")
    for r in records:
        for side, resp in (("prior", r.prior_response), ("posterior", r.posterior_response)):
            if not isinstance(resp, SampleSetResponse):
                raise ValidationError(
                    f"record {r.id!r} {side} response carries no raw samples"
                )
    out = {}
    for n in n_values:
        refitted = []
        for r in records:
            truncated = replace(
                r,
                prior_fit=fit_belief(_first_n(r.prior_response, n), cfg).params,
                posterior_fit=fit_belief(_first_n(r.posterior_response, n), cfg).params,
            )
            refitted.append(truncated)
        out[int(n)] = aggregate_log_kld(refitted, data)
    return out


def _first_n(resp: SampleSetResponse, n: int) -> SampleSetResponse:
    k = min(n, len(resp.samples))
    return SampleSetResponse(resp.samples[:k], resp.confidences[:k])


@dataclass(frozen=True)
class RegressionSpec:
    chains: int = 4
    iterations: int = 2000
    warmup: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.chains < 4:
            raise ValidationError("at least 4 chains required")
        if not (self.iterations > self.warmup > 0):
            raise ValidationError("need iterations > warmup > 0")

    def to_dict(self) -> dict:
        return {
            "chains": self.chains,
            "iterations": self.iterations,
            "warmup": self.warmup,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d) -> "RegressionSpec":
        return cls(
            chains=d.get("chains", 4),
            iterations=d.get("iterations", 2000),
            warmup=d.get("warmup", 1000),
            seed=d.get("seed", 0),
        )


COEFFICIENT_NAMES = ("intercept", "uncertainty", "elicitation", "dataset", "centered_time")


@dataclass(frozen=True)
class CoefficientSummary:
    mean: float
    lo: float
    hi: float
    rhat: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "lo": self.lo, "hi": self.hi, "rhat": self.rhat}


@dataclass(frozen=True)
class RegressionResult:
    coefficients: dict  # name -> CoefficientSummary, includes "sigma"
    flags: tuple
    draws_per_chain: int
    chains: int

    def to_dict(self) -> dict:
        return {
            "coefficients": {k: v.to_dict() for k, v in self.coefficients.items()},
            "flags": sorted(self.flags),
            "draws_per_chain": self.draws_per_chain,
            "chains": self.chains,
        }


def _log_posterior(theta: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    beta = theta[:-1]
    sigma = theta[-1]
    if sigma <= 0.0 or not np.isfinite(sigma):
        return NEG_INF
    resid = y - x @ beta
    n = y.shape[0]
    loglik = -n * math.log(sigma) - float(resid @ resid) / (2.0 * sigma * sigma)
    logprior = -0.5 * float(beta @ beta)  # Normal(0,1) on each coefficient
    logprior += -math.log1p(sigma * sigma)  # half-Cauchy(0,1), constants dropped
    return loglik + logprior


_TARGET_ACCEPTANCE = 0.3


def _run_chain(
    x: np.ndarray, y: np.ndarray, spec: RegressionSpec, chain: int
) -> np.ndarray:
    rng = np.random.default_rng([spec.seed, chain])
    dim = x.shape[1] + 1
    theta = np.zeros(dim)
    theta[-1] = float(np.std(y, ddof=1)) or 1.0
    scales = np.full(dim, 0.1)
    logp = _log_posterior(theta, x, y)
    kept = np.empty((spec.iterations - spec.warmup, dim))
    for it in range(spec.iterations):
        for j in range(dim):
            proposal = theta.copy()
            proposal[j] += scales[j] * rng.standard_normal()
            logp_new = _log_posterior(proposal, x, y)
            accept = math.log(rng.random()) < logp_new - logp
            if accept:
                theta = proposal
                logp = logp_new
            if it < spec.warmup:
                # Robbins-Monro step toward the target acceptance rate,
                # frozen after warmup so the kept draws are valid MCMC.
                adapt = (1.0 if accept else 0.0) - _TARGET_ACCEPTANCE
                scales[j] *= math.exp(adapt / math.sqrt(it + 1.0))
        if it >= spec.warmup:
            kept[it - spec.warmup] = theta
    return kept


def _split_rhat(chains: np.ndarray) -> float:
    """Split-R-hat over an array shaped (chains, draws)."""
    m, n = chains.shape
    half = n // 2
    halves = np.concatenate([chains[:, :half], chains[:, half : 2 * half]], axis=0)
    means = halves.mean(axis=1)
    variances = halves.var(axis=1, ddof=1)
    w = variances.mean()
    b = half * means.var(ddof=1)
    if w == 0.0:
        return 1.0
    var_plus = (half - 1) / half * w + b / half
    return math.sqrt(var_plus / w)


def regress_log_kld(
    rows: Sequence[Sequence[float]], spec: RegressionSpec
) -> RegressionResult:
    """Bayesian linear regression of log KLD on the design covariates.

    Rows are (log_kld, uncertainty 0/1, elicitation 0/1, dataset 0/1, time).
    The time covariate is mean-centered here. Model: y ~ Normal(X beta, sigma)
    with Normal(0,1) coefficient priors and a half-Cauchy(0,1) scale, sampled
    by component-wise adaptive random-walk Metropolis on independent chains.
    """
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 5:
        raise ValidationError("rows must be (log_kld, uncertainty, elicitation, dataset, time)")
    if not np.isfinite(arr).all():
        raise ValidationError("regression rows must be finite")
    y = arr[:, 0]
    x = np.column_stack(
        [np.ones(len(arr)), arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4] - arr[:, 4].mean()]
    )
    flags = []
    for j, name in enumerate(COEFFICIENT_NAMES):
        if name != "intercept" and np.ptp(x[:, j]) == 0.0:
            flags.append(f"degenerate-design:{name}")

    draws = np.stack([_run_chain(x, y, spec, chain) for chain in range(spec.chains)])
    names = COEFFICIENT_NAMES + ("sigma",)
    coefficients = {}
    worst_rhat = 0.0
    for j, name in enumerate(names):
        pooled = draws[:, :, j].reshape(-1)
        rhat = _split_rhat(draws[:, :, j])
        worst_rhat = max(worst_rhat, rhat)
        lo, hi = np.quantile(pooled, [0.025, 0.975])
        coefficients[name] = CoefficientSummary(float(pooled.mean()), float(lo), float(hi), rhat)
    if worst_rhat > 1.05:
        flags.append("rhat-exceeded")
    return RegressionResult(
        coefficients,
        tuple(flags),
        draws_per_chain=spec.iterations - spec.warmup,
        chains=spec.chains,
    )


def _json_log_kld(value: float) -> Optional[float]:
    # -inf has no JSON representation; null plus the zero-KLD count carries it.
    return None if value == NEG_INF else value


def _record_entry(
    r: ParticipantRecord, data: ObservedData, log_kld: float
) -> dict:
    normative = normative_update(r.prior_fit, data)
    res_mean, res_sd = residuals(r.posterior_fit, normative)
    perceived = perceived_data(r.prior_fit, r.posterior_fit)
    try:
        weighting = classify_weighting(r.prior_fit, data, r.posterior_fit).value
    except NoInteriorModeError:
        weighting = None
    return {
        "id": r.id,
        "condition": r.condition.to_dict(),
        "dataset": r.dataset.value,
        "log_kld": _json_log_kld(log_kld),
        "weighting_class": weighting,
        "residual_mean": res_mean,
        "residual_sd": res_sd,
        "perceived": perceived.to_dict(),
        "flags": sorted(r.flags),
        "attention_pass": r.attention_pass,
    }


def _is_two_by_two(records: Sequence[ParticipantRecord]) -> bool:
    arms = {(r.condition.uncertainty, r.condition.elicitation) for r in records}
    return len({u for u, _ in arms}) == 2 and len({e for _, e in arms}) == 2


def _normalize_data_map(records, data) -> dict:
    """Per-dataset ObservedData for every dataset present in the records."""
    present = []
    for r in records:
        if r.dataset not in present:
            present.append(r.dataset)
    if isinstance(data, ObservedData):
        return {ds: data for ds in present}
    missing = [ds.value for ds in present if ds not in data]
    if missing:
        raise ValidationError(f"no observed data supplied for datasets: {missing}")
    return {ds: data[ds] for ds in present}


def build_analysis_report(
    records: Sequence[ParticipantRecord],
    data,
    bootstrap_spec: BootstrapSpec,
    regression_spec: Optional[RegressionSpec] = None,
    fit_cfg: Optional[FitConfig] = None,
    filters: Optional[dict] = None,
    first_n: bool = False,
) -> dict:
    """Assemble the full analysis report as a JSON-serializable dict.

    ``data`` is a single ObservedData applied to every record, or a mapping
    from Dataset to ObservedData for multi-dataset cohorts. Per-record
    statistics use the record's own dataset; aggregate-level statistics and
    the bootstrap are grouped per dataset; the regression pools records
    across datasets so the dataset covariate can vary. Statistics that cannot
    be computed on the given records appear as {"insufficient_data": reason}
    markers rather than failing the whole report. No-elicitation records get
    imputed priors first.
    """
    report = {
        "schema": "beliefbench.analysis-report.v1",
        "filters": filters or {},
        "record_count": len(records),
    }
    records = impute_missing_priors(records)
    usable = [r for r in records if r.prior_fit is not None and r.posterior_fit is not None]
    data_map = _normalize_data_map(usable, data)
    report["datasets"] = {ds.value: d.to_dict() for ds, d in data_map.items()}
    report["usable_record_count"] = len(usable)
    if not usable:
        empty = {"insufficient_data": "no records with both fits"}
        report.update(
            records=[], individual=dict(empty), aggregate=dict(empty),
            bootstrap=dict(empty), weighting_counts={}, regression=dict(empty),
            first_n=dict(empty) if first_n else None,
        )
        return report

    values = [
        _log_kld(r.posterior_fit, normative_update(r.prior_fit, data_map[r.dataset]))
        for r in usable
    ]
    finite = [v for v in values if v != NEG_INF]
    mean = math.fsum(finite) / len(finite) if finite else None
    sd = None
    if len(finite) >= 2:
        sd = math.sqrt(math.fsum((v - mean) ** 2 for v in finite) / (len(finite) - 1))
    report["records"] = [
        _record_entry(r, data_map[r.dataset], v) for r, v in zip(usable, values)
    ]
    report["individual"] = {
        "mean_log_kld": mean,
        "sd_log_kld": sd,
        "zero_kld_count": len(values) - len(finite),
        "finite_count": len(finite),
    }
    counts = {w.value: 0 for w in WeightingClass}
    for entry in report["records"]:
        if entry["weighting_class"] is not None:
            counts[entry["weighting_class"]] += 1
    report["weighting_counts"] = counts

    groups = {ds: [r for r in usable if r.dataset is ds] for ds in data_map}
    agg_block = {}
    boot_block = {}
    for ds, group in groups.items():
        d = data_map[ds]
        agg_prior = aggregate([r.prior_fit for r in group])
        agg_posterior = aggregate([r.posterior_fit for r in group])
        agg_normative = normative_update(agg_prior, d)
        agg_block[ds.value] = {
            "log_kld": _json_log_kld(aggregate_log_kld(group, d)),
            "kld": beta_kld(agg_posterior, agg_normative),
            "prior": agg_prior.to_dict(),
            "posterior": agg_posterior.to_dict(),
            "normative_posterior": agg_normative.to_dict(),
        }
        lo, hi = bootstrap_aggregate_ci(group, d, bootstrap_spec)
        boot_block[ds.value] = {"lo": _json_log_kld(lo), "hi": _json_log_kld(hi)}
    report["aggregate"] = {"per_dataset": agg_block}
    report["bootstrap"] = {"per_dataset": boot_block, "spec": bootstrap_spec.to_dict()}

    if not first_n:
        report["first_n"] = None
    elif fit_cfg is None:
        report["first_n"] = {"insufficient_data": "no fit configuration supplied"}
    else:
        per_ds = {}
        for ds, group in groups.items():
            sampled = [
                r for r in group
                if isinstance(r.prior_response, SampleSetResponse)
                and isinstance(r.posterior_response, SampleSetResponse)
            ]
            if sampled:
                by_n = first_n_analysis(sampled, data_map[ds], fit_cfg)
                per_ds[ds.value] = {str(n): _json_log_kld(v) for n, v in by_n.items()}
            else:
                per_ds[ds.value] = {
                    "insufficient_data": "no records with raw sample responses"
                }
        report["first_n"] = {"per_dataset": per_ds}

    if regression_spec is None:
        report["regression"] = {"insufficient_data": "regression not requested"}
    elif not _is_two_by_two(usable):
        report["regression"] = {
            "insufficient_data": "records do not span the 2x2 uncertainty x elicitation design"
        }
    else:
        rows = [
            (
                v,
                1.0 if r.condition.uncertainty.value == "Uncertainty" else 0.0,
                1.0 if r.condition.elicitation.value == "Elicitation" else 0.0,
                1.0 if r.dataset.value.startswith("Elderly") else 0.0,
                r.view_time,
            )
            for r, v in zip(usable, values)
            if v != NEG_INF
        ]
        if len(rows) < 10:
            report["regression"] = {
                "insufficient_data": "fewer than 10 records with finite log KLD"
            }
        else:
            report["regression"] = regress_log_kld(rows, regression_spec).to_dict()
    return report


def report_to_json(report: dict) -> str:
    """Canonical serialization; equal reports are byte-identical."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
