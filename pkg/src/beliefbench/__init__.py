"""Workbench for belief-update studies around data presentations.

Participants report beliefs about a proportion before and after seeing data;
each response is fitted to a Beta distribution, compared against the
conjugate update of the fitted prior, and summarized at the individual and
aggregate level. Submodules: betadist (distribution math), fitting (response
formats and their fitters), bayes (normative updates and deviation measures),
analysis (cohort statistics), simulate (synthetic agents), service (HTTP
study runner), cli (command-line workbench).
"""

from .analysis import (
    BootstrapSpec,
    LogKldSummary,
    RegressionResult,
    RegressionSpec,
    aggregate_log_kld,
    bootstrap_aggregate_ci,
    build_analysis_report,
    first_n_analysis,
    individual_log_klds,
    regress_log_kld,
    report_to_json,
)
from .bayes import (
    ObservedData,
    PerceivedData,
    WeightingClass,
    aggregate,
    classify_weighting,
    normative_update,
    perceived_data,
    residuals,
)
from .betadist import BetaParams, beta_kld, beta_mean, beta_mode, beta_sd
from .errors import (
    BeliefBenchError,
    DomainError,
    EmptyInputError,
    MissingFitError,
    NoInteriorModeError,
    ValidationError,
)
from .fitting import (
    FitConfig,
    FitResult,
    HistogramResponse,
    ModeIntervalResponse,
    SampleSetResponse,
    fit_from_histogram,
    fit_from_mode_interval,
    fit_from_samples,
)
from .records import (
    AttentionAnswer,
    Condition,
    Dataset,
    ElicitationArm,
    ParticipantRecord,
    ResponseFormat,
    UncertaintyArm,
    fill_fits,
    fit_belief,
    records_from_csv,
    records_from_jsonl,
    records_to_csv,
    records_to_jsonl,
)
from .simulate import AgentSpec, HopsSequence, generate_hops, simulate_agent, simulate_cohort

__version__ = "0.1.0"

__all__ = [
    "AgentSpec",
    "AttentionAnswer",
    "BeliefBenchError",
    "BetaParams",
    "BootstrapSpec",
    "Condition",
    "Dataset",
    "DomainError",
    "ElicitationArm",
    "EmptyInputError",
    "FitConfig",
    "FitResult",
    "HistogramResponse",
    "HopsSequence",
    "LogKldSummary",
    "MissingFitError",
    "ModeIntervalResponse",
    "NoInteriorModeError",
    "ObservedData",
    "ParticipantRecord",
    "PerceivedData",
    "RegressionResult",
    "RegressionSpec",
    "ResponseFormat",
    "SampleSetResponse",
    "UncertaintyArm",
    "ValidationError",
    "WeightingClass",
    "aggregate",
    "aggregate_log_kld",
    "beta_kld",
    "beta_mean",
    "beta_mode",
    "beta_sd",
    "bootstrap_aggregate_ci",
    "build_analysis_report",
    "classify_weighting",
    "fill_fits",
    "first_n_analysis",
    "fit_belief",
    "fit_from_histogram",
    "fit_from_mode_interval",
    "fit_from_samples",
    "generate_hops",
    "individual_log_klds",
    "normative_update",
    "perceived_data",
    "records_from_csv",
    "records_from_jsonl",
    "records_to_csv",
    "records_to_jsonl",
    "regress_log_kld",
    "report_to_json",
    "residuals",
    "simulate_agent",
    "simulate_cohort",
    "__version__",
]
