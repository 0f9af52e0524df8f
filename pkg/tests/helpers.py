"""Shared builders for test fixtures: records, cohorts, study configs."""

from __future__ import annotations

import math

from beliefbench import (
    BetaParams,
    Condition,
    Dataset,
    ElicitationArm,
    FitConfig,
    ObservedData,
    ParticipantRecord,
    ResponseFormat,
    SampleSetResponse,
    UncertaintyArm,
    fill_fits,
    normative_update,
)

TECH_SMALL_DATA = ObservedData(27, 131)
PAPER_PRIOR = BetaParams(10.79, 18.99)

SAMPLE_CONDITION = Condition(
    ResponseFormat.GRAPHICAL_SAMPLE,
    UncertaintyArm.NO_UNCERTAINTY,
    ElicitationArm.ELICITATION,
)


def three_point_samples(params: BetaParams) -> SampleSetResponse:
    """Three equal-confidence samples matching the first two moments exactly.

    [m-s, m, m+s] has mean m and population variance 2s^2/3, so s = sqrt(1.5v)
    reproduces the distribution's variance and Method of Moments inverts it.
    """
    m = params.alpha / (params.alpha + params.beta)
    total = params.alpha + params.beta
    v = params.alpha * params.beta / (total * total * (total + 1.0))
    s = math.sqrt(1.5 * v)
    if not (0.0 <= m - s and m + s <= 1.0):
        raise ValueError(f"pattern for {params} leaves [0, 1]")
    return SampleSetResponse((m - s, m, m + s), (100, 100, 100))


def sample_record(
    record_id: str,
    prior_response: SampleSetResponse,
    posterior_response: SampleSetResponse,
    dataset: Dataset = Dataset.TECH_SMALL,
    view_time: float = 30.0,
    fitted: bool = True,
) -> ParticipantRecord:
    record = ParticipantRecord(
        id=record_id,
        dataset=dataset,
        condition=SAMPLE_CONDITION,
        prior_response=prior_response,
        posterior_response=posterior_response,
        view_time=view_time,
        attention_pass=True,
    )
    return fill_fits(record, FitConfig()) if fitted else record


def exact_three_point_record(
    record_id: str,
    prior: BetaParams,
    data: ObservedData = TECH_SMALL_DATA,
    dataset: Dataset = Dataset.TECH_SMALL,
) -> ParticipantRecord:
    """A record whose fits recover the prior and its normative posterior."""
    return sample_record(
        record_id,
        three_point_samples(prior),
        three_point_samples(normative_update(prior, data)),
        dataset=dataset,
    )


def study_config_dict(
    study_id: str = "study",
    datasets: list | None = None,
    conditions: list | None = None,
    **extra,
) -> dict:
    config = {
        "study_id": study_id,
        "datasets": datasets
        or [{"name": "TechSmall", "successes": 27, "failures": 131}],
        "conditions": conditions
        or [
            {
                "format": "GraphicalSample",
                "uncertainty": "NoUncertainty",
                "elicitation": "Elicitation",
            }
        ],
    }
    config.update(extra)
    return config
