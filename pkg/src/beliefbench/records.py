"""Participant records: condition enums, the raw-response union, serialization.

A record is one participant's pass through the study: assignment, raw prior
and posterior responses, fitted Betas once the pipeline has run, timing, and
the attention answer. JSON-lines is the primary interchange format; CSV embeds
the nested responses as JSON strings so the round trip stays lossless.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Optional, Sequence, Union

from .bayes import ObservedData
from .betadist import BetaParams
from .errors import ValidationError
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

__all__ = [
    "AttentionAnswer",
    "Condition",
    "Dataset",
    "ElicitationArm",
    "ElicitedBelief",
    "ParticipantRecord",
    "ResponseFormat",
    "UncertaintyArm",
    "attention_range_for",
    "belief_from_dict",
    "belief_to_dict",
    "fill_fits",
    "fit_belief",
    "payload_kind",
    "records_from_csv",
    "records_from_jsonl",
    "records_to_csv",
    "records_to_jsonl",
]


class Dataset(str, Enum):
    TECH_SMALL = "TechSmall"
    ELDERLY_LARGE = "ElderlyLarge"
    TECH_LARGE = "TechLarge"
    ELDERLY_SMALL = "ElderlySmall"


class ResponseFormat(str, Enum):
    GRAPHICAL_SAMPLE = "GraphicalSample"
    TEXT_SAMPLE = "TextSample"
    MODE_INTERVAL = "ModeInterval"
    HISTOGRAM = "Histogram"


class UncertaintyArm(str, Enum):
    UNCERTAINTY = "Uncertainty"
    NO_UNCERTAINTY = "NoUncertainty"


class ElicitationArm(str, Enum):
    ELICITATION = "Elicitation"
    NO_ELICITATION = "NoElicitation"


class AttentionAnswer(str, Enum):
    R0_30 = "R0_30"
    R30_60 = "R30_60"
    R60_100 = "R60_100"


def attention_range_for(data: ObservedData) -> AttentionAnswer:
    """The range containing the observed proportion; bands are [0,.3), [.3,.6), [.6,1]."""
    p = data.display_proportion
    if p < 0.30:
        return AttentionAnswer.R0_30
    if p < 0.60:
        return AttentionAnswer.R30_60
    return AttentionAnswer.R60_100


@dataclass(frozen=True)
class Condition:
    """One cell of the format x uncertainty x elicitation design."""

    format: ResponseFormat
    uncertainty: UncertaintyArm = UncertaintyArm.NO_UNCERTAINTY
    elicitation: ElicitationArm = ElicitationArm.ELICITATION

    @property
    def key(self) -> str:
        return f"{self.format.value}|{self.uncertainty.value}|{self.elicitation.value}"

    @classmethod
    def from_key(cls, key: str) -> "Condition":
        parts = key.split("|")
        if len(parts) != 3:
            raise ValidationError(f"condition key must have 3 parts, got {key!r}")
        return cls(ResponseFormat(parts[0]), UncertaintyArm(parts[1]), ElicitationArm(parts[2]))

    def to_dict(self) -> dict:
        return {
            "format": self.format.value,
            "uncertainty": self.uncertainty.value,
            "elicitation": self.elicitation.value,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Condition":
        return cls(
            ResponseFormat(d["format"]),
            UncertaintyArm(d["uncertainty"]),
            ElicitationArm(d["elicitation"]),
        )


ElicitedBelief = Union[SampleSetResponse, ModeIntervalResponse, HistogramResponse]

_BELIEF_KINDS = {
    SampleSetResponse: "samples",
    ModeIntervalResponse: "mode_interval",
    HistogramResponse: "histogram",
}


def payload_kind(fmt: ResponseFormat) -> str:
    """The raw-response kind a given elicitation format produces."""
    if fmt in (ResponseFormat.GRAPHICAL_SAMPLE, ResponseFormat.TEXT_SAMPLE):
        return "samples"
    if fmt is ResponseFormat.MODE_INTERVAL:
        return "mode_interval"
    return "histogram"


def belief_to_dict(belief: ElicitedBelief) -> dict:
    kind = _BELIEF_KINDS[type(belief)]
    if isinstance(belief, SampleSetResponse):
        return {
            "kind": kind,
            "samples": list(belief.samples),
            "confidences": list(belief.confidences),
        }
    if isinstance(belief, ModeIntervalResponse):
        return {
            "kind": kind,
            "mode": belief.mode,
            "subjective_probability": belief.subjective_probability,
        }
    return {"kind": kind, "bin_counts": list(belief.bin_counts)}


def belief_from_dict(d: Mapping) -> ElicitedBelief:
    kind = d.get("kind")
    if kind == "samples":
        return SampleSetResponse(tuple(d["samples"]), tuple(d["confidences"]))
    if kind == "mode_interval":
        return ModeIntervalResponse(d["mode"], d["subjective_probability"])
    if kind == "histogram":
        return HistogramResponse(tuple(d["bin_counts"]))
    raise ValidationError(f"unknown response kind {kind!r}", path=("kind",))


def fit_belief(belief: ElicitedBelief, cfg: FitConfig) -> FitResult:
    """Dispatch a raw response to its fitter."""
    if isinstance(belief, SampleSetResponse):
        return fit_from_samples(belief, cfg)
    if isinstance(belief, ModeIntervalResponse):
        return fit_from_mode_interval(belief, cfg)
    if isinstance(belief, HistogramResponse):
        return fit_from_histogram(belief, cfg)
    raise ValidationError(f"unsupported belief type {type(belief).__name__}")


@dataclass(frozen=True)
class ParticipantRecord:
    id: str
    dataset: Dataset
    condition: Condition
    posterior_response: ElicitedBelief
    prior_response: Optional[ElicitedBelief] = None
    prior_fit: Optional[BetaParams] = None
    posterior_fit: Optional[BetaParams] = None
    flags: tuple = ()
    view_time: float = 0.0
    attention_answer: Optional[AttentionAnswer] = None
    attention_pass: Optional[bool] = None
    simulated: bool = False

    def __post_init__(self) -> None:
        has_prior = self.prior_response is not None
        wants_prior = self.condition.elicitation is ElicitationArm.ELICITATION
        if has_prior != wants_prior:
            raise ValidationError(
                "prior_response must be present exactly when the condition elicits one",
                path=("prior_response",),
            )
        if self.view_time < 0:
            raise ValidationError("view_time must be nonnegative", path=("view_time",))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dataset": self.dataset.value,
            "condition": self.condition.to_dict(),
            "prior_response": belief_to_dict(self.prior_response) if self.prior_response else None,
            "posterior_response": belief_to_dict(self.posterior_response),
            "prior_fit": self.prior_fit.to_dict() if self.prior_fit else None,
            "posterior_fit": self.posterior_fit.to_dict() if self.posterior_fit else None,
            "flags": sorted(self.flags),
            "view_time": self.view_time,
            "attention_answer": self.attention_answer.value if self.attention_answer else None,
            "attention_pass": self.attention_pass,
            "simulated": self.simulated,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ParticipantRecord":
        return cls(
            id=d["id"],
            dataset=Dataset(d["dataset"]),
            condition=Condition.from_dict(d["condition"]),
            prior_response=belief_from_dict(d["prior_response"]) if d.get("prior_response") else None,
            posterior_response=belief_from_dict(d["posterior_response"]),
            prior_fit=BetaParams.from_dict(d["prior_fit"]) if d.get("prior_fit") else None,
            posterior_fit=BetaParams.from_dict(d["posterior_fit"]) if d.get("posterior_fit") else None,
            flags=tuple(d.get("flags", ())),
            view_time=float(d.get("view_time", 0.0)),
            attention_answer=AttentionAnswer(d["attention_answer"]) if d.get("attention_answer") else None,
            attention_pass=d.get("attention_pass"),
            simulated=bool(d.get("simulated", False)),
        )


def fill_fits(record: ParticipantRecord, cfg: FitConfig) -> ParticipantRecord:
    """Fit any missing prior/posterior Betas from the raw responses.

    Existing fits are kept as-is so that replayed or imported records stay
    bit-identical. Flags from new fits are merged, prefixed by side.
    """
    prior_fit = record.prior_fit
    posterior_fit = record.posterior_fit
    flags = list(record.flags)
    if prior_fit is None and record.prior_response is not None:
        res = fit_belief(record.prior_response, cfg)
        prior_fit = res.params
        flags.extend(f"prior:{f}" for f in res.flags)
    if posterior_fit is None:
        res = fit_belief(record.posterior_response, cfg)
        posterior_fit = res.params
        flags.extend(f"posterior:{f}" for f in res.flags)
    return replace(
        record,
        prior_fit=prior_fit,
        posterior_fit=posterior_fit,
        flags=tuple(sorted(set(flags))),
    )


def records_to_jsonl(records: Sequence[ParticipantRecord]) -> str:
    return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in records)


def records_from_jsonl(text: str) -> list[ParticipantRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(ParticipantRecord.from_dict(json.loads(line)))
        except (ValueError, KeyError, TypeError) as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
    return records


# Column order is part of the export contract; append-only changes allowed.
CSV_COLUMNS = (
    "id",
    "dataset",
    "condition_format",
    "condition_uncertainty",
    "condition_elicitation",
    "prior_response",
    "posterior_response",
    "prior_alpha",
    "prior_beta",
    "posterior_alpha",
    "posterior_beta",
    "flags",
    "view_time",
    "attention_answer",
    "attention_pass",
    "simulated",
)


def records_to_csv(records: Sequence[ParticipantRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.id,
                r.dataset.value,
                r.condition.format.value,
                r.condition.uncertainty.value,
                r.condition.elicitation.value,
                json.dumps(belief_to_dict(r.prior_response), sort_keys=True) if r.prior_response else "",
                json.dumps(belief_to_dict(r.posterior_response), sort_keys=True),
                repr(r.prior_fit.alpha) if r.prior_fit else "",
                repr(r.prior_fit.beta) if r.prior_fit else "",
                repr(r.posterior_fit.alpha) if r.posterior_fit else "",
                repr(r.posterior_fit.beta) if r.posterior_fit else "",
                ";".join(sorted(r.flags)),
                repr(r.view_time),
                r.attention_answer.value if r.attention_answer else "",
                "" if r.attention_pass is None else str(r.attention_pass).lower(),
                str(r.simulated).lower(),
            ]
        )
    return out.getvalue()


def records_from_csv(text: str) -> list[ParticipantRecord]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return []
    if tuple(header) != CSV_COLUMNS:
        raise ValidationError(f"unexpected CSV header {header!r}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            cells = dict(zip(CSV_COLUMNS, row))
            prior_fit = (
                BetaParams(float(cells["prior_alpha"]), float(cells["prior_beta"]))
                if cells["prior_alpha"]
                else None
            )
            posterior_fit = (
                BetaParams(float(cells["posterior_alpha"]), float(cells["posterior_beta"]))
                if cells["posterior_alpha"]
                else None
            )
            records.append(
                ParticipantRecord(
                    id=cells["id"],
                    dataset=Dataset(cells["dataset"]),
                    condition=Condition(
                        ResponseFormat(cells["condition_format"]),
                        UncertaintyArm(cells["condition_uncertainty"]),
                        ElicitationArm(cells["condition_elicitation"]),
                    ),
                    prior_response=belief_from_dict(json.loads(cells["prior_response"]))
                    if cells["prior_response"]
                    else None,
                    posterior_response=belief_from_dict(json.loads(cells["posterior_response"])),
                    prior_fit=prior_fit,
                    posterior_fit=posterior_fit,
                    flags=tuple(f for f in cells["flags"].split(";") if f),
                    view_time=float(cells["view_time"]),
                    attention_answer=AttentionAnswer(cells["attention_answer"])
                    if cells["attention_answer"]
                    else None,
                    attention_pass={"true": True, "false": False, "": None}[cells["attention_pass"]],
                    simulated=cells["simulated"] == "true",
                )
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
    return records
