"""Study state, condition assignment, and append-only persistence.

Each study lives in one JSON-lines event log under the data directory;
replaying the log from the top rebuilds identical in-memory state, and fits
are recomputed deterministically rather than persisted, so a restart cannot
disagree with the original process. All writes to a study serialize through
that study's lock; reads copy references under the lock and compute outside
it.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from ..analysis import BootstrapSpec, RegressionSpec, build_analysis_report
from ..bayes import DEFAULT_ICON_UNIT, ObservedData
from ..errors import (
    AlreadyCompletedError,
    StepMismatchError,
    UnknownSessionError,
    UnknownStudyError,
    ValidationError,
)
from ..fitting import FitConfig
from ..records import (
    AttentionAnswer,
    Condition,
    Dataset,
    ElicitationArm,
    ParticipantRecord,
    ResponseFormat,
    UncertaintyArm,
    attention_range_for,
    belief_from_dict,
    fit_belief,
    payload_kind,
    records_to_csv,
    records_to_jsonl,
)
from ..simulate import generate_hops
from ..validation import validate_payload

__all__ = ["DatasetDef", "ConditionDef", "StudyConfig", "StudyStore"]

STEPS_ELICITED = ("prior", "stimulus", "posterior", "attention")
STEPS_UNELICITED = ("stimulus", "posterior", "attention")

WIDGET_KINDS = {
    ResponseFormat.GRAPHICAL_SAMPLE: "IconArraySample",
    ResponseFormat.TEXT_SAMPLE: "TextSample",
    ResponseFormat.MODE_INTERVAL: "ModeInterval",
    ResponseFormat.HISTOGRAM: "BallsAndBins",
}

SAMPLE_ROUNDS = 5

ATTENTION_QUESTION = (
    "Which range did the observed proportion fall into? (0%-30%, 30%-60%, 60%-100%)"
)

_ID_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]{0,63}$")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class DatasetDef:
    """One dataset a study can assign: observed counts plus display geometry."""

    name: Dataset
    data: ObservedData
    grid_rows: int = 10
    grid_cols: int = 10

    def __post_init__(self) -> None:
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise ValidationError("grid geometry must be positive", ("grid_rows",))

    def to_dict(self) -> dict:
        return {
            "name": self.name.value,
            "successes": self.data.successes,
            "failures": self.data.failures,
            "label": self.data.label,
            "icon_unit": self.data.icon_unit,
            "grid_rows": self.grid_rows,
            "grid_cols": self.grid_cols,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetDef":
        return cls(
            name=Dataset(d["name"]),
            data=ObservedData(
                successes=d["successes"],
                failures=d["failures"],
                label=d.get("label", ""),
                icon_unit=d.get("icon_unit", DEFAULT_ICON_UNIT),
            ),
            grid_rows=d.get("grid_rows", 10),
            grid_cols=d.get("grid_cols", 10),
        )


@dataclass(frozen=True)
class ConditionDef:
    condition: Condition
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not (self.weight > 0):
            raise ValidationError("condition weight must be positive", ("weight",))

    def to_dict(self) -> dict:
        d = self.condition.to_dict()
        d["weight"] = self.weight
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ConditionDef":
        return cls(
            condition=Condition.from_dict(d),
            weight=d.get("weight", 1.0),
        )


@dataclass(frozen=True)
class StudyConfig:
    study_id: str
    datasets: tuple
    conditions: tuple
    fit: FitConfig = field(default_factory=FitConfig)
    bootstrap: BootstrapSpec = field(default_factory=BootstrapSpec)
    hops_frame_count: int = 20

    def __post_init__(self) -> None:
        if not _ID_PATTERN.match(self.study_id):
            raise ValidationError(
                "study_id must be a short slug of letters, digits, '-' or '_'",
                ("study_id",),
            )
        if not self.datasets:
            raise ValidationError("at least one dataset required", ("datasets",))
        if not self.conditions:
            raise ValidationError("at least one condition required", ("conditions",))
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ValidationError("dataset names must be unique", ("datasets",))
        keys = [c.condition.key for c in self.conditions]
        if len(set(keys)) != len(keys):
            raise ValidationError("conditions must be unique", ("conditions",))
        if self.hops_frame_count < 1:
            raise ValidationError("hops_frame_count must be positive", ("hops_frame_count",))

    def to_dict(self) -> dict:
        return {
            "study_id": self.study_id,
            "datasets": [d.to_dict() for d in self.datasets],
            "conditions": [c.to_dict() for c in self.conditions],
            "fit": self.fit.to_dict(),
            "bootstrap": self.bootstrap.to_dict(),
            "hops_frame_count": self.hops_frame_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StudyConfig":
        validate_payload(d, "study-config")
        return cls(
            study_id=d["study_id"],
            datasets=tuple(DatasetDef.from_dict(x) for x in d["datasets"]),
            conditions=tuple(ConditionDef.from_dict(x) for x in d["conditions"]),
            fit=FitConfig.from_dict(d.get("fit", {})),
            bootstrap=BootstrapSpec.from_dict(d.get("bootstrap", {})),
            hops_frame_count=d.get("hops_frame_count", 20),
        )

    @property
    def is_two_by_two(self) -> bool:
        """Whether the condition set spans both uncertainty and elicitation arms."""
        arms = {(c.condition.uncertainty, c.condition.elicitation) for c in self.conditions}
        return len({u for u, _ in arms}) == 2 and len({e for _, e in arms}) == 2

    def dataset_def(self, name: Dataset) -> DatasetDef:
        for ds in self.datasets:
            if ds.name is name:
                return ds
        raise ValidationError(f"study has no dataset {name.value}", ("dataset",))

    def data_map(self) -> dict:
        return {ds.name: ds.data for ds in self.datasets}


@dataclass
class _Session:
    session_id: str
    study_id: str
    participant_id: Optional[str]
    dataset: Dataset
    condition: Condition
    steps: tuple
    hops_seed: int
    created: str
    cursor: int = 0
    responses: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    step_times: dict = field(default_factory=dict)
    view_time: float = 0.0
    attention_answer: Optional[AttentionAnswer] = None
    attention_pass: Optional[bool] = None
    completed: bool = False

    @property
    def current_step(self) -> Optional[str]:
        return None if self.completed else self.steps[self.cursor]

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "study_id": self.study_id,
            "participant_id": self.participant_id,
            "dataset": self.dataset.value,
            "condition": self.condition.to_dict(),
            "steps": list(self.steps),
            "step": self.current_step,
            "step_index": self.cursor,
            "completed": self.completed,
        }


@dataclass
class _Study:
    config: StudyConfig
    path: Path
    lock: threading.Lock = field(default_factory=threading.Lock)
    sessions: dict = field(default_factory=dict)
    condition_counts: dict = field(default_factory=dict)
    dataset_counts: dict = field(default_factory=dict)
    session_seq: int = 0
    records: list = field(default_factory=list)


def _study_seed(global_seed: int, study_id: str) -> list:
    digest = hashlib.sha256(study_id.encode()).digest()
    return [int(global_seed), int.from_bytes(digest[:8], "big")]


class StudyStore:
    """All studies under one data directory, replayed on construction."""

    def __init__(self, data_dir, global_seed: int = 0):
        self._dir = Path(data_dir)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._global_seed = int(global_seed)
        self._registry_lock = threading.Lock()
        self._studies: dict = {}
        self._session_index: dict = {}
        for path in sorted(self._dir.glob("*.jsonl")):
            self._replay(path)

    # ------------------------------------------------------------- plumbing

    def _append(self, study: _Study, event: dict) -> None:
        line = json.dumps(event, sort_keys=True) + "\n"
        with open(study.path, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def _replay(self, path: Path) -> None:
        study: Optional[_Study] = None
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValidationError(
                        f"{path.name}:{line_no}: corrupt event log: {exc}"
                    ) from exc
                kind = event.get("event")
                if kind == "create_study":
                    config = StudyConfig.from_dict(event["config"])
                    study = self._register(config, path)
                elif study is None:
                    raise ValidationError(
                        f"{path.name}:{line_no}: event before create_study"
                    )
                elif kind == "open_session":
                    self._apply_open(study, event)
                elif kind == "response":
                    session = study.sessions[event["session_id"]]
                    self._apply_response(study, session, event["step"], event["payload"], event["ts"])
                elif kind == "ingest":
                    self._apply_ingest(study, event["record"])
                else:
                    raise ValidationError(f"{path.name}:{line_no}: unknown event {kind!r}")

    def _register(self, config: StudyConfig, path: Path) -> _Study:
        study = _Study(config=config, path=path)
        study.condition_counts = {c.condition.key: 0 for c in config.conditions}
        study.dataset_counts = {d.name.value: 0 for d in config.datasets}
        with self._registry_lock:
            self._studies[config.study_id] = study
        return study

    def _get_study(self, study_id: str) -> _Study:
        with self._registry_lock:
            study = self._studies.get(study_id)
        if study is None:
            raise UnknownStudyError(study_id)
        return study

    def _get_session(self, session_id: str) -> tuple:
        with self._registry_lock:
            study_id = self._session_index.get(session_id)
        if study_id is None:
            raise UnknownSessionError(session_id)
        study = self._get_study(study_id)
        return study, study.sessions[session_id]

    # ------------------------------------------------------------- studies

    def create_study(self, config_dict: dict) -> tuple:
        """Returns (study_id, created). Identical resubmission is a no-op."""
        config = StudyConfig.from_dict(config_dict)
        with self._registry_lock:
            existing = self._studies.get(config.study_id)
        if existing is not None:
            if existing.config.to_dict() == config.to_dict():
                return config.study_id, False
            raise ValidationError(
                f"study {config.study_id!r} already exists with a different config",
                ("study_id",),
            )
        path = self._dir / f"{config.study_id}.jsonl"
        study = self._register(config, path)
        self._append(study, {"event": "create_study", "config": config.to_dict()})
        return config.study_id, True

    def get_study(self, study_id: str) -> dict:
        return self._get_study(study_id).config.to_dict()

    def study_ids(self) -> list:
        with self._registry_lock:
            return sorted(self._studies)

    # ------------------------------------------------------------- sessions

    def _assign(self, study: _Study) -> tuple:
        """Least-filled-first weighted assignment with a seeded tie-break."""
        rng = np.random.default_rng(
            _study_seed(self._global_seed, study.config.study_id) + [study.session_seq]
        )
        conds = study.config.conditions
        fill = [study.condition_counts[c.condition.key] / c.weight for c in conds]
        best = min(fill)
        tied = [i for i, f in enumerate(fill) if f == best]
        condition = conds[tied[int(rng.integers(len(tied)))]].condition

        datasets = study.config.datasets
        counts = [study.dataset_counts[d.name.value] for d in datasets]
        least = min(counts)
        tied_ds = [i for i, c in enumerate(counts) if c == least]
        dataset = datasets[tied_ds[int(rng.integers(len(tied_ds)))]]
        hops_seed = int(rng.integers(2**63))
        return condition, dataset, hops_seed

    def open_session(self, study_id: str, participant_id: Optional[str] = None) -> dict:
        study = self._get_study(study_id)
        with study.lock:
            condition, dataset, hops_seed = self._assign(study)
            session_id = f"{study_id}-s{study.session_seq:05d}"
            event = {
                "event": "open_session",
                "session_id": session_id,
                "participant_id": participant_id,
                "dataset": dataset.name.value,
                "condition": condition.to_dict(),
                "hops_seed": hops_seed,
                "ts": _now(),
            }
            session = self._apply_open(study, event)
            self._append(study, event)
            return session.to_dict()

    def _apply_open(self, study: _Study, event: dict) -> _Session:
        condition = Condition.from_dict(event["condition"])
        steps = (
            STEPS_ELICITED
            if condition.elicitation is ElicitationArm.ELICITATION
            else STEPS_UNELICITED
        )
        session = _Session(
            session_id=event["session_id"],
            study_id=study.config.study_id,
            participant_id=event.get("participant_id"),
            dataset=Dataset(event["dataset"]),
            condition=condition,
            steps=steps,
            hops_seed=event["hops_seed"],
            created=event["ts"],
        )
        study.sessions[session.session_id] = session
        study.condition_counts[condition.key] += 1
        study.dataset_counts[session.dataset.value] += 1
        study.session_seq += 1
        with self._registry_lock:
            self._session_index[session.session_id] = study.config.study_id
        return session

    # ------------------------------------------------------------- steps

    def get_step(self, session_id: str) -> dict:
        study, session = self._get_session(session_id)
        with study.lock:
            return self._step_spec(study, session)

    def _step_spec(self, study: _Study, session: _Session) -> dict:
        ds = study.config.dataset_def(session.dataset)
        step = session.current_step
        spec = {
            "session_id": session.session_id,
            "study_id": session.study_id,
            "dataset": session.dataset.value,
            "condition": session.condition.to_dict(),
            "step": step,
            "step_index": session.cursor,
            "step_count": len(session.steps),
            "completed": session.completed,
            "widget": None,
            "stimulus": None,
            "attention": None,
        }
        if step in ("prior", "posterior"):
            spec["widget"] = self._widget_spec(session.condition.format, ds, step)
        elif step == "stimulus":
            spec["stimulus"] = self._stimulus_spec(study, session, ds)
        elif step == "attention":
            spec["attention"] = {
                "question": ATTENTION_QUESTION,
                "ranges": [a.value for a in AttentionAnswer],
            }
        return spec

    def _widget_spec(self, fmt: ResponseFormat, ds: DatasetDef, target: str) -> dict:
        widget = {"kind": WIDGET_KINDS[fmt], "target": target}
        kind = payload_kind(fmt)
        if kind == "samples":
            widget["rounds"] = SAMPLE_ROUNDS
            if fmt is ResponseFormat.GRAPHICAL_SAMPLE:
                widget["grid_rows"] = ds.grid_rows
                widget["grid_cols"] = ds.grid_cols
        elif kind == "histogram":
            widget["bins"] = 20
            widget["balls"] = 100
        return widget

    def _stimulus_spec(self, study: _Study, session: _Session, ds: DatasetDef) -> dict:
        if session.condition.uncertainty is UncertaintyArm.UNCERTAINTY:
            hops = generate_hops(ds.data, study.config.hops_frame_count, session.hops_seed)
            return {
                "kind": "hops",
                "frames": list(hops.frames),
                "frame_duration_ms": hops.frame_duration_ms,
                "label": ds.data.label,
            }
        return {
            "kind": "static",
            "proportion": ds.data.display_proportion,
            "icon_unit": ds.data.icon_unit,
            "grid_rows": ds.grid_rows,
            "grid_cols": ds.grid_cols,
            "label": ds.data.label,
        }

    # ------------------------------------------------------------- responses

    def submit_response(self, session_id: str, step: str, payload: dict) -> dict:
        study, session = self._get_session(session_id)
        with study.lock:
            ts = _now()
            result = self._apply_response(study, session, step, payload, ts)
            self._append(
                study,
                {
                    "event": "response",
                    "session_id": session_id,
                    "step": step,
                    "payload": payload,
                    "ts": ts,
                },
            )
            return result

    def _apply_response(
        self, study: _Study, session: _Session, step: str, payload: dict, ts: str
    ) -> dict:
        if session.completed:
            raise AlreadyCompletedError(f"session {session.session_id} is complete")
        expected = session.steps[session.cursor]
        if step != expected:
            raise StepMismatchError(
                f"session {session.session_id} expects step {expected!r}, got {step!r}"
            )
        if step in ("prior", "posterior"):
            belief = belief_from_dict(payload)
            expected_kind = payload_kind(session.condition.format)
            if payload.get("kind") != expected_kind:
                raise ValidationError(
                    f"condition {session.condition.key} expects a "
                    f"{expected_kind} payload, got {payload.get('kind')!r}",
                    ("payload", "kind"),
                )
            fit = fit_belief(belief, study.config.fit)
            session.fits[step] = fit
        elif step == "stimulus":
            dwell = payload.get("dwell_ms")
            if not isinstance(dwell, (int, float)) or dwell < 0:
                raise ValidationError("dwell_ms must be a nonnegative number", ("payload", "dwell_ms"))
            session.view_time = float(dwell) / 1000.0
        elif step == "attention":
            try:
                answer = AttentionAnswer(payload["answer"])
            except (KeyError, ValueError) as exc:
                raise ValidationError(
                    "answer must be one of R0_30, R30_60, R60_100", ("payload", "answer")
                ) from exc
            truth = attention_range_for(study.config.dataset_def(session.dataset).data)
            session.attention_answer = answer
            session.attention_pass = answer is truth
        session.responses[step] = payload
        session.step_times[step] = ts
        session.cursor += 1
        if session.cursor >= len(session.steps):
            session.completed = True
            study.records.append(self._finish_record(session))
        return {
            "next_step": session.current_step,
            "completed": session.completed,
            **(
                {"attention_pass": session.attention_pass}
                if session.completed
                else {}
            ),
        }

    def _finish_record(self, session: _Session) -> ParticipantRecord:
        flags = []
        prior_fit = None
        if "prior" in session.fits:
            prior_fit = session.fits["prior"].params
            flags.extend(f"prior:{f}" for f in session.fits["prior"].flags)
        posterior = session.fits["posterior"]
        flags.extend(f"posterior:{f}" for f in posterior.flags)
        prior_payload = session.responses.get("prior")
        return ParticipantRecord(
            id=session.session_id,
            dataset=session.dataset,
            condition=session.condition,
            prior_response=belief_from_dict(prior_payload) if prior_payload else None,
            posterior_response=belief_from_dict(session.responses["posterior"]),
            prior_fit=prior_fit,
            posterior_fit=posterior.params,
            flags=tuple(sorted(set(flags))),
            view_time=session.view_time,
            attention_answer=session.attention_answer,
            attention_pass=session.attention_pass,
            simulated=False,
        )

    # ------------------------------------------------------------- ingest

    def ingest_records(self, study_id: str, record_dicts: list) -> int:
        """Bulk-load externally produced participant records (e.g. simulated)."""
        study = self._get_study(study_id)
        parsed = []
        for i, rd in enumerate(record_dicts):
            try:
                validate_payload(rd, "participant-record")
                record = ParticipantRecord.from_dict(rd)
            except ValueError as exc:
                # also catches domain errors the schema cannot express, such
                # as non-finite fit parameters smuggled in as JSON numbers
                raise ValidationError(str(exc), ("records", i)) from exc
            if record.dataset not in {d.name for d in study.config.datasets}:
                raise ValidationError(
                    f"record dataset {record.dataset.value} not in study",
                    ("records", i, "dataset"),
                )
            parsed.append((rd, record))
        with study.lock:
            for rd, record in parsed:
                self._apply_ingest(study, rd)
                self._append(study, {"event": "ingest", "record": rd})
        return len(parsed)

    def _apply_ingest(self, study: _Study, record_dict: dict) -> None:
        from ..records import fill_fits  # local import avoids a cycle at module load

        record = ParticipantRecord.from_dict(record_dict)
        study.records.append(fill_fits(record, study.config.fit))

    # ------------------------------------------------------------- analysis

    def _snapshot_records(self, study: _Study) -> list:
        with study.lock:
            return list(study.records)

    def completed_records(self, study_id: str) -> list:
        return self._snapshot_records(self._get_study(study_id))

    def get_analysis(
        self,
        study_id: str,
        condition: Optional[str] = None,
        dataset: Optional[str] = None,
        attention_pass: Optional[bool] = True,
        regress: Optional[bool] = None,
        first_n: bool = False,
        regression_seed: int = 0,
    ) -> dict:
        study = self._get_study(study_id)
        if regress is None:
            # studies designed around the uncertainty x elicitation contrast
            # get the regression by default
            regress = study.config.is_two_by_two
        records = self._snapshot_records(study)
        filters: dict = {}
        if condition is not None:
            try:
                Condition.from_key(condition)
            except ValueError as exc:
                raise ValidationError(str(exc), ("condition",)) from exc
            filters["condition"] = condition
            records = [r for r in records if r.condition.key == condition]
        if dataset is not None:
            try:
                ds = Dataset(dataset)
            except ValueError as exc:
                raise ValidationError(f"unknown dataset {dataset!r}", ("dataset",)) from exc
            filters["dataset"] = ds.value
            records = [r for r in records if r.dataset is ds]
        if attention_pass is not None:
            filters["attention_pass"] = attention_pass
            records = [r for r in records if r.attention_pass == attention_pass]
        return build_analysis_report(
            records,
            study.config.data_map(),
            study.config.bootstrap,
            regression_spec=RegressionSpec(seed=regression_seed) if regress else None,
            fit_cfg=study.config.fit,
            filters=filters,
            first_n=first_n,
        )

    # ------------------------------------------------------------- export

    def export_records(self, study_id: str, fmt: str) -> str:
        records = self.completed_records(study_id)
        if fmt == "csv":
            return records_to_csv(records)
        if fmt == "jsonl":
            return records_to_jsonl(records)
        raise ValidationError(f"format must be csv or jsonl, got {fmt!r}", ("format",))
