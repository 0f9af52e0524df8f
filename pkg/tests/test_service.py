"""HTTP study service: lifecycle, step flow, assignment, persistence, analysis."""

from __future__ import annotations

import dataclasses
import json
import threading

import pytest
from fastapi.testclient import TestClient

from beliefbench import (
    Condition,
    Dataset,
    ElicitationArm,
    ObservedData,
    ResponseFormat,
    UncertaintyArm,
)
from beliefbench.bayes import normative_update
from beliefbench.errors import ValidationError
from beliefbench.records import belief_to_dict, records_from_csv, records_from_jsonl
from beliefbench.service.app import create_app, env_settings
from beliefbench.service.store import StudyStore
from beliefbench.validation import validate_payload

from helpers import (
    PAPER_PRIOR,
    TECH_SMALL_DATA,
    exact_three_point_record,
    study_config_dict,
    three_point_samples,
)

PRIOR_PAYLOAD = belief_to_dict(three_point_samples(PAPER_PRIOR))
POSTERIOR_PAYLOAD = belief_to_dict(
    three_point_samples(normative_update(PAPER_PRIOR, TECH_SMALL_DATA))
)

# TechSmall shows 27/158, squarely inside the lowest attention band
RIGHT_ANSWER = "R0_30"
WRONG_ANSWER = "R60_100"


def make_client(tmp_path) -> TestClient:
    return TestClient(create_app(StudyStore(tmp_path, global_seed=0)))


def submit(client, session_id, step, payload):
    return client.post(
        f"/sessions/{session_id}/responses", json={"step": step, "payload": payload}
    )


def complete_session(client, study_id="study", answer=RIGHT_ANSWER, dwell_ms=31500):
    """Walk one elicited sample-format session to completion.

    Returns (session dict, final submission body).
    """
    session = client.post(f"/studies/{study_id}/sessions").json()
    sid = session["session_id"]
    assert submit(client, sid, "prior", PRIOR_PAYLOAD).status_code == 200
    assert submit(client, sid, "stimulus", {"dwell_ms": dwell_ms}).status_code == 200
    assert submit(client, sid, "posterior", POSTERIOR_PAYLOAD).status_code == 200
    final = submit(client, sid, "attention", {"answer": answer})
    assert final.status_code == 200
    return session, final.json()


def error_type(response) -> str:
    return response.json()["error"]["type"]


# ------------------------------------------------------------------ studies


def test_create_study_reports_created_then_idempotent(tmp_path):
    client = make_client(tmp_path)
    config = study_config_dict()
    first = client.post("/studies", json=config)
    assert first.status_code == 201
    assert first.json() == {"study_id": "study", "created": True}
    again = client.post("/studies", json=config)
    assert again.status_code == 200
    assert again.json() == {"study_id": "study", "created": False}


def test_create_study_same_id_different_config_conflicts(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    other = study_config_dict(hops_frame_count=7)
    resp = client.post("/studies", json=other)
    assert resp.status_code == 400
    assert error_type(resp) == "schema-violation"
    assert "different config" in resp.json()["error"]["message"]


def test_create_study_rejects_malformed_config(tmp_path):
    client = make_client(tmp_path)
    config = study_config_dict(
        conditions=[
            {"format": "Tarot", "uncertainty": "NoUncertainty", "elicitation": "Elicitation"}
        ]
    )
    resp = client.post("/studies", json=config)
    assert resp.status_code == 400
    assert error_type(resp) == "schema-violation"


def test_get_study_echoes_config_with_defaults(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    body = client.get("/studies/study").json()
    assert body["study_id"] == "study"
    assert body["hops_frame_count"] == 20
    assert body["datasets"][0]["icon_unit"] == 600
    assert body["datasets"][0]["grid_rows"] == 10
    assert body["conditions"][0]["weight"] == 1.0
    assert body["bootstrap"]["resample_size"] == 100
    # the echoed config is itself a valid study config
    validate_payload(body, "study-config")


def test_unknown_study_is_404(tmp_path):
    client = make_client(tmp_path)
    for resp in (
        client.get("/studies/nope"),
        client.post("/studies/nope/sessions"),
        client.get("/studies/nope/analysis"),
        client.get("/studies/nope/export", params={"format": "csv"}),
    ):
        assert resp.status_code == 404
        assert error_type(resp) == "unknown-study"


# ------------------------------------------------------------------ step flow


def test_elicited_session_walks_four_steps(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    opened = client.post("/studies/study/sessions", json={"participant_id": "p-7"})
    assert opened.status_code == 201
    session = opened.json()
    assert session["session_id"] == "study-s00000"
    assert session["participant_id"] == "p-7"
    assert session["steps"] == ["prior", "stimulus", "posterior", "attention"]
    assert session["step"] == "prior"
    sid = session["session_id"]

    spec = client.get(f"/sessions/{sid}/step").json()
    validate_payload(spec, "step-spec")
    assert spec["step"] == "prior"
    assert spec["widget"] == {
        "kind": "IconArraySample",
        "target": "prior",
        "rounds": 5,
        "grid_rows": 10,
        "grid_cols": 10,
    }
    assert spec["stimulus"] is None and spec["attention"] is None

    out = submit(client, sid, "prior", PRIOR_PAYLOAD).json()
    assert out == {"next_step": "stimulus", "completed": False}

    spec = client.get(f"/sessions/{sid}/step").json()
    validate_payload(spec, "step-spec")
    assert spec["stimulus"]["kind"] == "static"
    assert spec["stimulus"]["proportion"] == pytest.approx(27 / 158)
    assert spec["stimulus"]["icon_unit"] == 600
    assert spec["widget"] is None

    out = submit(client, sid, "stimulus", {"dwell_ms": 31500}).json()
    assert out == {"next_step": "posterior", "completed": False}

    spec = client.get(f"/sessions/{sid}/step").json()
    validate_payload(spec, "step-spec")
    assert spec["widget"]["target"] == "posterior"

    out = submit(client, sid, "posterior", POSTERIOR_PAYLOAD).json()
    assert out == {"next_step": "attention", "completed": False}

    spec = client.get(f"/sessions/{sid}/step").json()
    validate_payload(spec, "step-spec")
    assert len(spec["attention"]["ranges"]) == 3
    assert spec["attention"]["question"]

    out = submit(client, sid, "attention", {"answer": RIGHT_ANSWER}).json()
    assert out == {"next_step": None, "completed": True, "attention_pass": True}

    spec = client.get(f"/sessions/{sid}/step").json()
    validate_payload(spec, "step-spec")
    assert spec["completed"] is True
    assert spec["step"] is None
    assert spec["widget"] is None and spec["stimulus"] is None and spec["attention"] is None


def test_completed_session_exports_fitted_record(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    session, _ = complete_session(client, dwell_ms=31500)

    text = client.get("/studies/study/export", params={"format": "jsonl"}).text
    (record,) = records_from_jsonl(text)
    assert record.id == session["session_id"]
    assert record.view_time == pytest.approx(31.5)
    assert record.attention_pass is True
    assert record.simulated is False
    assert record.prior_response == three_point_samples(PAPER_PRIOR)
    # fits happen eagerly at submission time, so the export already has them
    assert record.prior_fit is not None and record.posterior_fit is not None
    assert record.prior_fit.alpha == pytest.approx(PAPER_PRIOR.alpha, rel=1e-6)


def test_export_formats_round_trip_identically(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    complete_session(client)
    complete_session(client, answer=WRONG_ANSWER)

    csv_resp = client.get("/studies/study/export", params={"format": "csv"})
    jsonl_resp = client.get("/studies/study/export", params={"format": "jsonl"})
    assert csv_resp.headers["content-type"].startswith("text/csv")
    assert jsonl_resp.headers["content-type"].startswith("application/x-ndjson")
    assert records_from_csv(csv_resp.text) == records_from_jsonl(jsonl_resp.text)


def test_export_of_empty_study_is_header_only(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    csv_text = client.get("/studies/study/export", params={"format": "csv"}).text
    assert csv_text.splitlines()[0].startswith("id,dataset,")
    assert len(csv_text.splitlines()) == 1
    assert client.get("/studies/study/export", params={"format": "jsonl"}).text == ""


def test_export_requires_known_format(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    resp = client.get("/studies/study/export", params={"format": "xml"})
    assert resp.status_code == 400
    assert error_type(resp) == "schema-violation"
    assert client.get("/studies/study/export").status_code == 400


def test_unelicited_session_skips_prior(tmp_path):
    client = make_client(tmp_path)
    config = study_config_dict(
        conditions=[
            {
                "format": "GraphicalSample",
                "uncertainty": "NoUncertainty",
                "elicitation": "NoElicitation",
            }
        ]
    )
    client.post("/studies", json=config)
    session = client.post("/studies/study/sessions").json()
    assert session["steps"] == ["stimulus", "posterior", "attention"]
    sid = session["session_id"]
    submit(client, sid, "stimulus", {"dwell_ms": 12000})
    submit(client, sid, "posterior", POSTERIOR_PAYLOAD)
    out = submit(client, sid, "attention", {"answer": RIGHT_ANSWER}).json()
    assert out["completed"] is True

    (record,) = records_from_jsonl(
        client.get("/studies/study/export", params={"format": "jsonl"}).text
    )
    assert record.prior_response is None
    assert record.prior_fit is None
    assert record.posterior_fit is not None


def test_hops_stimulus_is_deterministic_per_session(tmp_path):
    client = make_client(tmp_path)
    config = study_config_dict(
        conditions=[
            {
                "format": "GraphicalSample",
                "uncertainty": "Uncertainty",
                "elicitation": "Elicitation",
            }
        ],
        hops_frame_count=12,
    )
    client.post("/studies", json=config)

    def stimulus_of(sid):
        submit(client, sid, "prior", PRIOR_PAYLOAD)
        spec = client.get(f"/sessions/{sid}/step").json()
        validate_payload(spec, "step-spec")
        return spec["stimulus"]

    first = stimulus_of(client.post("/studies/study/sessions").json()["session_id"])
    assert first["kind"] == "hops"
    assert first["frame_duration_ms"] == 400
    assert len(first["frames"]) == 12
    assert all(0.0 <= f <= 1.0 for f in first["frames"])

    # re-reading the step replays the same frames, but a new session draws fresh ones
    again = client.get("/sessions/study-s00000/step").json()["stimulus"]
    assert again["frames"] == first["frames"]
    second = stimulus_of(client.post("/studies/study/sessions").json()["session_id"])
    assert second["frames"] != first["frames"]


# ------------------------------------------------------------------ rejections


def test_out_of_order_submission_conflicts(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    sid = client.post("/studies/study/sessions").json()["session_id"]
    resp = submit(client, sid, "posterior", POSTERIOR_PAYLOAD)
    assert resp.status_code == 409
    assert error_type(resp) == "step-mismatch"
    # the failed attempt must not advance the session
    assert client.get(f"/sessions/{sid}/step").json()["step"] == "prior"


def test_completed_session_rejects_more_input(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    session, _ = complete_session(client)
    resp = submit(client, session["session_id"], "attention", {"answer": RIGHT_ANSWER})
    assert resp.status_code == 409
    assert error_type(resp) == "already-completed"


def test_unknown_session_is_404(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    assert client.get("/sessions/ghost/step").status_code == 404
    resp = submit(client, "ghost", "prior", PRIOR_PAYLOAD)
    assert resp.status_code == 404
    assert error_type(resp) == "unknown-session"


def test_malformed_submission_shape_rejected(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    sid = client.post("/studies/study/sessions").json()["session_id"]
    bad_bodies = [
        {"step": "prior"},
        {"payload": PRIOR_PAYLOAD},
        {"step": "warmup", "payload": PRIOR_PAYLOAD},
        {"step": "attention", "payload": {"answer": "R40_70"}},
        {"step": "stimulus", "payload": {"dwell_ms": -5}},
    ]
    for body in bad_bodies:
        resp = client.post(f"/sessions/{sid}/responses", json=body)
        assert resp.status_code == 400, body
        assert error_type(resp) == "schema-violation"
    assert client.get(f"/sessions/{sid}/step").json()["step_index"] == 0


def test_payload_kind_must_match_condition(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    sid = client.post("/studies/study/sessions").json()["session_id"]
    resp = submit(
        client, sid, "prior", {"kind": "mode_interval", "mode": 0.3, "subjective_probability": 0.5}
    )
    assert resp.status_code == 400
    assert "samples" in resp.json()["error"]["message"]


def test_participant_id_must_be_string(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    resp = client.post("/studies/study/sessions", json={"participant_id": 7})
    assert resp.status_code == 400
    assert error_type(resp) == "schema-violation"


# ------------------------------------------------------------------ assignment


def condition_dict(fmt, weight=None):
    d = {"format": fmt, "uncertainty": "NoUncertainty", "elicitation": "Elicitation"}
    if weight is not None:
        d["weight"] = weight
    return d


def test_condition_assignment_balances_exactly(tmp_path):
    client = make_client(tmp_path)
    formats = ["GraphicalSample", "TextSample", "ModeInterval", "Histogram"]
    client.post(
        "/studies", json=study_config_dict(conditions=[condition_dict(f) for f in formats])
    )
    counts = {f: 0 for f in formats}
    for _ in range(40):
        session = client.post("/studies/study/sessions").json()
        counts[session["condition"]["format"]] += 1
    assert counts == {f: 10 for f in formats}


def test_weighted_assignment_respects_ratios(tmp_path):
    client = make_client(tmp_path)
    conditions = [
        condition_dict("GraphicalSample", weight=1.0),
        condition_dict("TextSample", weight=3.0),
    ]
    client.post("/studies", json=study_config_dict(conditions=conditions))
    counts = {"GraphicalSample": 0, "TextSample": 0}
    for _ in range(80):
        session = client.post("/studies/study/sessions").json()
        counts[session["condition"]["format"]] += 1
    assert counts == {"GraphicalSample": 20, "TextSample": 60}


def test_dataset_assignment_balances(tmp_path):
    client = make_client(tmp_path)
    datasets = [
        {"name": "TechSmall", "successes": 27, "failures": 131},
        {"name": "ElderlyLarge", "successes": 315000, "failures": 435000},
    ]
    client.post("/studies", json=study_config_dict(datasets=datasets))
    counts = {"TechSmall": 0, "ElderlyLarge": 0}
    for _ in range(10):
        session = client.post("/studies/study/sessions").json()
        counts[session["dataset"]] += 1
    assert counts == {"TechSmall": 5, "ElderlyLarge": 5}


def test_session_ids_are_sequential(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    ids = [client.post("/studies/study/sessions").json()["session_id"] for _ in range(3)]
    assert ids == ["study-s00000", "study-s00001", "study-s00002"]


def test_concurrent_opens_stay_unique_and_balanced(tmp_path):
    store = StudyStore(tmp_path, global_seed=0)
    store.create_study(
        study_config_dict(
            conditions=[condition_dict("GraphicalSample"), condition_dict("TextSample")]
        )
    )
    sessions = []
    def worker():
        sessions.append(store.open_session("study"))
    threads = [threading.Thread(target=worker) for _ in range(60)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    ids = [s["session_id"] for s in sessions]
    assert sorted(ids) == [f"study-s{i:05d}" for i in range(60)]
    counts = {"GraphicalSample": 0, "TextSample": 0}
    for s in sessions:
        counts[s["condition"]["format"]] += 1
    assert counts == {"GraphicalSample": 30, "TextSample": 30}

    # the log replays to the same assignments and keeps the sequence going
    replayed = StudyStore(tmp_path, global_seed=0)
    by_id = {s["session_id"]: s["condition"] for s in sessions}
    for sid, condition in by_id.items():
        assert replayed.get_step(sid)["condition"] == condition
    assert replayed.open_session("study")["session_id"] == "study-s00060"


# ------------------------------------------------------------------ persistence


def test_restart_replays_identical_state(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    complete_session(client, answer=RIGHT_ANSWER)
    complete_session(client, answer=WRONG_ANSWER)
    records = [exact_three_point_record(f"sim-{i}", PAPER_PRIOR).to_dict() for i in range(3)]
    assert client.post("/studies/study/records", json={"records": records}).json() == {
        "ingested": 3
    }
    params = {"attention_pass": "any"}
    analysis = client.get("/studies/study/analysis", params=params).content
    export = client.get("/studies/study/export", params={"format": "csv"}).text

    reborn = make_client(tmp_path)
    assert reborn.get("/studies/study/analysis", params=params).content == analysis
    assert reborn.get("/studies/study/export", params={"format": "csv"}).text == export
    assert reborn.get("/studies/study").json() == client.get("/studies/study").json()
    assert reborn.post("/studies/study/sessions").json()["session_id"] == "study-s00002"


def test_restart_resumes_mid_session(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    sid = client.post("/studies/study/sessions").json()["session_id"]
    submit(client, sid, "prior", PRIOR_PAYLOAD)

    reborn = make_client(tmp_path)
    spec = reborn.get(f"/sessions/{sid}/step").json()
    assert spec["step"] == "stimulus"
    assert spec["step_index"] == 1
    submit(reborn, sid, "stimulus", {"dwell_ms": 8000})
    submit(reborn, sid, "posterior", POSTERIOR_PAYLOAD)
    out = submit(reborn, sid, "attention", {"answer": RIGHT_ANSWER}).json()
    assert out["completed"] is True
    (record,) = records_from_jsonl(
        reborn.get("/studies/study/export", params={"format": "jsonl"}).text
    )
    assert record.id == sid
    assert record.prior_fit is not None


# ------------------------------------------------------------------ ingest and analysis


def test_ingest_validates_every_record_before_applying(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    good = exact_three_point_record("sim-ok", PAPER_PRIOR).to_dict()
    resp = client.post("/studies/study/records", json={"records": [good, {"id": "junk"}]})
    assert resp.status_code == 400
    assert "records.1" in resp.json()["error"]["message"]
    # the batch is atomic: the valid record must not have landed either
    assert client.get("/studies/study/export", params={"format": "jsonl"}).text == ""


def test_ingest_rejects_record_bodies_without_list(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    resp = client.post("/studies/study/records", json={"records": "many"})
    assert resp.status_code == 400


def test_ingest_rejects_datasets_outside_study(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    foreign = exact_three_point_record(
        "sim-far",
        PAPER_PRIOR,
        data=ObservedData(315000, 435000),
        dataset=Dataset.ELDERLY_LARGE,
    ).to_dict()
    resp = client.post("/studies/study/records", json={"records": [foreign]})
    assert resp.status_code == 400
    assert "records.0.dataset" in resp.json()["error"]["message"]


def test_ingested_exact_records_analyze_to_zero_deviation(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    records = [exact_three_point_record(f"sim-{i}", PAPER_PRIOR).to_dict() for i in range(5)]
    client.post("/studies/study/records", json={"records": records})

    resp = client.get("/studies/study/analysis")
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("application/json")
    report = json.loads(resp.content)
    assert report["record_count"] == 5
    assert report["usable_record_count"] == 5
    assert report["individual"]["zero_kld_count"] == 5
    assert report["aggregate"]["per_dataset"]["TechSmall"]["kld"] < 1e-9
    assert report["bootstrap"]["per_dataset"]["TechSmall"]["lo"] is None


def test_analysis_bytes_are_stable_across_calls(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    records = [exact_three_point_record(f"sim-{i}", PAPER_PRIOR).to_dict() for i in range(4)]
    client.post("/studies/study/records", json={"records": records})
    first = client.get("/studies/study/analysis").content
    second = client.get("/studies/study/analysis").content
    assert first == second
    assert first.endswith(b"\n")


def test_analysis_of_empty_study_reports_markers(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    report = json.loads(client.get("/studies/study/analysis").content)
    assert report["record_count"] == 0
    assert report["aggregate"] == {"insufficient_data": "no records with both fits"}


def test_analysis_filters_by_condition_and_dataset(tmp_path):
    client = make_client(tmp_path)
    config = study_config_dict(
        datasets=[
            {"name": "TechSmall", "successes": 27, "failures": 131},
            {"name": "ElderlyLarge", "successes": 315000, "failures": 435000},
        ],
        conditions=[condition_dict("GraphicalSample"), condition_dict("TextSample")],
    )
    client.post("/studies", json=config)
    text_condition = Condition(
        ResponseFormat.TEXT_SAMPLE,
        UncertaintyArm.NO_UNCERTAINTY,
        ElicitationArm.ELICITATION,
    )
    r1 = exact_three_point_record("r1", PAPER_PRIOR)
    r2 = dataclasses.replace(exact_three_point_record("r2", PAPER_PRIOR), condition=text_condition)
    r3 = exact_three_point_record(
        "r3",
        PAPER_PRIOR,
        data=ObservedData(315000, 435000),
        dataset=Dataset.ELDERLY_LARGE,
    )
    client.post(
        "/studies/study/records", json={"records": [r.to_dict() for r in (r1, r2, r3)]}
    )

    graphical = "GraphicalSample|NoUncertainty|Elicitation"
    report = json.loads(
        client.get("/studies/study/analysis", params={"condition": graphical}).content
    )
    assert report["record_count"] == 2
    assert report["filters"]["condition"] == graphical
    assert {r["id"] for r in report["records"]} == {"r1", "r3"}

    report = json.loads(
        client.get("/studies/study/analysis", params={"dataset": "TechSmall"}).content
    )
    assert {r["id"] for r in report["records"]} == {"r1", "r2"}

    report = json.loads(
        client.get(
            "/studies/study/analysis",
            params={"condition": graphical, "dataset": "ElderlyLarge"},
        ).content
    )
    assert {r["id"] for r in report["records"]} == {"r3"}


def test_analysis_attention_filter_is_tristate(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    complete_session(client, answer=RIGHT_ANSWER)
    complete_session(client, answer=WRONG_ANSWER)

    def count(**params):
        return json.loads(
            client.get("/studies/study/analysis", params=params).content
        )["record_count"]

    assert count() == 1
    assert count(attention_pass="true") == 1
    assert count(attention_pass="false") == 1
    assert count(attention_pass="any") == 2


def test_analysis_rejects_bad_filter_values(tmp_path):
    client = make_client(tmp_path)
    client.post("/studies", json=study_config_dict())
    bad_queries = [
        {"condition": "Bogus|NoUncertainty|Elicitation"},
        {"condition": "GraphicalSample"},
        {"dataset": "Mars"},
        {"attention_pass": "maybe"},
    ]
    for params in bad_queries:
        resp = client.get("/studies/study/analysis", params=params)
        assert resp.status_code == 400, params
        assert error_type(resp) == "schema-violation"


def test_regression_runs_by_default_only_for_two_by_two_studies(tmp_path):
    client = make_client(tmp_path)
    conditions = [
        {"format": "GraphicalSample", "uncertainty": u, "elicitation": e}
        for u in ("Uncertainty", "NoUncertainty")
        for e in ("Elicitation", "NoElicitation")
    ]
    client.post("/studies", json=study_config_dict(study_id="grid", conditions=conditions))
    records = []
    for i, c in enumerate(conditions):
        record = exact_three_point_record(f"sim-{i}", PAPER_PRIOR)
        condition = dataclasses.replace(
            record.condition,
            uncertainty=UncertaintyArm(c["uncertainty"]),
            elicitation=ElicitationArm(c["elicitation"]),
        )
        if condition.elicitation is ElicitationArm.NO_ELICITATION:
            record = dataclasses.replace(
                record, condition=condition, prior_response=None, prior_fit=None
            )
        else:
            record = dataclasses.replace(record, condition=condition)
        records.append(record.to_dict())
    client.post("/studies/grid/records", json={"records": records})

    # too few finite rows to fit, but the attempt itself proves the default
    report = json.loads(client.get("/studies/grid/analysis").content)
    assert report["regression"] == {
        "insufficient_data": "fewer than 10 records with finite log KLD"
    }
    report = json.loads(
        client.get("/studies/grid/analysis", params={"regress": "false"}).content
    )
    assert report["regression"] == {"insufficient_data": "regression not requested"}

    # a single-condition study never regresses unless asked
    client.post("/studies", json=study_config_dict())
    complete_session(client)
    report = json.loads(client.get("/studies/study/analysis").content)
    assert report["regression"] == {"insufficient_data": "regression not requested"}


# ------------------------------------------------------------------ settings


def test_env_settings_defaults_and_overrides(monkeypatch):
    for name in (
        "BELIEFBENCH_HOST",
        "BELIEFBENCH_PORT",
        "BELIEFBENCH_DATA_DIR",
        "BELIEFBENCH_SEED",
        "BELIEFBENCH_UI_DIR",
    ):
        monkeypatch.delenv(name, raising=False)
    assert env_settings() == {
        "host": "127.0.0.1",
        "port": 8000,
        "data_dir": "./beliefbench-data",
        "seed": 0,
        "ui_dir": None,
    }
    monkeypatch.setenv("BELIEFBENCH_PORT", "9100")
    monkeypatch.setenv("BELIEFBENCH_SEED", "7")
    monkeypatch.setenv("BELIEFBENCH_UI_DIR", "/srv/ui")
    settings = env_settings()
    assert settings["port"] == 9100
    assert settings["seed"] == 7
    assert settings["ui_dir"] == "/srv/ui"


def test_ui_bundle_hosted_at_app_prefix(tmp_path):
    bundle = tmp_path / "dist"
    bundle.mkdir()
    (bundle / "index.html").write_text("<html><body>elicit</body></html>", encoding="utf-8")
    (bundle / "main.js").write_text("export {}\n", encoding="utf-8")
    client = TestClient(create_app(StudyStore(tmp_path / "data", global_seed=0), bundle))

    page = client.get("/app/")
    assert page.status_code == 200
    assert "elicit" in page.text
    assert client.get("/app/main.js").status_code == 200
    # API routes stay live alongside the mount
    assert client.post("/studies", json=study_config_dict()).status_code == 201


def test_ui_dir_optional_and_validated(tmp_path):
    client = make_client(tmp_path)
    assert client.get("/app/").status_code == 404
    with pytest.raises(ValidationError):
        create_app(StudyStore(tmp_path / "data", global_seed=0), tmp_path / "missing")
