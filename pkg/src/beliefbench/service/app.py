"""HTTP surface over the study store.

Thin by design: every route validates its body against the JSON Schemas,
delegates to StudyStore, and maps domain errors onto status codes
(400 schema violations, 404 unknown ids, 409 step-order conflicts).
The analysis route returns the canonical report bytes so its output is
byte-identical to the command line's.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional, Union

from fastapi import Body, FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..analysis import report_to_json
from ..errors import (
    AlreadyCompletedError,
    StepMismatchError,
    UnknownSessionError,
    UnknownStudyError,
    ValidationError,
)
from ..validation import validate_payload
from .store import StudyStore

__all__ = ["create_app", "app_from_env", "env_settings"]

EXPORT_MEDIA = {"csv": "text/csv", "jsonl": "application/x-ndjson"}


def _error_body(kind: str, message: str) -> dict:
    return {"error": {"type": kind, "message": message}}


def _parse_tristate(value: str, name: str) -> Optional[bool]:
    if value == "true":
        return True
    if value == "false":
        return False
    if value == "any":
        return None
    raise ValidationError(f"{name} must be true, false, or any, got {value!r}", (name,))


def create_app(store: StudyStore, ui_dir: Optional[Union[str, Path]] = None) -> FastAPI:
    """Build the API app, optionally hosting a participant UI bundle at /app."""
    app = FastAPI(title="beliefbench", docs_url=None, redoc_url=None)

    if ui_dir is not None:
        ui_path = Path(ui_dir)
        if not ui_path.is_dir():
            raise ValidationError(f"ui directory {str(ui_path)!r} does not exist", ("ui_dir",))
        app.mount("/app", StaticFiles(directory=ui_path, html=True), name="ui")

    @app.exception_handler(ValidationError)
    async def _validation(request: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content=_error_body("schema-violation", str(exc)))

    @app.exception_handler(RequestValidationError)
    async def _body_shape(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content=_error_body("schema-violation", str(exc)))

    @app.exception_handler(UnknownStudyError)
    async def _no_study(request: Request, exc: UnknownStudyError):
        return JSONResponse(
            status_code=404, content=_error_body("unknown-study", f"no study {exc.args[0]!r}")
        )

    @app.exception_handler(UnknownSessionError)
    async def _no_session(request: Request, exc: UnknownSessionError):
        return JSONResponse(
            status_code=404, content=_error_body("unknown-session", f"no session {exc.args[0]!r}")
        )

    @app.exception_handler(StepMismatchError)
    async def _step(request: Request, exc: StepMismatchError):
        return JSONResponse(status_code=409, content=_error_body("step-mismatch", str(exc)))

    @app.exception_handler(AlreadyCompletedError)
    async def _done(request: Request, exc: AlreadyCompletedError):
        return JSONResponse(status_code=409, content=_error_body("already-completed", str(exc)))

    @app.post("/studies")
    def create_study(config: dict = Body(...)):
        study_id, created = store.create_study(config)
        return JSONResponse(
            status_code=201 if created else 200,
            content={"study_id": study_id, "created": created},
        )

    @app.get("/studies/{study_id}")
    def get_study(study_id: str):
        return store.get_study(study_id)

    @app.post("/studies/{study_id}/sessions", status_code=201)
    def open_session(study_id: str, body: Optional[dict] = Body(None)):
        participant_id = (body or {}).get("participant_id")
        if participant_id is not None and not isinstance(participant_id, str):
            raise ValidationError("participant_id must be a string", ("participant_id",))
        return store.open_session(study_id, participant_id)

    @app.get("/sessions/{session_id}/step")
    def get_step(session_id: str):
        return store.get_step(session_id)

    @app.post("/sessions/{session_id}/responses")
    def submit_response(session_id: str, body: dict = Body(...)):
        validate_payload(body, "response-submission")
        return store.submit_response(session_id, body["step"], body["payload"])

    @app.post("/studies/{study_id}/records")
    def ingest_records(study_id: str, body: dict = Body(...)):
        records = body.get("records")
        if not isinstance(records, list):
            raise ValidationError("body must carry a 'records' array", ("records",))
        count = store.ingest_records(study_id, records)
        return {"ingested": count}

    @app.get("/studies/{study_id}/analysis")
    def get_analysis(
        study_id: str,
        condition: Optional[str] = Query(None),
        dataset: Optional[str] = Query(None),
        attention_pass: str = Query("true"),
        regress: Optional[bool] = Query(None),
        first_n: bool = Query(False),
        seed: int = Query(0),
    ):
        report = store.get_analysis(
            study_id,
            condition=condition,
            dataset=dataset,
            attention_pass=_parse_tristate(attention_pass, "attention_pass"),
            regress=regress,
            first_n=first_n,
            regression_seed=seed,
        )
        return Response(content=report_to_json(report), media_type="application/json")

    @app.get("/studies/{study_id}/export")
    def export(study_id: str, format: str = Query(...)):
        text = store.export_records(study_id, format)
        return Response(content=text, media_type=EXPORT_MEDIA[format])

    return app


def env_settings() -> dict:
    """Runtime configuration from the environment, with documented defaults."""
    return {
        "host": os.environ.get("BELIEFBENCH_HOST", "127.0.0.1"),
        "port": int(os.environ.get("BELIEFBENCH_PORT", "8000")),
        "data_dir": os.environ.get("BELIEFBENCH_DATA_DIR", "./beliefbench-data"),
        "seed": int(os.environ.get("BELIEFBENCH_SEED", "0")),
        "ui_dir": os.environ.get("BELIEFBENCH_UI_DIR"),
    }


def app_from_env() -> FastAPI:
    settings = env_settings()
    return create_app(StudyStore(settings["data_dir"], settings["seed"]), settings["ui_dir"])
