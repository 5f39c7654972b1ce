"""Session-oriented JSON-over-HTTP API for live interview entry.

The service holds no math of its own: every response is recomputed from
the session's append-only event log through the dataset, survival, crc,
and planner modules, so replaying a log offline reproduces served state
exactly.  One JSON-lines file per session is the ground truth; undo is
itself an appended record.

Interviews are entered either with explicit code ids or as a bare count
of new codes.  Counts are enough for the saturation curve, which only
needs the zero/nonzero pattern, but capture-recapture needs identities;
count entries get placeholder ids and flag the CRC series as degraded.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from . import crc as crc_mod
from . import planner, survival
from .dataset import (
    DataError,
    ElicitationMatrix,
    InterviewSequence,
    derive_sequence,
    matrix_to_wide_csv,
)

__all__ = ["create_app", "SessionStore", "SessionState", "state_doc"]

ENTRY_MODE_CODES = "codes"
ENTRY_MODE_COUNT = "count"

STOPPING_RULES = (
    planner.StoppingRule.first_zero(),
    planner.StoppingRule.consecutive_zero(3),
    planner.StoppingRule.ten_plus_three(),
)


class ApiError(Exception):
    """Error reported to the client as JSON {code, message}."""

    def __init__(self, status_code: int, code: str, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.code = code
        self.message = message


def not_found(session_id: str) -> ApiError:
    return ApiError(404, "not_found", f"unknown session {session_id!r}")


def conflict(message: str) -> ApiError:
    return ApiError(409, "conflict", message)


def validation_error(message: str) -> ApiError:
    return ApiError(422, "validation_error", message)


@dataclass(frozen=True, slots=True)
class LogEntry:
    """One appended interview: explicit code ids or a bare new-code count."""

    interview_id: str
    code_ids: tuple[str, ...] | None = None
    new_codes: int | None = None

    @property
    def mode(self) -> str:
        return ENTRY_MODE_CODES if self.code_ids is not None else ENTRY_MODE_COUNT


@dataclass(frozen=True, slots=True)
class SessionState:
    session_id: str
    name: str
    alpha: float
    created_at: str
    entries: tuple[LogEntry, ...]


def build_matrix(entries: tuple[LogEntry, ...]) -> ElicitationMatrix | None:
    """Assemble the elicitation matrix the log describes, None when empty.

    Count entries contribute placeholder ids unique to their interview,
    so they are always first elicitations and never recaptures.
    """
    if not entries:
        return None
    interviews = []
    codes: list[str] = []
    per_seq: list[set[str]] = []
    for seq, entry in enumerate(entries, start=1):
        interviews.append((entry.interview_id, seq))
        if entry.code_ids is not None:
            here = list(dict.fromkeys(entry.code_ids))
        else:
            here = [f"auto:{seq}:{i}" for i in range(1, entry.new_codes + 1)]
        per_seq.append(set(here))
        for code in here:
            if code not in codes:
                codes.append(code)
    elicited = [[1 if code in here else 0 for code in codes] for here in per_seq]
    return ElicitationMatrix.build(interviews, codes, elicited)


def state_doc(state: SessionState) -> dict:
    """Full JSON state for a session, recomputed from its log entries."""
    matrix = build_matrix(state.entries)
    crc_degraded = any(e.mode == ENTRY_MODE_COUNT for e in state.entries)

    doc: dict = {
        "session_id": state.session_id,
        "name": state.name,
        "alpha": state.alpha,
        "created_at": state.created_at,
        "crc_degraded": crc_degraded,
        "interviews": [],
        "new_codes": [],
        "curve": None,
        "crc": [],
        "stopping_rules": {rule.label(): {"stopped": False, "stop_seq": None} for rule in STOPPING_RULES},
    }
    if matrix is None:
        return doc

    sequence = derive_sequence(matrix)
    curve = survival.km_estimate(sequence, alpha=state.alpha)
    summary = survival.saturation_summary(curve)
    series = crc_mod.per_interview_series(matrix)

    doc["interviews"] = [
        {
            "seq": seq,
            "interview_id": entry.interview_id,
            "mode": entry.mode,
            "code_ids": sorted(matrix.codes_at(seq)),
            "new_codes": sequence.new_codes[seq - 1],
        }
        for seq, entry in enumerate(state.entries, start=1)
    ]
    doc["new_codes"] = list(sequence.new_codes)
    doc["curve"] = survival.curve_to_json_dict(curve, summary)
    doc["crc"] = crc_mod.series_to_json_list(series)
    doc["stopping_rules"] = {}
    for rule in STOPPING_RULES:
        decision = planner.apply_rule(sequence, rule)
        doc["stopping_rules"][rule.label()] = {
            "stopped": decision.stopped,
            "stop_seq": decision.stop_seq,
        }
    return doc


class SessionStore:
    """JSON-lines event log per session, replayed on every read.

    Mutations on one session are serialized by a per-session lock;
    different sessions never contend.
    """

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.jsonl"

    def create(self, name: str, alpha: float) -> SessionState:
        session_id = uuid.uuid4().hex
        record = {
            "type": "created",
            "session_id": session_id,
            "name": name,
            "alpha": alpha,
            "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        with self.path(session_id).open("x", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")
        return self.load(session_id)

    def load(self, session_id: str) -> SessionState:
        path = self.path(session_id)
        if not path.exists():
            raise not_found(session_id)
        entries: list[LogEntry] = []
        meta: dict | None = None
        with path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                kind = record["type"]
                if kind == "created":
                    meta = record
                elif kind == "append":
                    code_ids = record.get("code_ids")
                    entries.append(
                        LogEntry(
                            interview_id=record["interview_id"],
                            code_ids=tuple(code_ids) if code_ids is not None else None,
                            new_codes=record.get("new_codes"),
                        )
                    )
                elif kind == "undo":
                    if not entries:
                        raise ValueError(f"corrupt log {path}: undo with nothing to undo")
                    entries.pop()
                else:
                    raise ValueError(f"corrupt log {path}: unknown record type {kind!r}")
        if meta is None:
            raise ValueError(f"corrupt log {path}: missing created record")
        return SessionState(
            session_id=meta["session_id"],
            name=meta["name"],
            alpha=meta["alpha"],
            created_at=meta["created_at"],
            entries=tuple(entries),
        )

    def _append_record(self, session_id: str, record: dict) -> None:
        with self.path(session_id).open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")
            fh.flush()

    def append(self, session_id: str, entry: LogEntry) -> SessionState:
        with self.lock(session_id):
            state = self.load(session_id)
            if any(e.interview_id == entry.interview_id for e in state.entries):
                raise conflict(f"duplicate interview_id {entry.interview_id!r}")
            record: dict = {"type": "append", "interview_id": entry.interview_id}
            if entry.code_ids is not None:
                record["code_ids"] = list(entry.code_ids)
            else:
                record["new_codes"] = entry.new_codes
            self._append_record(session_id, record)
            return self.load(session_id)

    def undo(self, session_id: str) -> SessionState:
        with self.lock(session_id):
            state = self.load(session_id)
            if not state.entries:
                raise conflict("nothing to undo: session has no interviews")
            self._append_record(session_id, {"type": "undo"})
            return self.load(session_id)


class CreateSessionBody(BaseModel):
    name: str = ""
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)


class AppendInterviewBody(BaseModel):
    interview_id: str = Field(min_length=1)
    code_ids: list[str] | None = None
    new_codes: int | None = Field(default=None, ge=0)


class WhatIfBody(BaseModel):
    pattern: list[int] = Field(default_factory=list)
    methods: list[str] | None = None
    rule_k: int = Field(default=3, ge=1)


def create_app(data_dir: str | Path) -> FastAPI:
    """Build the HTTP application over a session directory."""
    store = SessionStore(Path(data_dir))
    app = FastAPI(title="satkm session service", docs_url=None, redoc_url=None)
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status_code, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        message = "; ".join(
            ".".join(str(part) for part in err["loc"]) + ": " + err["msg"] for err in exc.errors()
        )
        return JSONResponse(status_code=422, content={"code": "validation_error", "message": message})

    @app.exception_handler(DataError)
    async def handle_data_error(request: Request, exc: DataError):
        return JSONResponse(status_code=422, content={"code": "data_error", "message": str(exc)})

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        state = store.create(body.name, body.alpha)
        return state_doc(state)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return state_doc(store.load(session_id))

    @app.post("/api/sessions/{session_id}/interviews")
    def append_interview(session_id: str, body: AppendInterviewBody):
        if (body.code_ids is None) == (body.new_codes is None):
            raise validation_error("provide exactly one of code_ids or new_codes")
        if body.code_ids is not None:
            seen: list[str] = []
            for code in body.code_ids:
                code = code.strip()
                if not code:
                    raise validation_error("empty code id")
                if code.startswith("auto:"):
                    raise validation_error(
                        f"code id {code!r} uses the reserved auto: prefix for count-entry placeholders"
                    )
                if code not in seen:
                    seen.append(code)
            entry = LogEntry(interview_id=body.interview_id, code_ids=tuple(seen))
        else:
            entry = LogEntry(interview_id=body.interview_id, new_codes=body.new_codes)
        return state_doc(store.append(session_id, entry))

    @app.post("/api/sessions/{session_id}/undo")
    def undo_last(session_id: str):
        return state_doc(store.undo(session_id))

    @app.post("/api/sessions/{session_id}/whatif")
    def whatif(session_id: str, body: WhatIfBody):
        state = store.load(session_id)
        for v in body.pattern:
            if v not in (0, 1):
                raise validation_error(f"non-binary token {v!r} in pattern")
        realized: tuple[int, ...] = ()
        matrix = build_matrix(state.entries)
        if matrix is not None:
            realized = derive_sequence(matrix).events()
        combined = realized + tuple(body.pattern)
        if not combined:
            raise validation_error("empty projection: session has no interviews and pattern is empty")
        methods = tuple(body.methods) if body.methods is not None else (
            planner.METHOD_EXTRAPOLATION,
            planner.METHOD_RULE_COMPLETION,
        )
        try:
            row = planner.scenario_eval(combined, alpha=state.alpha, methods=methods, rule_k=body.rule_k)
        except ValueError as exc:
            raise validation_error(str(exc)) from exc
        doc = planner.scenario_to_json_dict(row)
        doc["realized_interviews"] = len(realized)
        doc["hypothetical_interviews"] = len(body.pattern)
        # Clients draw the projection themselves, so ship the projected
        # curve; an empty pattern therefore echoes the realized curve.
        projected = survival.km_estimate(InterviewSequence(new_codes=combined), alpha=state.alpha)
        doc["curve"] = survival.curve_to_json_dict(projected, survival.saturation_summary(projected))
        return doc

    @app.get("/api/sessions/{session_id}/export")
    def export_session(session_id: str, format: str = "json"):
        state = store.load(session_id)
        if format == "json":
            return state_doc(state)
        if format == "csv":
            matrix = build_matrix(state.entries)
            if matrix is None:
                csv_text = "interview_id,seq\n"
            else:
                csv_text = matrix_to_wide_csv(matrix)
            return Response(content=csv_text, media_type="text/csv")
        raise validation_error(f"unknown export format {format!r}: use csv or json")

    return app
