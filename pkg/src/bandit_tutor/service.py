"""Live tutoring service: sessions over HTTP with flat-file persistence.

Each session is persisted as one JSON record (snapshot plus metadata) after
every mutation, written atomically, so a restart resumes every session with
its outstanding recommendation and RNG position intact. Per-session mutations
are serialized with a lock; distinct sessions never contend.
"""

from __future__ import annotations

import json
import os
import secrets
import tempfile
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .curriculum import Curriculum
from .session import Session, SessionError, restore_session, start_session


class SessionStore:
    """Flat-file session records keyed by session id."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def _path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.json"

    def save(self, record: dict) -> None:
        path = self._path(record["session_id"])
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(record, fh)
            os.replace(tmp, path)  # atomic on POSIX
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def load(self, session_id: str) -> dict | None:
        path = self._path(session_id)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))


class CreateSessionBody(BaseModel):
    curriculum_id: str
    section_id: str
    seed: int | None = None


class AnswerBody(BaseModel):
    problem_id: str
    choice_index: int


def create_app(
    curriculum: Curriculum,
    data_dir: str | Path,
    curriculum_id: str = "default",
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service around one loaded curriculum."""
    app = FastAPI(title="bandit-tutor")
    store = SessionStore(data_dir)
    sessions: dict[str, Session] = {}
    meta: dict[str, dict] = {}  # created_at / seed per session

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": "malformed body"})

    def persist(session: Session) -> None:
        m = meta[session.session_id]
        store.save(
            {
                "session_id": session.session_id,
                "curriculum_id": curriculum_id,
                "section_id": session.section_id,
                "created_at": m["created_at"],
                "updated_at": time.time(),
                "seed": m["seed"],
                "snapshot": session.snapshot(),
            }
        )

    def get_session(session_id: str) -> Session | None:
        if session_id in sessions:
            return sessions[session_id]
        record = store.load(session_id)
        if record is None:
            return None
        session = restore_session(record["snapshot"], curriculum)
        sessions[session_id] = session
        meta[session_id] = {
            "created_at": record["created_at"],
            "seed": record["seed"],
        }
        return session

    def not_found() -> JSONResponse:
        return JSONResponse(status_code=404, content={"detail": "unknown session"})

    def elapsed(session_id: str) -> float:
        # Wall clock feeds the memory model's logical seconds.
        return time.time() - meta[session_id]["created_at"]

    @app.get("/api/curriculum")
    def describe_curriculum():
        # Section listing for the UI's section picker; no difficulties, no answers.
        return {
            "curriculum_id": curriculum_id,
            "sections": [
                {"id": s.id, "title": s.title, "concepts": len(s.concept_ids)}
                for s in curriculum.sections
            ],
        }

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if body.curriculum_id != curriculum_id:
            return JSONResponse(
                status_code=404,
                content={"detail": f"unknown curriculum {body.curriculum_id!r}"},
            )
        try:
            curriculum.section(body.section_id)
        except KeyError:
            return JSONResponse(
                status_code=404,
                content={"detail": f"unknown section {body.section_id!r}"},
            )
        seed = body.seed if body.seed is not None else secrets.randbits(32)
        session_id = secrets.token_urlsafe(16)
        session = start_session(
            curriculum, body.section_id, seed=seed, session_id=session_id
        )
        sessions[session_id] = session
        meta[session_id] = {"created_at": time.time(), "seed": seed}
        persist(session)
        return {
            "session_id": session_id,
            "seed": seed,
            "progress": session.progress(),
        }

    @app.get("/api/sessions/{session_id}/next")
    def next_question(session_id: str):
        session = get_session(session_id)
        if session is None:
            return not_found()
        with store.lock(session_id):
            if session.complete:
                return JSONResponse(
                    status_code=409,
                    content={
                        "detail": "session complete",
                        "progress": session.progress(),
                    },
                )
            had_pending = session.pending is not None
            rec = session.next_recommendation(now=elapsed(session_id))
            if not had_pending:
                persist(session)
        return {
            "concept_id": rec.concept_id,
            "problem_id": rec.problem_id,
            "prompt": rec.prompt,
            "choices": list(rec.choices),
        }

    @app.post("/api/sessions/{session_id}/answer")
    def answer(session_id: str, body: AnswerBody):
        session = get_session(session_id)
        if session is None:
            return not_found()
        with store.lock(session_id):
            if session.pending is None or session.pending[1] != body.problem_id:
                return JSONResponse(
                    status_code=409,
                    content={"detail": "no matching outstanding recommendation"},
                )
            problem = curriculum.problems[body.problem_id]
            if not 0 <= body.choice_index < len(problem.choices):
                return JSONResponse(
                    status_code=400,
                    content={"detail": "choice_index out of range"},
                )
            correct = int(body.choice_index == problem.correct_choice)
            try:
                report = session.record_answer(
                    body.problem_id, correct, now=elapsed(session_id)
                )
            except SessionError as exc:
                return JSONResponse(status_code=409, content={"detail": str(exc)})
            persist(session)
        return {
            "correct": bool(correct),
            "problem_mastered": report.problem_mastered,
            "concept_mastered": report.concept_mastered,
            "progress": session.progress(),
            "complete": report.complete,
        }

    @app.get("/api/sessions/{session_id}/state")
    def state(session_id: str):
        session = get_session(session_id)
        if session is None:
            return not_found()
        with store.lock(session_id):
            diagnostics = session.diagnostics()
            diagnostics["seed"] = meta[session_id]["seed"]
            diagnostics["progress"] = session.progress()
        return diagnostics

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
