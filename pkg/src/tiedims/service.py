"""HTTP service for human relationship-labeling sessions.

A participant labels up to ten friends, one at a time, across all ten
relationship dimensions. Every accepted label is appended to a single
line-delimited log file before the session cursor advances, so a restart
replays the log and resumes exactly where each session stood.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .dimensions import DIMENSION_PROMPTS, DIMENSIONS
from .errors import ConflictError, NotFoundError, ToolkitError

MAX_FRIENDS = 10


class ValidationError(ToolkitError):
    """Malformed request payload."""


@dataclass
class Session:
    session_id: str
    participant_id: str
    queue: list[str]
    cursor: int = 0
    created: float = 0.0
    truncated: bool = False

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.queue)


def _validate_dimensions(payload: object) -> dict[str, dict]:
    """Check a per-dimension applicability mapping; returns it normalized."""
    if not isinstance(payload, dict):
        raise ValidationError("'dimensions' must be an object")
    if set(payload) != set(DIMENSIONS):
        missing = sorted(set(DIMENSIONS) - set(payload))
        extra = sorted(set(payload) - set(DIMENSIONS))
        parts = []
        if missing:
            parts.append(f"missing: {', '.join(missing)}")
        if extra:
            parts.append(f"unknown: {', '.join(extra)}")
        raise ValidationError(f"labels must cover exactly the ten dimensions ({'; '.join(parts)})")
    out: dict[str, dict] = {}
    for dim in DIMENSIONS:  # canonical order in the stored record
        entry = payload[dim]
        if not isinstance(entry, dict) or not isinstance(entry.get("applies"), bool):
            raise ValidationError(f"{dim}: entry must be an object with boolean 'applies'")
        applies = entry["applies"]
        intensity = entry.get("intensity")
        if applies:
            if intensity is not None and (
                not isinstance(intensity, int) or not 1 <= intensity <= 5
            ):
                raise ValidationError(f"{dim}: intensity must be an integer in [1, 5]")
        elif intensity is not None:
            raise ValidationError(f"{dim}: intensity only allowed when the dimension applies")
        rec = {"applies": applies}
        if applies and intensity is not None:
            rec["intensity"] = intensity
        out[dim] = rec
    return out


class LabelStore:
    """Sessions and labels backed by one append-only line-delimited log.

    Mutations are serialized under a lock; each accepted submission is
    written and flushed to the log before the in-memory cursor moves, which
    makes crash-restart replay exact.
    """

    def __init__(self, log_path: str | Path):
        self._path = Path(log_path)
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._labels: list[dict] = []  # global submission order
        self._replay()

    def _replay(self) -> None:
        if not self._path.exists():
            return
        with open(self._path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                if rec["kind"] == "session":
                    self._sessions[rec["session_id"]] = Session(
                        session_id=rec["session_id"],
                        participant_id=rec["participant_id"],
                        queue=list(rec["friends"]),
                        created=rec["created"],
                        truncated=rec.get("truncated", False),
                    )
                elif rec["kind"] == "label":
                    self._labels.append(rec)
                    session = self._sessions.get(rec["session_id"])
                    if session is not None:
                        session.cursor += 1

    def _append(self, rec: dict) -> None:
        with open(self._path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def create_session(self, participant_id: str, friends: list[str]) -> Session:
        if not participant_id or not isinstance(participant_id, str):
            raise ValidationError("participant_id must be a non-empty string")
        if not isinstance(friends, list) or not all(
            isinstance(f, str) and f for f in friends
        ):
            raise ValidationError("friends must be a list of non-empty strings")
        deduped: list[str] = []
        for f in friends:
            if f not in deduped:
                deduped.append(f)
        if not deduped:
            raise ValidationError("friend list must not be empty")
        truncated = len(deduped) > MAX_FRIENDS
        queue = deduped[:MAX_FRIENDS]
        with self._lock:
            session = Session(
                session_id=uuid.uuid4().hex,
                participant_id=participant_id,
                queue=queue,
                created=time.time(),
                truncated=truncated,
            )
            self._append({
                "kind": "session",
                "session_id": session.session_id,
                "participant_id": session.participant_id,
                "friends": session.queue,
                "created": session.created,
                "truncated": session.truncated,
            })
            self._sessions[session.session_id] = session
            return session

    def get_session(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise NotFoundError(f"unknown session {session_id!r}") from None

    def next_pair(self, session_id: str) -> dict:
        """Current friend to label, without advancing; done marker at the end."""
        session = self.get_session(session_id)
        if session.done:
            return {"done": True, "position": session.cursor, "total": len(session.queue)}
        return {
            "done": False,
            "friend_id": session.queue[session.cursor],
            "position": session.cursor,
            "total": len(session.queue),
            "dimensions": [
                {"name": d, "description": DIMENSION_PROMPTS[d]} for d in DIMENSIONS
            ],
        }

    def submit_label(self, session_id: str, friend_id: str, dimensions: object) -> dict:
        """Validate, persist and acknowledge one label; compare-and-advance."""
        clean = _validate_dimensions(dimensions)
        with self._lock:
            session = self.get_session(session_id)
            if session.done:
                raise ConflictError("session already complete")
            expected = session.queue[session.cursor]
            if friend_id != expected:
                raise ConflictError(
                    f"expected a label for {expected!r}, got {friend_id!r}"
                )
            rec = {
                "kind": "label",
                "session_id": session.session_id,
                "participant_id": session.participant_id,
                "friend_id": friend_id,
                "dimensions": clean,
                "submitted_at": time.time(),
                "seq": len(self._labels),
            }
            self._append(rec)
            self._labels.append(rec)
            session.cursor += 1
            return {"remaining": len(session.queue) - session.cursor}

    def export_labels(
        self, participant: str | None = None, session: str | None = None
    ) -> Iterator[str]:
        """Label records as JSON lines, in global submission order."""
        for rec in self._labels:
            if participant is not None and rec["participant_id"] != participant:
                continue
            if session is not None and rec["session_id"] != session:
                continue
            out = {k: v for k, v in rec.items() if k != "kind"}
            yield json.dumps(out, sort_keys=True)


def create_app(store: LabelStore):
    """FastAPI app exposing the labeling session API over the given store."""
    from fastapi import FastAPI, Request
    from fastapi.exceptions import RequestValidationError
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import JSONResponse, PlainTextResponse

    app = FastAPI(title="relationship labeling service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def _body_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(ValidationError)
    async def _validation(request: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(ConflictError)
    async def _conflict(request: Request, exc: ConflictError):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict):
        session = store.create_session(
            participant_id=body.get("participant_id", ""),
            friends=body.get("friends", []),
        )
        resp = {
            "session_id": session.session_id,
            "participant_id": session.participant_id,
            "queue": session.queue,
        }
        if session.truncated:
            resp["warning"] = f"friend list truncated to {MAX_FRIENDS}"
        return resp

    @app.get("/sessions/{session_id}/next")
    async def next_pair(session_id: str):
        return store.next_pair(session_id)

    @app.post("/sessions/{session_id}/labels")
    async def submit_label(session_id: str, body: dict):
        friend_id = body.get("friend_id")
        if not isinstance(friend_id, str) or not friend_id:
            raise ValidationError("friend_id must be a non-empty string")
        return store.submit_label(session_id, friend_id, body.get("dimensions"))

    @app.get("/labels/export")
    async def export_labels(participant: str | None = None, session: str | None = None):
        lines = list(store.export_labels(participant=participant, session=session))
        body = "\n".join(lines) + ("\n" if lines else "")
        return PlainTextResponse(body, media_type="application/x-ndjson")

    return app


def serve(log_path: str | Path, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the annotation service until interrupted."""
    import uvicorn

    store = LabelStore(log_path)
    uvicorn.run(create_app(store), host=host, port=port, log_level="info")
