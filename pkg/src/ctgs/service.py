"""HTTP facade over generation sessions.

JSON over ``/v1``; every error body is ``{"code", "message", "details"}``.
Sessions live in memory with an idle expiry and one lock each, so
concurrent mutations apply in a total order and readers only ever see
committed states.
"""

from __future__ import annotations

import secrets
import threading
import time
from typing import Annotated, Literal, Union

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .decoding import SamplingParams, Session
from .errors import (
    CtgsError,
    DeadEnd,
    FilterParseError,
    IdOutOfRange,
    InvalidFilterParam,
    MissingResource,
    TokenNotAllowed,
    UndoPastBeginning,
    UnknownModel,
    UnknownSession,
    UnknownToken,
)
from .filters import PRESETS, filter_schema, parse_filters

_STATUS: dict[str, int] = {
    UnknownModel.code: 404,
    UnknownSession.code: 404,
    FilterParseError.code: 400,
    InvalidFilterParam.code: 400,
    MissingResource.code: 400,
    IdOutOfRange.code: 400,
    UnknownToken.code: 400,
    TokenNotAllowed.code: 409,
    DeadEnd.code: 409,
    UndoPastBeginning.code: 409,
}

DEFAULT_SESSION_TTL = 3600.0


class ModelRegistry:
    """Label -> language model (each model is bound to its catalog)."""

    def __init__(self):
        self._models: dict[str, object] = {}

    def register(self, label: str, model) -> None:
        self._models[label] = model

    def get(self, label: str):
        if label not in self._models:
            raise UnknownModel(label)
        return self._models[label]

    def labels(self) -> list[str]:
        return sorted(self._models)


class CreateSessionRequest(BaseModel, extra="forbid"):
    model: str
    filters: list[str] = []
    sampling: str = "greedy"
    seed: int = 0


class AcceptAction(BaseModel, extra="forbid"):
    type: Literal["accept"]
    token_id: int | None = None
    token: str | None = None
    forced: bool = False


class GenerateAction(BaseModel, extra="forbid"):
    type: Literal["generate"]
    n: int = Field(1, ge=1)
    backtrack: int = Field(0, ge=0)


class UndoAction(BaseModel, extra="forbid"):
    type: Literal["undo"]
    steps: int = Field(1, ge=1)


class SetFiltersAction(BaseModel, extra="forbid"):
    type: Literal["set_filters"]
    filters: list[str]


Action = Annotated[
    Union[AcceptAction, GenerateAction, UndoAction, SetFiltersAction],
    Field(discriminator="type"),
]


class ActionRequest(BaseModel, extra="forbid"):
    action: Action


class _Entry:
    def __init__(self, session: Session, model_label: str, session_id: str):
        self.session = session
        self.model_label = model_label
        self.session_id = session_id
        self.lock = threading.Lock()
        self.last_used = time.monotonic()


def _error_response(code: str, message: str, details: dict, status: int) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details},
    )


def create_app(registry: ModelRegistry, session_ttl: float = DEFAULT_SESSION_TTL) -> FastAPI:
    app = FastAPI(title="ctgs studio service", version="1")
    # local, unauthenticated writing tool; let a separately-served UI talk to it
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, _Entry] = {}
    sessions_lock = threading.Lock()

    @app.exception_handler(CtgsError)
    async def _domain_error(request: Request, exc: CtgsError):
        return _error_response(
            exc.code, str(exc), exc.details(), _STATUS.get(exc.code, 400)
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return _error_response(
            "validation_error", "invalid request", {"errors": exc.errors()}, 422
        )

    def _sweep() -> None:
        now = time.monotonic()
        with sessions_lock:
            stale = [k for k, e in sessions.items() if now - e.last_used > session_ttl]
            for k in stale:
                del sessions[k]

    def _entry(session_id: str) -> _Entry:
        _sweep()
        with sessions_lock:
            entry = sessions.get(session_id)
            if entry is None:
                raise UnknownSession(session_id)
            entry.last_used = time.monotonic()
            return entry

    def _descriptor(entry: _Entry) -> dict:
        s = entry.session
        return {
            "session_id": entry.session_id,
            "model": entry.model_label,
            "filters": s.filter_items(),
            "context_text": s.rendered_context(),
            "context_ids": list(s.context),
            "allowed_count": s.allowed_count(),
            "undo_depth": len(s.history),
        }

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "models": registry.labels()}

    @app.get("/v1/filters")
    def filters():
        return {
            "filters": filter_schema(),
            "presets": {name: list(items) for name, items in PRESETS.items()},
        }

    @app.post("/v1/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        model = registry.get(req.model)
        specs = parse_filters(req.filters)
        sampling = _parse_sampling(req.sampling)
        session = Session(
            model.catalog, model, filters=specs, sampling=sampling, seed=req.seed
        )
        entry = _Entry(session, req.model, secrets.token_urlsafe(16))
        _sweep()
        with sessions_lock:
            sessions[entry.session_id] = entry
        return _descriptor(entry)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        entry = _entry(session_id)
        with entry.lock:
            return _descriptor(entry)

    @app.get("/v1/sessions/{session_id}/continuations")
    def continuations(session_id: str, m: int = 10):
        if m < 1:
            raise InvalidFilterParam("m must be >= 1")
        entry = _entry(session_id)
        with entry.lock:
            s = entry.session
            ranked = s.list_continuations(m)
            entries = []
            for token_id, prob in ranked:
                f = s.catalog.features_of(token_id)
                entries.append(
                    {
                        "token_id": token_id,
                        "surface": f.surface,
                        "probability": prob,
                        "features": {
                            "length": f.length,
                            "syllables": f.syllables,
                            "stress": f.stress_pattern,
                            "rhyme_key": " ".join(f.rhyme_key) if f.rhyme_key else None,
                        },
                    }
                )
            return {
                "allowed_count": s.allowed_count(),
                "entries": entries,
            }

    @app.post("/v1/sessions/{session_id}/actions")
    def mutate(session_id: str, req: ActionRequest):
        entry = _entry(session_id)
        action = req.action
        with entry.lock:
            s = entry.session
            if isinstance(action, AcceptAction):
                token_id = action.token_id
                if token_id is None:
                    if action.token is None:
                        raise InvalidFilterParam("accept needs token_id or token")
                    token_id = s.catalog.id_of(action.token)
                    if token_id is None:
                        raise UnknownToken(action.token)
                s.accept(int(token_id), user_forced=action.forced)
            elif isinstance(action, GenerateAction):
                s.generate(action.n, action.backtrack)
            elif isinstance(action, UndoAction):
                s.undo(action.steps)
            else:
                s.set_filters(parse_filters(action.filters))
            return _descriptor(entry)

    @app.delete("/v1/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        with sessions_lock:
            if session_id not in sessions:
                raise UnknownSession(session_id)
            del sessions[session_id]

    return app


def _parse_sampling(text: str) -> SamplingParams:
    try:
        return SamplingParams.parse(text)
    except ValueError as e:
        raise InvalidFilterParam(str(e)) from None
