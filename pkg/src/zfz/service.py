"""Session-oriented HTTP service for the studio UI.

Endpoints (JSON unless noted):

    POST   /sessions                     -> {"session_id": id}
    GET    /sessions                     -> {"sessions": [id, ...]}
    POST   /sessions/{id}/model          body: ZFZ text -> model summary | 422
    POST   /sessions/{id}/run            {"script": str, "mode": "full"|"single"}
    GET    /sessions/{id}/scene?view=x,y,z&detail=attributes|meshes  (text payload)
    GET    /sessions/{id}/messages?since=<seq>
    GET    /sessions/{id}/variables
    DELETE /sessions/{id}

Sessions are in-memory and process-local. Statement execution is serialized
per session; reads are idempotent and never advance the scene generation.
Scripts may not read the server filesystem: LOAD accepts ``uploaded:<name>``
for uploaded models, and a bare path is redirected (with a notice) to the
most recently uploaded model so batch scripts run unchanged.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .diagnostics import Diagnostic, FatalError, notice
from .model import FiberModel, parse_model
from .render import DEFAULT_VIEW, emit_snapshot, serialize_snapshot
from .script import parse_script
from .state import FiberSetVal, LogEntry, ModelHandleVal, ScalarVal, Session
from .interpreter import execute_script

UPLOAD_PREFIX = "uploaded:"


@dataclass
class SessionRuntime:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    uploads: dict[str, FiberModel] = field(default_factory=dict)
    last_upload: str | None = None

    def __post_init__(self):
        self.session.load_resolver = self._resolve_load

    def _resolve_load(self, path: str) -> tuple[FiberModel, list[Diagnostic]]:
        if path.startswith(UPLOAD_PREFIX):
            name = path[len(UPLOAD_PREFIX):]
            model = self.uploads.get(name)
            if model is None:
                raise FatalError(f"unknown uploaded model {name!r}")
            return model, []
        if self.last_upload is not None:
            return self.uploads[self.last_upload], [
                notice(f"path {path!r} redirected to uploaded model {self.last_upload!r}")
            ]
        raise FatalError(
            "filesystem paths are not available in service sessions; upload a model first"
        )


class Registry:
    def __init__(self):
        self._sessions: dict[str, SessionRuntime] = {}
        self._lock = threading.Lock()

    def create(self) -> str:
        sid = secrets.token_hex(16)
        with self._lock:
            self._sessions[sid] = SessionRuntime(session=Session())
        return sid

    def get(self, sid: str) -> SessionRuntime:
        with self._lock:
            runtime = self._sessions.get(sid)
        if runtime is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return runtime

    def drop(self, sid: str):
        with self._lock:
            if sid not in self._sessions:
                raise HTTPException(status_code=404, detail="unknown session")
            del self._sessions[sid]

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._sessions)


class RunRequest(BaseModel):
    script: str
    mode: str = "full"


def _entry_json(entry: LogEntry) -> dict:
    return {
        "seq": entry.seq,
        "generation": entry.generation,
        "level": entry.kind,
        "text": entry.text,
        "line": entry.line,
        "column": entry.column,
        "name": entry.name,
        "value": entry.value,
    }


def _parse_view(text: str | None):
    if text is None:
        return DEFAULT_VIEW
    parts = text.split(",")
    if len(parts) != 3:
        raise HTTPException(status_code=400, detail="view must be x,y,z")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise HTTPException(status_code=400, detail="view must be numeric") from None


def create_app() -> FastAPI:
    app = FastAPI(title="zfz session service")
    registry = Registry()
    app.state.registry = registry

    @app.post("/sessions", status_code=201)
    def create_session():
        return {"session_id": registry.create()}

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": registry.ids()}

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        registry.drop(sid)
        return Response(status_code=204)

    @app.post("/sessions/{sid}/model")
    async def upload_model(sid: str, request: Request):
        runtime = registry.get(sid)
        payload = (await request.body()).decode("utf-8", errors="replace")
        try:
            model, warnings = parse_model(payload)
        except FatalError as err:
            raise HTTPException(status_code=422, detail={
                "message": err.diagnostic.message,
                "line": err.diagnostic.line,
            }) from None
        with runtime.lock:
            name = f"model{len(runtime.uploads) + 1}"
            runtime.uploads[name] = model
            runtime.last_upload = name
        return {
            "name": name,
            "load_path": UPLOAD_PREFIX + name,
            "fibers": len(model.fibers),
            "bundles": sorted(model.bundles),
            "bounds": {"lo": model.bounds.lo, "hi": model.bounds.hi},
            "warnings": [d.render() for d in warnings],
        }

    @app.post("/sessions/{sid}/run")
    def run_script(sid: str, req: RunRequest):
        runtime = registry.get(sid)
        if req.mode not in ("full", "single"):
            raise HTTPException(status_code=400, detail="mode must be 'full' or 'single'")
        if req.mode == "full" and not req.script.strip():
            raise HTTPException(status_code=400, detail="full mode requires a non-empty script")
        with runtime.lock:
            session = runtime.session
            if req.mode == "full":
                # Fresh-script semantics: a script fully describes the state.
                session.env = {}
                session.reset_view_state()
            outcome = execute_script(parse_script(req.script), session)
        return {
            "statements_run": outcome.statements_run,
            "halted_at": outcome.halted_at,
            "scene_dirty": outcome.scene_dirty,
            "generation": outcome.generation,
            "messages": [_entry_json(e) for e in outcome.messages],
        }

    @app.get("/sessions/{sid}/scene")
    def get_scene(sid: str, view: str | None = None, detail: str = "attributes"):
        runtime = registry.get(sid)
        if detail not in ("attributes", "meshes"):
            raise HTTPException(status_code=400, detail="detail must be 'attributes' or 'meshes'")
        view_vec = _parse_view(view)
        with runtime.lock:
            if runtime.session.model is None:
                raise HTTPException(status_code=409, detail="no model loaded")
            try:
                snap = emit_snapshot(runtime.session, view_vec, include_meshes=detail == "meshes")
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
        return PlainTextResponse(serialize_snapshot(snap))

    @app.get("/sessions/{sid}/messages")
    def get_messages(sid: str, since: int = 0):
        runtime = registry.get(sid)
        with runtime.lock:
            entries = [e for e in runtime.session.messages if e.seq > since]
            return {"messages": [_entry_json(e) for e in entries]}

    @app.get("/sessions/{sid}/variables")
    def get_variables(sid: str):
        runtime = registry.get(sid)
        out = []
        with runtime.lock:
            for name in sorted(runtime.session.env):
                binding = runtime.session.env[name]
                if isinstance(binding, ScalarVal):
                    out.append({"name": name, "kind": "scalar", "value": binding.value})
                elif isinstance(binding, FiberSetVal):
                    out.append({"name": name, "kind": "fiber_set", "size": len(binding.ids),
                                "ids": sorted(binding.ids)})
                elif isinstance(binding, ModelHandleVal):
                    out.append({"name": name, "kind": "model_handle", "path": binding.name})
        return {"variables": out}

    return app
