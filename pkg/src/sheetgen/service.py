"""HTTP facade over the component repository.

Stateless except for the download-token store: instantiation responses
hand out an opaque token whose bytes can be fetched until the TTL runs
out. All bodies are JSON apart from the TSV download itself; errors use
a uniform {"error": ..., "details": [...]} envelope.
"""

from __future__ import annotations

import logging
import re
import secrets
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import HTMLResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .cells import parse_a1
from .docs import render_docs
from .errors import FormatError, ParamFailure, SheetgenError, StageError
from .evaluator import EvalConfig, evaluate
from .grid import overlay
from .gridio import emit_json, emit_tsv, grid_from_obj, grid_to_obj, values_to_obj
from .repo import scan
from .template import ComponentTemplate, instantiate

log = logging.getLogger("sheetgen.service")

_ID_RE = re.compile(r"[a-z0-9][a-z0-9_-]*$")

MEDIA_TYPES = {
    "tsv": "text/tab-separated-values; charset=utf-8",
    "json": "application/json",
}


@dataclass
class _Download:
    data: bytes
    media_type: str
    filename: str
    expires_at: float


class TokenStore:
    def __init__(self, ttl: float):
        self.ttl = ttl
        self._lock = threading.Lock()
        self._items: dict[str, _Download] = {}

    def put(self, data: bytes, media_type: str, filename: str) -> tuple[str, float]:
        token = secrets.token_hex(16)
        expires_at = time.monotonic() + self.ttl
        with self._lock:
            self._items[token] = _Download(data, media_type, filename, expires_at)
        return token, self.ttl

    def get(self, token: str) -> _Download | None | str:
        """The download, None when unknown, or "expired"."""
        now = time.monotonic()
        with self._lock:
            expired = [t for t, d in self._items.items() if d.expires_at <= now and t != token]
            for t in expired:
                del self._items[t]
            item = self._items.get(token)
            if item is None:
                return None
            if item.expires_at <= now:
                del self._items[token]
                return "expired"
            return item


class InstantiateRequest(BaseModel):
    bindings: dict[str, str] = Field(default_factory=dict)
    format: str = "tsv"


class ApplyRequest(BaseModel):
    bindings: dict[str, str] = Field(default_factory=dict)
    grid: dict


class EvalOverride(BaseModel):
    ref: str
    value: float | str | None = None


class EvalRequest(BaseModel):
    grid: dict
    seed: int = 0
    overrides: list[EvalOverride] = Field(default_factory=list)


def _error(status: int, message: str, details: list | None = None) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message, "details": details or []})


def _param_details(exc: ParamFailure) -> list[dict]:
    return [{"param": e.param, "code": e.code, "message": e.message} for e in exc.errors]


def create_app(templates_dir: Path, token_ttl: float = 3600.0, ui_dir: Path | None = None) -> FastAPI:
    templates_list, problems = scan(templates_dir)
    for name, message in problems:
        log.warning("skipping malformed bundle %s: %s", name, message)
    templates: dict[str, ComponentTemplate] = {t.id: t for t in templates_list}

    app = FastAPI(title="sheetgen component repository")
    store = TokenStore(token_ttl)

    def lookup(component_id: str) -> ComponentTemplate | JSONResponse:
        if not _ID_RE.fullmatch(component_id):
            return _error(400, f"invalid component id {component_id!r}")
        template = templates.get(component_id)
        if template is None:
            return _error(404, f"no component {component_id!r}")
        return template

    @app.get("/api/components")
    def list_components():
        return [
            {"id": t.id, "title": t.title, "summary": t.summary}
            for t in sorted(templates.values(), key=lambda t: t.id)
        ]

    @app.get("/api/components/{component_id}")
    def get_component(component_id: str):
        template = lookup(component_id)
        if isinstance(template, JSONResponse):
            return template
        return {
            "id": template.id,
            "title": template.title,
            "summary": template.summary,
            "docs_url": f"/api/components/{template.id}/docs",
            "params": [
                {
                    "name": p.name,
                    "kind": p.kind,
                    "label": p.label,
                }
                for p in template.params
            ],
            "example_bindings": template.example_bindings,
            "example_inputs": template.example_inputs,
        }

    @app.get("/api/components/{component_id}/docs")
    def component_docs(component_id: str):
        template = lookup(component_id)
        if isinstance(template, JSONResponse):
            return template
        return HTMLResponse(render_docs(template.source, title=template.title))

    @app.post("/api/components/{component_id}/instantiate")
    def instantiate_component(component_id: str, request: InstantiateRequest):
        template = lookup(component_id)
        if isinstance(template, JSONResponse):
            return template
        if request.format not in MEDIA_TYPES:
            return _error(400, f"unknown format {request.format!r}")
        try:
            grid = instantiate(template, request.bindings)
        except ParamFailure as exc:
            return _error(422, "invalid parameters", _param_details(exc))
        except StageError as exc:
            return _error(422, "instantiation failed", [str(exc)])
        data = (emit_tsv(grid) if request.format == "tsv" else emit_json(grid)).encode("utf-8")
        token, ttl = store.put(data, MEDIA_TYPES[request.format], f"{template.id}.{request.format}")
        return {
            "token": token,
            "download_url": f"/api/downloads/{token}",
            "expires_in": ttl,
            "size_bytes": len(data),
        }

    @app.get("/api/downloads/{token}")
    def download(token: str):
        item = store.get(token)
        if item is None:
            return _error(404, "unknown download token")
        if item == "expired":
            return _error(410, "download token has expired")
        return Response(
            content=item.data,
            media_type=item.media_type,
            headers={"Content-Disposition": f'attachment; filename="{item.filename}"'},
        )

    @app.post("/api/components/{component_id}/apply")
    def apply_component(component_id: str, request: ApplyRequest):
        template = lookup(component_id)
        if isinstance(template, JSONResponse):
            return template
        try:
            caller_grid = grid_from_obj(request.grid)
        except FormatError as exc:
            return _error(400, f"bad grid: {exc}")
        try:
            patch = instantiate(template, request.bindings)
        except ParamFailure as exc:
            return _error(422, "invalid parameters", _param_details(exc))
        except StageError as exc:
            return _error(422, "instantiation failed", [str(exc)])
        merged, collisions = overlay(caller_grid, patch)
        if collisions:
            return _error(409, "cells already populated", [str(addr) for addr in collisions])
        return grid_to_obj(merged)

    @app.post("/api/eval")
    def eval_grid(request: EvalRequest):
        try:
            grid = grid_from_obj(request.grid)
        except FormatError as exc:
            return _error(400, f"bad grid: {exc}")
        overrides = []
        for override in request.overrides:
            try:
                addr = parse_a1(override.ref)
            except ValueError as exc:
                return _error(400, str(exc))
            if not addr.sheet:
                return _error(400, f"override {override.ref!r} needs a sheet prefix")
            value = override.value
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                value = float(value)
            overrides.append((addr, value))
        try:
            values = evaluate(grid, EvalConfig(seed=request.seed, overrides=overrides))
        except SheetgenError as exc:
            return _error(400, f"evaluation failed: {exc}")
        return values_to_obj(values)

    if ui_dir is not None and ui_dir.is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/")
        def index():
            return {"service": "component repository", "catalog": "/api/components"}

    return app
