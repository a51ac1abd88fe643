"""HTTP/JSON session service backing the interactive client.

A session holds one uploaded dataset.  Preview runs the hiding pipeline
without mutating anything; commit re-runs it and atomically replaces the
session dataset.  Commits must echo the dataset hash returned by preview so
a stale preview can never be committed (optimistic concurrency).

Sessions persist as one directory per session (dataset.csv, meta.json,
plan.json) under the service data directory, so restarts lose nothing.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .dataset import Dataset, DatasetError, load_csv, write_csv
from .evaluation import build_report
from .hiding import CompletionStrategy, HidingError, hide
from .diophantine import UnsolvableError
from .tree import RuleNotFoundError, induce


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, node_id: int | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.node_id = node_id

    def response(self) -> JSONResponse:
        body = {"code": self.code, "message": self.message}
        if self.node_id is not None:
            body["node_id"] = self.node_id
        return JSONResponse(body, status_code=self.status)


class PreviewBody(BaseModel):
    requests: list[str] = Field(default_factory=list)
    relax: dict[str, int] = Field(default_factory=dict)
    strategy: str = CompletionStrategy.TWO_LEVEL_HOLDBACK.value


class CommitBody(PreviewBody):
    dataset_hash: str


def _dataset_hash(csv_text: str) -> str:
    return hashlib.sha256(csv_text.encode("utf-8")).hexdigest()


class SessionStore:
    """File-backed session registry; per-session writes are serialized."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def path(self, session_id: str) -> Path:
        return self.data_dir / session_id

    def create(self, csv_text: str) -> str:
        session_id = uuid.uuid4().hex
        root = self.path(session_id)
        root.mkdir(parents=True)
        (root / "dataset.csv").write_text(csv_text)
        (root / "meta.json").write_text(json.dumps({"commits": 0}))
        return session_id

    def dataset_text(self, session_id: str) -> str:
        file = self.path(session_id) / "dataset.csv"
        if not file.exists():
            raise ServiceError(404, "unknown_session", f"no session {session_id}")
        return file.read_text()

    def dataset(self, session_id: str) -> Dataset:
        return load_csv(self.dataset_text(session_id))

    def replace_dataset(self, session_id: str, csv_text: str, plan_json: str) -> None:
        root = self.path(session_id)
        tmp = root / "dataset.csv.tmp"
        tmp.write_text(csv_text)
        os.replace(tmp, root / "dataset.csv")
        (root / "plan.json").write_text(plan_json)
        meta_file = root / "meta.json"
        meta = json.loads(meta_file.read_text()) if meta_file.exists() else {"commits": 0}
        meta["commits"] = meta.get("commits", 0) + 1
        meta_file.write_text(json.dumps(meta))

    def delete(self, session_id: str) -> None:
        root = self.path(session_id)
        if not root.exists():
            raise ServiceError(404, "unknown_session", f"no session {session_id}")
        for file in root.iterdir():
            file.unlink()
        root.rmdir()


def _run_pipeline(ds: Dataset, body: PreviewBody):
    try:
        strategy = CompletionStrategy(body.strategy)
    except ValueError:
        raise ServiceError(422, "bad_strategy", f"unknown strategy {body.strategy!r}")
    relax: dict[int | str, int] = {}
    for key, value in body.relax.items():
        relax["root" if key == "root" else int(key)] = int(value)
    try:
        return hide(ds, body.requests, relax=relax, strategy=strategy)
    except RuleNotFoundError as exc:
        raise ServiceError(422, "rule_not_found", str(exc))
    except UnsolvableError as exc:
        raise ServiceError(
            422,
            "unsolvable",
            f"{exc}; raise the relax budget for this node",
            node_id=exc.node_id,
        )
    except (HidingError, DatasetError) as exc:
        raise ServiceError(422, "bad_request", str(exc))


def _tree_payload(ds: Dataset) -> dict:
    tree = induce(ds)
    return {
        "tree": tree.to_json_dict(),
        "rules": [rule.format(tree.schema_names) for rule in tree.extract_rules()],
    }


def create_app(data_dir: Path | str) -> FastAPI:
    store = SessionStore(Path(data_dir))
    app = FastAPI(title="rulehide service")

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, exc: ServiceError):
        return exc.response()

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        raw = await request.body()
        try:
            ds = load_csv(raw)
            payload = _tree_payload(ds)
        except DatasetError as exc:
            raise ServiceError(422, "bad_dataset", str(exc))
        session_id = store.create(write_csv(ds))
        return {
            "session": session_id,
            "dataset_hash": _dataset_hash(store.dataset_text(session_id)),
            **payload,
        }

    @app.get("/sessions/{session_id}/tree")
    def get_tree(session_id: str):
        ds = store.dataset(session_id)
        return {
            "dataset_hash": _dataset_hash(store.dataset_text(session_id)),
            **_tree_payload(ds),
        }

    @app.post("/sessions/{session_id}/preview")
    def preview(session_id: str, body: PreviewBody):
        with store.lock(session_id):
            csv_text = store.dataset_text(session_id)
            result = _run_pipeline(load_csv(csv_text), body)
            report = build_report(result)
            return {
                "dataset_hash": _dataset_hash(csv_text),
                "plan": result.plan.to_json_dict(),
                "report": report.to_json_dict(),
            }

    @app.post("/sessions/{session_id}/commit")
    def commit(session_id: str, body: CommitBody):
        with store.lock(session_id):
            csv_text = store.dataset_text(session_id)
            if body.dataset_hash != _dataset_hash(csv_text):
                raise ServiceError(
                    409, "stale_preview", "dataset changed since preview; preview again"
                )
            result = _run_pipeline(load_csv(csv_text), body)
            report = build_report(result)
            sanitized = write_csv(result.sanitized)
            store.replace_dataset(session_id, sanitized, result.plan.to_json())
            return {
                "dataset_hash": _dataset_hash(sanitized),
                "plan": result.plan.to_json_dict(),
                "report": report.to_json_dict(),
            }

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str):
        return Response(store.dataset_text(session_id), media_type="text/csv")

    @app.delete("/sessions/{session_id}")
    def delete(session_id: str):
        with store.lock(session_id):
            store.delete(session_id)
        return {"ok": True}

    return app
