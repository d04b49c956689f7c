"""Annotation service: tasks of sentence pairs (Likert schema) or word pairs
(binary schema), schema-validated submissions, an append-only JSONL label
log with last-write-wins reads, and control-sample agreement.
"""

from __future__ import annotations

import json
import random
import threading
import time
from pathlib import Path
from typing import Iterable

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .evaluation import AgreementReport, EvalError, agreement

KIND_BITEXT = "bitext"
KIND_WORDPAIR = "wordpair"

BITEXT_LABELS = ("idk", "n/a", "incomplete", "1", "2", "3", "4", "5")
ESCAPE_LABELS = ("idk", "n/a", "incomplete")
FACTUAL_VALUES = (
    "misses_details",
    "adds_details",
    "different_details",
    "minor_inconsistency",
    "major_inconsistency",
    "n/a",
)
FACTUAL_REQUIRED = ("2", "3", "4")
# factual is forbidden with 5 (identical meaning needs no justification) and
# with every escape label; label 1 may carry factual="n/a" but nothing forces it
FACTUAL_FORBIDDEN = ESCAPE_LABELS + ("5",)
WORDPAIR_LABELS = ("yes", "no", "idk")


class AnnotationError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class SchemaViolation(AnnotationError):
    def __init__(self, violations: list[str]):
        super().__init__("schema_violation", "; ".join(violations))
        self.violations = violations


def _normalize_label(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return str(value).strip()


def validate_bitext(payload: dict) -> list[str]:
    """Schema checks for a sentence-pair judgment; returns all violations."""
    violations = []
    label = _normalize_label(payload.get("label", ""))
    if label not in BITEXT_LABELS:
        violations.append(f"label must be one of {BITEXT_LABELS}, got {label!r}")
        return violations
    factual = payload.get("factual")
    if label in FACTUAL_REQUIRED and factual is None:
        violations.append(f"label {label} requires the factual field")
    if label in FACTUAL_FORBIDDEN and factual is not None:
        violations.append(f"label {label} forbids the factual field")
    if factual is not None and factual not in FACTUAL_VALUES:
        violations.append(f"factual must be one of {FACTUAL_VALUES}, got {factual!r}")
    return violations


def validate_wordpair(payload: dict) -> list[str]:
    violations = []
    label = _normalize_label(payload.get("label", ""))
    if label not in WORDPAIR_LABELS:
        violations.append(f"label must be one of {WORDPAIR_LABELS}, got {label!r}")
    for flag in ("pos_mismatch", "partial_match"):
        if flag in payload and not isinstance(payload[flag], bool):
            violations.append(f"{flag} must be boolean")
    return violations


def _clean_record(kind: str, payload: dict) -> dict:
    """Validate and strip a submission down to its schema fields."""
    if not payload.get("annotator_id"):
        raise SchemaViolation(["annotator_id is required"])
    if not payload.get("item_id"):
        raise SchemaViolation(["item_id is required"])
    validator = validate_bitext if kind == KIND_BITEXT else validate_wordpair
    violations = validator(payload)
    if violations:
        raise SchemaViolation(violations)
    rec = {
        "item_id": str(payload["item_id"]),
        "annotator_id": str(payload["annotator_id"]),
        "label": _normalize_label(payload["label"]),
        "timestamp": float(payload.get("timestamp", time.time())),
    }
    if payload.get("comment"):
        rec["comment"] = str(payload["comment"])
    if kind == KIND_BITEXT:
        if payload.get("factual") is not None:
            rec["factual"] = payload["factual"]
        # tri-state checkbox: stored true or absent, never coerced to false
        if payload.get("grammar_differs"):
            rec["grammar_differs"] = True
    else:
        for flag in ("pos_mismatch", "partial_match"):
            if payload.get(flag):
                rec[flag] = True
    return rec


class TaskStore:
    """File-backed task and label store.

    One JSON file per task, one append-only JSONL label log per task.
    Reads resolve duplicate (annotator, item) submissions last-write-wins;
    the replacing log line is flagged. Appends are serialized by a lock.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    def _task_path(self, task_id: str) -> Path:
        return self.root / f"{task_id}.json"

    def _labels_path(self, task_id: str) -> Path:
        return self.root / f"{task_id}.labels.jsonl"

    def create_task(
        self,
        kind: str,
        items: list[dict],
        control_size: int = 0,
        seed: int = 0,
        task_id: str | None = None,
    ) -> dict:
        if kind not in (KIND_BITEXT, KIND_WORDPAIR):
            raise AnnotationError("bad_kind", f"unknown task kind {kind!r}")
        if not items:
            raise AnnotationError("empty_task", "a task needs at least one item")
        ids = [str(item.get("item_id", "")) for item in items]
        if "" in ids or len(set(ids)) != len(ids):
            raise AnnotationError("bad_items", "every item needs a unique item_id")
        if not 0 <= control_size <= len(items):
            raise AnnotationError("bad_control", "control_size must be within the item count")
        task_id = task_id or f"{kind}-{len(items)}"
        if self._task_path(task_id).exists():
            raise AnnotationError("conflict", f"task {task_id!r} already exists")
        control_refs = sorted(random.Random(seed).sample(ids, control_size))
        task = {
            "task_id": task_id,
            "kind": kind,
            "items": items,
            "control_refs": control_refs,
            "seed": seed,
        }
        with self._write_lock:
            self._task_path(task_id).write_text(
                json.dumps(task, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8"
            )
        return task

    def get_task(self, task_id: str) -> dict:
        path = self._task_path(task_id)
        if not path.exists():
            raise AnnotationError("not_found", f"no task {task_id!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    def list_tasks(self) -> list[dict]:
        out = []
        for path in sorted(self.root.glob("*.json")):
            task = json.loads(path.read_text(encoding="utf-8"))
            out.append(
                {
                    "task_id": task["task_id"],
                    "kind": task["kind"],
                    "n_items": len(task["items"]),
                    "control_size": len(task["control_refs"]),
                }
            )
        return out

    def _raw_labels(self, task_id: str) -> list[dict]:
        path = self._labels_path(task_id)
        if not path.exists():
            return []
        records = []
        with open(path, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    records.append(json.loads(line))
        return records

    def effective_labels(self, task_id: str) -> dict[tuple[str, str], dict]:
        """Last write wins per (annotator, item)."""
        effective: dict[tuple[str, str], dict] = {}
        for rec in self._raw_labels(task_id):
            effective[(rec["annotator_id"], rec["item_id"])] = rec
        return effective

    def next_item(self, task_id: str, annotator_id: str, scope: str = "all") -> dict | None:
        """First item, in task order, this annotator has not labeled yet.

        scope="control" walks only the control subset, which every annotator
        is served for agreement measurement.
        """
        task = self.get_task(task_id)
        labeled = {item for (a, item) in self.effective_labels(task_id) if a == annotator_id}
        control = set(task["control_refs"])
        for item in task["items"]:
            item_id = str(item["item_id"])
            if scope == "control" and item_id not in control:
                continue
            if item_id not in labeled:
                return item
        return None

    def submit(self, task_id: str, payload: dict) -> dict:
        task = self.get_task(task_id)
        rec = _clean_record(task["kind"], payload)
        if rec["item_id"] not in {str(item["item_id"]) for item in task["items"]}:
            raise AnnotationError("unknown_item", f"item {rec['item_id']!r} is not part of task {task_id!r}")
        with self._write_lock:
            replaced = (rec["annotator_id"], rec["item_id"]) in self.effective_labels(task_id)
            if replaced:
                rec["replaces"] = True
            with open(self._labels_path(task_id), "a", encoding="utf-8") as f:
                f.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
        return rec

    def export(self, task_id: str) -> list[dict]:
        """Effective labels ordered by (item order, annotator); every record
        is re-validated against its schema on the way out.
        """
        task = self.get_task(task_id)
        order = {str(item["item_id"]): idx for idx, item in enumerate(task["items"])}
        records = sorted(
            self.effective_labels(task_id).values(),
            key=lambda r: (order.get(r["item_id"], len(order)), r["annotator_id"]),
        )
        validator = validate_bitext if task["kind"] == KIND_BITEXT else validate_wordpair
        items = {str(item["item_id"]): item for item in task["items"]}
        out = []
        for rec in records:
            violations = validator(rec)
            if violations:
                raise SchemaViolation([f"stored record failed re-validation: {v}" for v in violations])
            merged = dict(items[rec["item_id"]])
            merged.update(rec)
            merged["task_id"] = task_id
            out.append(merged)
        return out

    def control_agreement(self, task_id: str) -> AgreementReport:
        task = self.get_task(task_id)
        control = set(task["control_refs"])
        per_annotator: dict[str, dict[str, str]] = {}
        for (annotator, item), rec in self.effective_labels(task_id).items():
            if item in control:
                per_annotator.setdefault(annotator, {})[item] = rec["label"]
        complete = {a: labels for a, labels in per_annotator.items() if labels}
        if len(complete) < 2:
            raise AnnotationError("insufficient_annotators", "control agreement needs two annotators")
        first, second = sorted(complete)[:2]
        kind = "likert" if task["kind"] == KIND_BITEXT else "binary"
        try:
            return agreement(complete[first], complete[second], kind)
        except EvalError as e:
            raise AnnotationError("no_overlap", str(e)) from e


def export_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n" for rec in records)


def create_app(store: TaskStore, token: str | None = None):
    """HTTP JSON API over a TaskStore; shared-token header auth when set.

    CORS is open so the browser client can run from any origin; the token
    header is the access control.
    """
    app = FastAPI(title="dialex annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _denied(request: Request) -> JSONResponse | None:
        if token and request.headers.get("X-Annotation-Token") != token:
            return JSONResponse({"error": "bad_token"}, status_code=401)
        return None

    def _error(e: AnnotationError) -> JSONResponse:
        status = {
            "not_found": 404,
            "conflict": 409,
            "insufficient_annotators": 409,
            "schema_violation": 422,
        }.get(e.code, 400)
        body = {"error": e.code, "detail": str(e)}
        if isinstance(e, SchemaViolation):
            body["violations"] = e.violations
        return JSONResponse(body, status_code=status)

    @app.get("/tasks")
    def list_tasks(request: Request):
        return _denied(request) or {"tasks": store.list_tasks()}

    @app.post("/tasks", status_code=201)
    async def create_task(request: Request):
        denied = _denied(request)
        if denied:
            return denied
        body = await request.json()
        try:
            task = store.create_task(
                kind=body.get("kind", ""),
                items=body.get("items", []),
                control_size=int(body.get("control_size", 0)),
                seed=int(body.get("seed", 0)),
                task_id=body.get("task_id"),
            )
        except AnnotationError as e:
            return _error(e)
        return {
            "task_id": task["task_id"],
            "kind": task["kind"],
            "n_items": len(task["items"]),
            "control_refs": task["control_refs"],
        }

    @app.get("/tasks/{task_id}/next")
    def next_item(task_id: str, request: Request, annotator: str, scope: str = "all"):
        denied = _denied(request)
        if denied:
            return denied
        try:
            item = store.next_item(task_id, annotator, scope=scope)
        except AnnotationError as e:
            return _error(e)
        if item is None:
            return {"done": True}
        return {"done": False, "item": item}

    @app.post("/tasks/{task_id}/labels")
    async def submit(task_id: str, request: Request):
        denied = _denied(request)
        if denied:
            return denied
        body = await request.json()
        try:
            rec = store.submit(task_id, body)
        except AnnotationError as e:
            return _error(e)
        return {"status": "accepted", "replaced": bool(rec.get("replaces", False))}

    @app.get("/tasks/{task_id}/export")
    def export(task_id: str, request: Request):
        denied = _denied(request)
        if denied:
            return denied
        try:
            records = store.export(task_id)
        except AnnotationError as e:
            return _error(e)
        return PlainTextResponse(export_jsonl(records), media_type="application/x-ndjson")

    @app.get("/tasks/{task_id}/agreement")
    def control_agreement(task_id: str, request: Request):
        denied = _denied(request)
        if denied:
            return denied
        try:
            report = store.control_agreement(task_id)
        except AnnotationError as e:
            return _error(e)
        return {"exact_match_rate": report.exact_match_rate, "pearson_r": report.pearson_r}

    return app
