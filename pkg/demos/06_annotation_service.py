#!/usr/bin/env python3
"""Exercise the annotation task store: task creation with a control subset,
schema validation of Likert and binary judgments, the label log, and
inter-annotator agreement. (`dialex serve-annotation` exposes the same
store over HTTP.)

Run from the repo root: python3 demos/06_annotation_service.py
"""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dialex.annotation import SchemaViolation, TaskStore

with tempfile.TemporaryDirectory() as tmp:
    store = TaskStore(tmp)
    items = [
        {"item_id": "bt000", "src_text": "Da Geiselbach speist oanige Weiher.",
         "tgt_text": "Der Geiselbach speist einige Weiher."},
        {"item_id": "bt001", "src_text": "As Gebiet is a bliabds Reisezui.",
         "tgt_text": "Sein Werk ist ein lyrisches Poem."},
    ]
    task = store.create_task("bitext", items, control_size=2, seed=42, task_id="demo")
    print(f"task {task['task_id']}: {len(task['items'])} items, control = {task['control_refs']}")

    print("\nschema validation:")
    attempts = [
        {"item_id": "bt000", "annotator_id": "anno1", "label": "5"},
        {"item_id": "bt001", "annotator_id": "anno1", "label": "4"},  # missing factual
        {"item_id": "bt001", "annotator_id": "anno1", "label": "4", "factual": "misses_details"},
        {"item_id": "bt000", "annotator_id": "anno2", "label": "5", "factual": "adds_details"},  # forbidden
        {"item_id": "bt000", "annotator_id": "anno2", "label": "5"},
        {"item_id": "bt001", "annotator_id": "anno2", "label": "4", "factual": "misses_details"},
    ]
    for payload in attempts:
        try:
            store.submit("demo", payload)
            print(f"  accepted: {payload['annotator_id']} {payload['item_id']} label={payload['label']}")
        except SchemaViolation as e:
            print(f"  rejected: {payload['annotator_id']} {payload['item_id']} -> {e.violations[0]}")

    print("\nexported labels:")
    for rec in store.export("demo"):
        print(f"  {rec['item_id']} {rec['annotator_id']} label={rec['label']} factual={rec.get('factual')}")

    report = store.control_agreement("demo")
    print(f"\ncontrol agreement: exact match {report.exact_match_rate:.2f}, pearson {report.pearson_r}")
