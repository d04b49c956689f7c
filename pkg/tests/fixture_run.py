"""Drive the fixture corpus through the whole pipeline, including scripted
annotators that label over the annotation HTTP API, exactly as the golden
files were produced.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from dialex import annotation, autolabel, pipeline

PIPELINE_STAGES = ("ingest", "mine", "align", "build-lexicon", "sample-annotation")
GOLDEN_FILES = (
    "bitext.tsv",
    "lexicon_full.tsv",
    "lexicon.tsv",
    "synonym_groups.json",
    "evaluation.json",
    "report.json",
    "f1_sweep.tsv",
)


def _label_with(kind: str, item: dict) -> dict:
    if kind == "bitext":
        return autolabel.bitext_label(item["src_text"], item["tgt_text"])
    return autolabel.wordpair_label(item["dialect_word"], item["standard_word"])


def drive_annotation(cfg: pipeline.PipelineConfig) -> dict[str, str]:
    """Create both tasks and label them with scripted HTTP clients: the
    primary annotator walks every item, the second annotator walks the
    control subset. Returns the exported label file paths.
    """
    store = annotation.TaskStore(cfg.out_path("annotation"))
    client = TestClient(annotation.create_app(store))
    timestamp = 0.0
    label_paths: dict[str, str] = {}
    for kind, filename in (("bitext", "annotation_bitext_items.jsonl"), ("wordpair", "annotation_wordpair_items.jsonl")):
        items = [
            json.loads(line)
            for line in cfg.out_path(filename).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        resp = client.post(
            "/tasks",
            json={
                "kind": kind,
                "items": items,
                "control_size": min(cfg.control_size, len(items)),
                "seed": cfg.seed,
                "task_id": kind,
            },
        )
        assert resp.status_code == 201, resp.text

        for annotator, scope, second_pass in (("anno1", "all", False), ("anno2", "control", True)):
            while True:
                nxt = client.get(f"/tasks/{kind}/next", params={"annotator": annotator, "scope": scope}).json()
                if nxt["done"]:
                    break
                item = nxt["item"]
                rec = _label_with(kind, item)
                if second_pass:
                    second = (
                        autolabel.second_opinion_bitext
                        if kind == "bitext"
                        else autolabel.second_opinion_wordpair
                    )
                    rec = second(item["item_id"], rec)
                timestamp += 1.0
                rec.update({"item_id": item["item_id"], "annotator_id": annotator, "timestamp": timestamp})
                resp = client.post(f"/tasks/{kind}/labels", json=rec)
                assert resp.status_code == 200, resp.text

        export = client.get(f"/tasks/{kind}/export").text
        path = cfg.out_path(f"labels_{kind}.jsonl")
        path.write_text(export, encoding="utf-8")
        label_paths[kind] = str(path)
    return label_paths


def run_fixture_pipeline(config_path: str | Path, out_dir: str | Path, overrides: dict | None = None):
    """Full run: stages, scripted annotation, evaluation, report."""
    base = dict(overrides or {})
    base["out"] = str(out_dir)
    cfg = pipeline.load_config(config_path, base)
    for stage in PIPELINE_STAGES:
        pipeline.STAGE_FUNCS[stage](cfg)
    label_paths = drive_annotation(cfg)
    base["bitext_labels"] = label_paths["bitext"]
    base["wordpair_labels"] = label_paths["wordpair"]
    cfg = pipeline.load_config(config_path, base)
    pipeline.stage_evaluate(cfg)
    pipeline.stage_report(cfg)
    return cfg
