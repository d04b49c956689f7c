import json

import pytest
from fastapi.testclient import TestClient

from dialex.annotation import (
    AnnotationError,
    SchemaViolation,
    TaskStore,
    create_app,
    validate_bitext,
    validate_wordpair,
)


def bitext_items(n):
    return [
        {
            "item_id": f"bt{i:03d}",
            "src_sentence_id": f"b{i}",
            "tgt_sentence_id": f"d{i}",
            "src_text": f"Dialekt Satz {i}",
            "tgt_text": f"Standard Satz {i}",
        }
        for i in range(n)
    ]


def wordpair_items(n):
    return [
        {"item_id": f"wp{i:03d}", "dialect_word": f"Wort{i}", "standard_word": f"Wort{i}"}
        for i in range(n)
    ]


class TestSchemas:
    def test_label_four_with_misses_details_ok(self):
        assert validate_bitext({"label": 4, "factual": "misses_details"}) == []

    def test_label_five_with_factual_rejected(self):
        violations = validate_bitext({"label": 5, "factual": "adds_details"})
        assert violations and "forbids" in violations[0]

    def test_label_two_requires_factual(self):
        assert validate_bitext({"label": "2"})
        assert validate_bitext({"label": "2", "factual": "minor_inconsistency"}) == []

    def test_escape_labels_forbid_factual(self):
        for label in ("idk", "n/a", "incomplete"):
            assert validate_bitext({"label": label}) == []
            assert validate_bitext({"label": label, "factual": "n/a"})

    def test_label_one_factual_optional(self):
        assert validate_bitext({"label": "1"}) == []
        assert validate_bitext({"label": "1", "factual": "n/a"}) == []

    def test_unknown_label_rejected(self):
        assert validate_bitext({"label": "6"})
        assert validate_bitext({})

    def test_wordpair_yes_with_partial_match_ok(self):
        assert validate_wordpair({"label": "yes", "partial_match": True}) == []

    def test_wordpair_flags_any_label(self):
        for label in ("yes", "no", "idk"):
            assert validate_wordpair({"label": label, "pos_mismatch": True, "partial_match": True}) == []

    def test_wordpair_label_mandatory(self):
        assert validate_wordpair({"partial_match": True})


class TestTaskStore:
    def test_create_task_control_subset(self, tmp_path):
        store = TaskStore(tmp_path)
        task = store.create_task("wordpair", wordpair_items(1000), control_size=200, seed=1)
        assert len(task["control_refs"]) == 200
        assert set(task["control_refs"]) <= {i["item_id"] for i in task["items"]}

    def test_control_deterministic_per_seed(self, tmp_path):
        a = TaskStore(tmp_path / "a").create_task("wordpair", wordpair_items(50), control_size=10, seed=9)
        b = TaskStore(tmp_path / "b").create_task("wordpair", wordpair_items(50), control_size=10, seed=9)
        assert a["control_refs"] == b["control_refs"]

    def test_zero_control(self, tmp_path):
        task = TaskStore(tmp_path).create_task("bitext", bitext_items(5), control_size=0)
        assert task["control_refs"] == []

    def test_duplicate_task_id_conflicts(self, tmp_path):
        store = TaskStore(tmp_path)
        store.create_task("bitext", bitext_items(3), task_id="t")
        with pytest.raises(AnnotationError) as e:
            store.create_task("bitext", bitext_items(3), task_id="t")
        assert e.value.code == "conflict"

    def test_next_item_walks_in_order(self, tmp_path):
        store = TaskStore(tmp_path)
        store.create_task("bitext", bitext_items(3), task_id="t")
        assert store.next_item("t", "anno1")["item_id"] == "bt000"
        store.submit("t", {"item_id": "bt000", "annotator_id": "anno1", "label": "5"})
        assert store.next_item("t", "anno1")["item_id"] == "bt001"

    def test_two_annotators_progress_independently(self, tmp_path):
        store = TaskStore(tmp_path)
        store.create_task("bitext", bitext_items(3), task_id="t")
        store.submit("t", {"item_id": "bt000", "annotator_id": "a", "label": "5"})
        store.submit("t", {"item_id": "bt000", "annotator_id": "b", "label": "5"})
        store.submit("t", {"item_id": "bt001", "annotator_id": "b", "label": "1"})
        assert store.next_item("t", "a")["item_id"] == "bt001"
        assert store.next_item("t", "b")["item_id"] == "bt002"

    def test_done_when_all_labeled(self, tmp_path):
        store = TaskStore(tmp_path)
        store.create_task("bitext", bitext_items(1), task_id="t")
        store.submit("t", {"item_id": "bt000", "annotator_id": "a", "label": "idk"})
        assert store.next_item("t", "a") is None

    def test_control_scope(self, tmp_path):
        store = TaskStore(tmp_path)
        task = store.create_task("bitext", bitext_items(10), control_size=3, seed=5, task_id="t")
        item = store.next_item("t", "second", scope="control")
        assert item["item_id"] in task["control_refs"]

    def test_unknown_task_not_found(self, tmp_path):
        with pytest.raises(AnnotationError) as e:
            TaskStore(tmp_path).next_item("nope", "a")
        assert e.value.code == "not_found"

    def test_resubmission_replaces_and_is_flagged(self, tmp_path):
        store = TaskStore(tmp_path)
        store.create_task("wordpair", wordpair_items(2), task_id="t")
        store.submit("t", {"item_id": "wp000", "annotator_id": "a", "label": "yes"})
        rec = store.submit("t", {"item_id": "wp000", "annotator_id": "a", "label": "no"})
        assert rec["replaces"] is True
        labels = store.effective_labels("t")
        assert labels[("a", "wp000")]["label"] == "no"
        # the raw log keeps both lines
        raw = (tmp_path / "t.labels.jsonl").read_text().strip().splitlines()
        assert len(raw) == 2

    def test_submit_unknown_item_rejected(self, tmp_path):
        store = TaskStore(tmp_path)
        store.create_task("wordpair", wordpair_items(1), task_id="t")
        with pytest.raises(AnnotationError) as e:
            store.submit("t", {"item_id": "ghost", "annotator_id": "a", "label": "yes"})
        assert e.value.code == "unknown_item"

    def test_schema_violation_on_submit(self, tmp_path):
        store = TaskStore(tmp_path)
        store.create_task("bitext", bitext_items(1), task_id="t")
        with pytest.raises(SchemaViolation):
            store.submit("t", {"item_id": "bt000", "annotator_id": "a", "label": "5", "factual": "adds_details"})

    def test_export_round_trips_fields(self, tmp_path):
        store = TaskStore(tmp_path)
        store.create_task("bitext", bitext_items(2), task_id="t")
        store.submit(
            "t",
            {
                "item_id": "bt001",
                "annotator_id": "a",
                "label": 4,
                "factual": "misses_details",
                "grammar_differs": True,
                "comment": "Standard liefert mehr Details",
                "timestamp": 1000.0,
            },
        )
        store.submit("t", {"item_id": "bt000", "annotator_id": "a", "label": "idk", "timestamp": 1001.0})
        records = store.export("t")
        # ordered by item order, not submission order
        assert [r["item_id"] for r in records] == ["bt000", "bt001"]
        rec = records[1]
        assert rec["label"] == "4"
        assert rec["factual"] == "misses_details"
        assert rec["grammar_differs"] is True
        assert rec["comment"] == "Standard liefert mehr Details"
        assert rec["src_text"] == "Dialekt Satz 1"

    def test_grammar_differs_unset_stays_unset(self, tmp_path):
        store = TaskStore(tmp_path)
        store.create_task("bitext", bitext_items(1), task_id="t")
        store.submit("t", {"item_id": "bt000", "annotator_id": "a", "label": "5", "grammar_differs": False})
        rec = store.export("t")[0]
        assert "grammar_differs" not in rec

    def test_control_agreement_exact_match(self, tmp_path):
        store = TaskStore(tmp_path)
        task = store.create_task("wordpair", wordpair_items(20), control_size=10, seed=2, task_id="t")
        for item_id in task["control_refs"]:
            store.submit("t", {"item_id": item_id, "annotator_id": "a", "label": "yes"})
            store.submit("t", {"item_id": item_id, "annotator_id": "b", "label": "yes"})
        report = store.control_agreement("t")
        assert report.exact_match_rate == 1.0

    def test_control_agreement_needs_two_annotators(self, tmp_path):
        store = TaskStore(tmp_path)
        task = store.create_task("wordpair", wordpair_items(4), control_size=2, seed=2, task_id="t")
        for item_id in task["control_refs"]:
            store.submit("t", {"item_id": item_id, "annotator_id": "a", "label": "yes"})
        with pytest.raises(AnnotationError) as e:
            store.control_agreement("t")
        assert e.value.code == "insufficient_annotators"


class TestHttpApi:
    @pytest.fixture
    def client(self, tmp_path):
        return TestClient(create_app(TaskStore(tmp_path)))

    def test_create_and_list(self, client):
        resp = client.post(
            "/tasks",
            json={"kind": "bitext", "items": bitext_items(4), "control_size": 2, "seed": 1, "task_id": "t"},
        )
        assert resp.status_code == 201
        assert len(resp.json()["control_refs"]) == 2
        listing = client.get("/tasks").json()["tasks"]
        assert listing[0]["task_id"] == "t" and listing[0]["n_items"] == 4

    def test_conflict_on_duplicate(self, client):
        body = {"kind": "bitext", "items": bitext_items(1), "task_id": "t"}
        assert client.post("/tasks", json=body).status_code == 201
        assert client.post("/tasks", json=body).status_code == 409

    def test_next_submit_export_flow(self, client):
        client.post("/tasks", json={"kind": "wordpair", "items": wordpair_items(2), "task_id": "t"})
        item = client.get("/tasks/t/next", params={"annotator": "a"}).json()["item"]
        resp = client.post(
            "/tasks/t/labels",
            json={"item_id": item["item_id"], "annotator_id": "a", "label": "yes", "partial_match": True},
        )
        assert resp.status_code == 200 and resp.json()["status"] == "accepted"
        resp = client.post(
            "/tasks/t/labels",
            json={"item_id": "wp001", "annotator_id": "a", "label": "no"},
        )
        assert resp.status_code == 200
        assert client.get("/tasks/t/next", params={"annotator": "a"}).json()["done"] is True
        exported = client.get("/tasks/t/export").text.strip().splitlines()
        assert len(exported) == 3 - 1
        first = json.loads(exported[0])
        assert first["partial_match"] is True

    def test_schema_violation_http(self, client):
        client.post("/tasks", json={"kind": "bitext", "items": bitext_items(1), "task_id": "t"})
        resp = client.post(
            "/tasks/t/labels",
            json={"item_id": "bt000", "annotator_id": "a", "label": 5, "factual": "adds_details"},
        )
        assert resp.status_code == 422
        assert resp.json()["error"] == "schema_violation"
        assert resp.json()["violations"]

    def test_unknown_task_404(self, client):
        assert client.get("/tasks/ghost/next", params={"annotator": "a"}).status_code == 404

    def test_agreement_endpoint(self, client):
        client.post(
            "/tasks",
            json={"kind": "bitext", "items": bitext_items(4), "control_size": 4, "seed": 3, "task_id": "t"},
        )
        for i in range(4):
            for annotator in ("a", "b"):
                client.post(
                    "/tasks/t/labels",
                    json={"item_id": f"bt{i:03d}", "annotator_id": annotator, "label": str(i % 5 + 1)},
                )
        resp = client.get("/tasks/t/agreement")
        assert resp.status_code == 200
        assert resp.json()["exact_match_rate"] == 1.0

    def test_agreement_requires_second_annotator(self, client):
        client.post(
            "/tasks",
            json={"kind": "bitext", "items": bitext_items(2), "control_size": 2, "seed": 3, "task_id": "t"},
        )
        client.post("/tasks/t/labels", json={"item_id": "bt000", "annotator_id": "a", "label": "5"})
        assert client.get("/tasks/t/agreement").status_code == 409

    def test_token_auth(self, tmp_path):
        client = TestClient(create_app(TaskStore(tmp_path), token="geheim"))
        assert client.get("/tasks").status_code == 401
        assert client.get("/tasks", headers={"X-Annotation-Token": "geheim"}).status_code == 200
