import json
import struct
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from dialex.embeddings import (
    MAGIC,
    EmbeddingError,
    EmbeddingMatrix,
    EmbeddingServiceError,
    HttpEmbeddingClient,
    MockEmbedder,
    cosine,
    dump_embeddings_bytes,
    fetch_embeddings,
    load_embeddings,
    parse_embeddings_bytes,
    pool,
    write_embeddings,
)


class TestPool:
    def test_mean(self):
        rows = np.array([[1.0, 1.0], [3.0, 3.0]], dtype=np.float32)
        assert pool(rows, "mean").tolist() == [2.0, 2.0]

    def test_cls_takes_first_row(self):
        rows = np.array([[1.0, 1.0], [3.0, 3.0]], dtype=np.float32)
        assert pool(rows, "cls").tolist() == [1.0, 1.0]

    def test_single_row_strategies_agree(self):
        rows = np.array([[2.0, 5.0]], dtype=np.float32)
        assert pool(rows, "cls").tolist() == pool(rows, "mean").tolist()

    def test_empty_matrix_rejected(self):
        with pytest.raises(EmbeddingError) as e:
            pool(np.zeros((0, 4), dtype=np.float32), "mean")
        assert e.value.code == "empty_sentence"

    def test_mean_permutation_invariant_cls_not(self):
        rng = np.random.default_rng(7)
        rows = rng.standard_normal((5, 8)).astype(np.float32)
        swapped = rows[::-1].copy()
        assert np.allclose(pool(rows, "mean"), pool(swapped, "mean"))
        assert not np.allclose(pool(rows, "cls"), pool(swapped, "cls"))


class TestCosine:
    def test_identity(self):
        assert cosine([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)

    def test_hand_value(self):
        # 1/sqrt(2)
        assert cosine([1.0, 0.0], [1.0, 1.0]) == pytest.approx(0.7071, abs=1e-4)

    def test_zero_vector_rejected(self):
        with pytest.raises(EmbeddingError) as e:
            cosine([0.0, 0.0], [1.0, 1.0])
        assert e.value.code == "zero_norm"

    def test_symmetry_and_scale_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            u = rng.standard_normal(16)
            v = rng.standard_normal(16)
            alpha = float(rng.uniform(0.1, 10.0))
            assert cosine(u, v) == pytest.approx(cosine(v, u), abs=1e-12)
            assert cosine(alpha * u, v) == pytest.approx(cosine(u, v), abs=1e-9)


class TestFileFormat:
    def _matrix(self, n=3, dim=4, level="sentence", word_map=None, seed=0):
        rng = np.random.default_rng(seed)
        return EmbeddingMatrix(
            unit_ids=[f"u{i}" for i in range(n)] if level == "sentence" else ["u0"] * n,
            values=rng.standard_normal((n, dim)).astype(np.float32),
            level=level,
            word_map=word_map,
        )

    def test_round_trip_bit_identical(self, tmp_path):
        matrix = self._matrix()
        path = tmp_path / "m.emb"
        write_embeddings(matrix, path)
        loaded = load_embeddings(path)
        assert loaded.values.tobytes() == matrix.values.tobytes()
        assert loaded.unit_ids == matrix.unit_ids
        assert loaded.level == matrix.level

    def test_round_trip_extreme_finite_floats(self):
        # denormals, float32 extremes, negative zero
        vals = np.array(
            [[np.float32(1.4e-45), np.float32(3.4028235e38)], [np.float32(-0.0), np.float32(-1.1754944e-38)]],
            dtype=np.float32,
        )
        matrix = EmbeddingMatrix(unit_ids=["a", "b"], values=vals, level="sentence")
        loaded = parse_embeddings_bytes(dump_embeddings_bytes(matrix))
        assert loaded.values.tobytes() == vals.tobytes()

    def test_token_level_round_trip_with_word_map(self):
        matrix = self._matrix(n=5, level="token", word_map=[-1, 0, 0, 1, -1])
        loaded = parse_embeddings_bytes(dump_embeddings_bytes(matrix))
        assert loaded.word_map == [-1, 0, 0, 1, -1]

    def test_truncated_payload(self):
        data = dump_embeddings_bytes(self._matrix())
        with pytest.raises(EmbeddingError) as e:
            parse_embeddings_bytes(data[: len(data) // 2])
        assert e.value.code == "truncated"

    def test_magic_mismatch(self):
        data = b"NOTMAGIC" + dump_embeddings_bytes(self._matrix())[8:]
        with pytest.raises(EmbeddingError) as e:
            parse_embeddings_bytes(data)
        assert e.value.code == "magic_mismatch"

    def test_dim_mismatch(self):
        data = dump_embeddings_bytes(self._matrix(dim=4))
        with pytest.raises(EmbeddingError) as e:
            parse_embeddings_bytes(data, expect_dim=8)
        assert e.value.code == "dim_mismatch"

    def test_nan_rows_rejected(self):
        vals = np.array([[1.0, np.nan]], dtype=np.float32)
        matrix = EmbeddingMatrix(unit_ids=["a"], values=vals, level="sentence")
        header = MAGIC + struct.pack("<IIB", 1, 2, 0)
        trailer = json.dumps({"unit_ids": ["a"]}).encode()
        raw = header + vals.tobytes() + struct.pack("<I", len(trailer)) + trailer
        with pytest.raises(EmbeddingError) as e:
            parse_embeddings_bytes(raw)
        assert e.value.code == "nan_rows"

    def test_trailing_bytes_rejected(self):
        data = dump_embeddings_bytes(self._matrix()) + b"junk"
        with pytest.raises(EmbeddingError) as e:
            parse_embeddings_bytes(data)
        assert e.value.code == "trailing_bytes"

    def test_word_map_monotonicity_enforced(self):
        with pytest.raises(EmbeddingError):
            matrix = self._matrix(n=4, level="token", word_map=[-1, 1, 0, -1])
            matrix.validate()

    def test_blocks_group_contiguous_ids(self):
        values = np.ones((4, 2), dtype=np.float32)
        matrix = EmbeddingMatrix(
            unit_ids=["a", "a", "b", "b"], values=values, level="token", word_map=[-1, 0, -1, 0]
        )
        rows, wmap = matrix.block("b")
        assert rows.shape == (2, 2) and wmap == [-1, 0]


class TestEmbedderProfile:
    def test_key_combines_id_and_pooling(self):
        from dialex.embeddings import EmbedderProfile

        profile = EmbedderProfile("mock64-s0", "mean", 64)
        assert profile.key == "mock64-s0:mean"

    def test_native_requires_sentence_vectors(self):
        from dialex.embeddings import EmbedderProfile

        with pytest.raises(EmbeddingError) as e:
            EmbedderProfile("m", "native", 64)
        assert e.value.code == "bad_pooling"
        EmbedderProfile("m", "native", 64, emits_sentence_vectors=True)


class TestMockEmbedder:
    def test_deterministic_across_instances(self):
        a = MockEmbedder(dim=32, seed=5).embed(["Des is a Haus ."], level="sentence")
        b = MockEmbedder(dim=32, seed=5).embed(["Des is a Haus ."], level="sentence")
        assert a.values.tobytes() == b.values.tobytes()

    def test_seed_changes_vectors(self):
        a = MockEmbedder(dim=32, seed=5).embed(["Des is a Haus ."], level="sentence")
        b = MockEmbedder(dim=32, seed=6).embed(["Des is a Haus ."], level="sentence")
        assert a.values.tobytes() != b.values.tobytes()

    def test_two_sentences_rows_and_dim(self):
        matrix = MockEmbedder(dim=48).embed(["Ein Satz .", "No a Satz ."], level="sentence")
        assert matrix.values.shape == (2, 48)
        assert matrix.unit_ids == ["0", "1"]

    def test_token_level_word_map_markers(self):
        matrix = MockEmbedder(dim=16).embed(["Des is a Haus ."], level="token")
        assert matrix.word_map[0] == -1 and matrix.word_map[-1] == -1
        assert set(matrix.word_map) == {-1, 0, 1, 2, 3, 4}

    def test_sentence_mean_equals_pooled_token_rows(self):
        m = MockEmbedder(dim=16)
        text = "Des is a Haus ."
        sent = m.embed([text], level="sentence", pooling="mean").values[0]
        rows, _ = m.embed([text], level="token").block("0")
        assert np.array_equal(sent, pool(rows, "mean"))

    def test_identical_words_share_vectors_across_sentences(self):
        m = MockEmbedder(dim=16)
        t1 = m.embed(["Haus am See ."], level="token")
        t2 = m.embed(["Haus im Tal ."], level="token")
        # first word row after the start marker is "haus" in both
        assert np.array_equal(t1.values[1], t2.values[1])

    def test_fetch_rebinds_unit_ids(self):
        m = MockEmbedder(dim=16)
        matrix = fetch_embeddings(m, ["Ein Satz .", "No a Satz ."], "sentence", unit_ids=["bar:p:0", "bar:p:1"])
        assert matrix.unit_ids == ["bar:p:0", "bar:p:1"]
        assert matrix.row("bar:p:1").shape == (16,)


class _StubHandler(BaseHTTPRequestHandler):
    embedder = MockEmbedder(dim=24, seed=3)
    fail_times = 0

    def log_message(self, *args):
        pass

    def do_GET(self):
        if self.path == "/info":
            body = json.dumps(self.embedder.info()).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.end_headers()
            self.wfile.write(body)
        else:
            self.send_response(404)
            self.end_headers()

    def do_POST(self):
        if type(self).fail_times > 0:
            type(self).fail_times -= 1
            self.send_response(503)
            self.end_headers()
            return
        length = int(self.headers["Content-Length"])
        req = json.loads(self.rfile.read(length))
        matrix = self.embedder.embed(req["texts"], level=req["level"], pooling=req.get("pooling", "mean"))
        body = dump_embeddings_bytes(matrix)
        self.send_response(200)
        self.send_header("Content-Type", "application/octet-stream")
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


class TestHttpClient:
    def test_info_and_embed(self, stub_server):
        client = HttpEmbeddingClient(stub_server)
        assert client.dim == 24
        matrix = fetch_embeddings(client, ["Ein Satz .", "No a Satz ."], "sentence", unit_ids=["a", "b"])
        assert matrix.values.shape == (2, 24)
        local = MockEmbedder(dim=24, seed=3).embed(["Ein Satz .", "No a Satz ."], level="sentence")
        assert matrix.values.tobytes() == local.values.tobytes()

    def test_retries_then_succeeds(self, stub_server):
        _StubHandler.fail_times = 2
        client = HttpEmbeddingClient(stub_server, retries=3)
        matrix = client.embed(["Ein Satz ."], level="sentence")
        assert matrix.values.shape[0] == 1

    def test_exhausted_retries_raise_with_attempts(self, stub_server):
        _StubHandler.fail_times = 10
        client = HttpEmbeddingClient(stub_server, retries=2)
        with pytest.raises(EmbeddingServiceError) as e:
            client.embed(["Ein Satz ."], level="sentence")
        assert e.value.attempts == 2
        _StubHandler.fail_times = 0
