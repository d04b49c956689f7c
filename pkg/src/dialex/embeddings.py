"""Embedding boundary: binary file format, pooling, cosine, and providers.

Binary format (bit-exact, little-endian throughout):
    8 bytes   magic "DBLIEMB1"
    u32       row count
    u32       dim
    1 byte    level: 0 = sentence, 1 = token
    f32[n*d]  row-major values
    u32       trailer byte length
    bytes     UTF-8 JSON trailer {"unit_ids": [...]} plus, at token level,
              {"word_map": [...]} mapping each row to its word index
              (-1 for sentence start/end marker rows)

At token level the rows of one sentence are contiguous and unit_ids repeats
the owning sentence id for every row.

HTTP contract: POST /embed with JSON {texts, level, pooling} answers with the
binary format above (unit ids are positional indices which the client rebinds);
GET /info answers {embedder_id, dim}.
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import requests

MAGIC = b"DBLIEMB1"
LEVEL_SENTENCE = "sentence"
LEVEL_TOKEN = "token"
_LEVEL_BYTE = {LEVEL_SENTENCE: 0, LEVEL_TOKEN: 1}
_BYTE_LEVEL = {0: LEVEL_SENTENCE, 1: LEVEL_TOKEN}

POOLINGS = ("cls", "mean", "native")


class EmbeddingError(ValueError):
    """Embedding-layer failure with a machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class EmbeddingServiceError(RuntimeError):
    """HTTP provider failure after the given number of attempts; retriable."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


@dataclass(frozen=True)
class EmbedderProfile:
    """Identity of one embedding configuration as recorded in mined pairs."""

    embedder_id: str
    pooling: str
    dim: int
    emits_sentence_vectors: bool = False

    def __post_init__(self):
        if self.pooling not in POOLINGS:
            raise EmbeddingError("bad_pooling", f"unknown pooling {self.pooling!r}")
        if self.dim <= 0:
            raise EmbeddingError("dim_mismatch", "dim must be positive")
        if self.pooling == "native" and not self.emits_sentence_vectors:
            raise EmbeddingError(
                "bad_pooling", "native pooling requires a provider that emits sentence vectors directly"
            )

    @property
    def key(self) -> str:
        return f"{self.embedder_id}:{self.pooling}"


@dataclass
class EmbeddingMatrix:
    """Immutable row-per-unit float32 matrix; safe to share once built."""

    unit_ids: list[str]
    values: np.ndarray  # float32, shape (n, dim)
    level: str
    word_map: list[int] | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.values.ndim != 2:
            raise EmbeddingError("bad_shape", f"expected 2-d values, got {self.values.ndim}-d")
        self._index: dict[str, slice] | None = None

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def validate(self, expect_dim: int | None = None) -> None:
        n = self.values.shape[0]
        if len(self.unit_ids) != n:
            raise EmbeddingError("count_mismatch", f"{len(self.unit_ids)} unit ids for {n} rows")
        if self.dim == 0:
            raise EmbeddingError("dim_mismatch", "dim must be positive")
        if expect_dim is not None and self.dim != expect_dim:
            raise EmbeddingError("dim_mismatch", f"expected dim {expect_dim}, file has {self.dim}")
        if not np.isfinite(self.values).all():
            raise EmbeddingError("nan_rows", "matrix contains NaN or Inf values")
        if self.level == LEVEL_TOKEN:
            if self.word_map is None or len(self.word_map) != n:
                raise EmbeddingError("trailer_invalid", "token level requires a word_map covering every row")
            for _, _, wmap in self.blocks():
                last = -1
                for w in wmap:
                    if w == -1:  # marker rows are exempt from monotonicity
                        continue
                    if w < last:
                        raise EmbeddingError("trailer_invalid", "word_map must be non-decreasing within a sentence")
                    last = w
        elif self.word_map is not None:
            raise EmbeddingError("trailer_invalid", "sentence level must not carry a word_map")

    def _build_index(self) -> dict[str, slice]:
        if self._index is None:
            index: dict[str, slice] = {}
            start = 0
            for i in range(1, len(self.unit_ids) + 1):
                if i == len(self.unit_ids) or self.unit_ids[i] != self.unit_ids[start]:
                    index.setdefault(self.unit_ids[start], slice(start, i))
                    start = i
            self._index = index
        return self._index

    def has(self, unit_id: str) -> bool:
        return unit_id in self._build_index()

    def row(self, unit_id: str) -> np.ndarray:
        """Single row for a sentence-level unit id."""
        sl = self._build_index().get(unit_id)
        if sl is None:
            raise EmbeddingError("missing_unit", f"no row for unit {unit_id!r}")
        return self.values[sl.start]

    def block(self, unit_id: str) -> tuple[np.ndarray, list[int]]:
        """Contiguous token rows and word_map slice for one sentence."""
        sl = self._build_index().get(unit_id)
        if sl is None:
            raise EmbeddingError("missing_unit", f"no rows for unit {unit_id!r}")
        wmap = self.word_map[sl] if self.word_map is not None else []
        return self.values[sl], list(wmap)

    def blocks(self) -> Iterable[tuple[str, np.ndarray, list[int]]]:
        for unit_id, sl in self._build_index().items():
            wmap = list(self.word_map[sl]) if self.word_map is not None else []
            yield unit_id, self.values[sl], wmap


def pool(token_rows: np.ndarray, strategy: str) -> np.ndarray:
    """Collapse one sentence's token rows into a sentence vector.

    cls takes row 0 (the sentence-start marker row); mean averages all rows.
    """
    rows = np.asarray(token_rows)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise EmbeddingError("empty_sentence", "pooling requires at least one token row")
    if strategy == "cls":
        return rows[0].copy()
    if strategy == "mean":
        return rows.mean(axis=0)
    raise EmbeddingError("bad_pooling", f"unknown pooling {strategy!r}")


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise EmbeddingError("dim_mismatch", f"vector dims differ: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise EmbeddingError("zero_norm", "cosine of a zero vector is undefined")
    return float(np.dot(u, v) / (nu * nv))


# --- binary format ---------------------------------------------------------


def dump_embeddings_bytes(matrix: EmbeddingMatrix) -> bytes:
    matrix.validate()
    trailer: dict = {"unit_ids": matrix.unit_ids}
    if matrix.level == LEVEL_TOKEN:
        trailer["word_map"] = list(matrix.word_map or [])
    trailer_bytes = json.dumps(trailer, ensure_ascii=False, sort_keys=True).encode("utf-8")
    header = MAGIC + struct.pack("<IIB", matrix.values.shape[0], matrix.dim, _LEVEL_BYTE[matrix.level])
    body = np.ascontiguousarray(matrix.values, dtype="<f4").tobytes()
    return header + body + struct.pack("<I", len(trailer_bytes)) + trailer_bytes


def write_embeddings(matrix: EmbeddingMatrix, path: str | Path) -> None:
    Path(path).write_bytes(dump_embeddings_bytes(matrix))


def parse_embeddings_bytes(data: bytes, expect_dim: int | None = None) -> EmbeddingMatrix:
    if len(data) < len(MAGIC):
        raise EmbeddingError("truncated", "shorter than the magic header")
    if data[: len(MAGIC)] != MAGIC:
        raise EmbeddingError("magic_mismatch", f"bad magic {data[:len(MAGIC)]!r}")
    offset = len(MAGIC)
    if len(data) < offset + 9:
        raise EmbeddingError("truncated", "header incomplete")
    n, dim, level_byte = struct.unpack_from("<IIB", data, offset)
    offset += 9
    if level_byte not in _BYTE_LEVEL:
        raise EmbeddingError("bad_level", f"unknown level byte {level_byte}")
    payload = n * dim * 4
    if len(data) < offset + payload + 4:
        raise EmbeddingError("truncated", "float payload or trailer length missing")
    values = np.frombuffer(data, dtype="<f4", count=n * dim, offset=offset).reshape(n, dim).copy()
    offset += payload
    (trailer_len,) = struct.unpack_from("<I", data, offset)
    offset += 4
    if len(data) < offset + trailer_len:
        raise EmbeddingError("truncated", "trailer payload missing")
    if len(data) > offset + trailer_len:
        raise EmbeddingError("trailing_bytes", "unexpected bytes after the trailer")
    try:
        trailer = json.loads(data[offset : offset + trailer_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise EmbeddingError("trailer_invalid", str(e)) from e
    if "unit_ids" not in trailer:
        raise EmbeddingError("trailer_invalid", "trailer lacks unit_ids")
    matrix = EmbeddingMatrix(
        unit_ids=[str(u) for u in trailer["unit_ids"]],
        values=values,
        level=_BYTE_LEVEL[level_byte],
        word_map=trailer.get("word_map"),
    )
    matrix.validate(expect_dim=expect_dim)
    return matrix


def load_embeddings(path: str | Path, expect_dim: int | None = None) -> EmbeddingMatrix:
    return parse_embeddings_bytes(Path(path).read_bytes(), expect_dim=expect_dim)


# --- providers -------------------------------------------------------------


def _normalize_text(text: str) -> str:
    return " ".join(unicodedata.normalize("NFKC", text).casefold().split())


class MockEmbedder:
    """Deterministic stand-in provider: every vector is a seeded hash of the
    normalized text, L2-normalized. Runs the whole pipeline at desk scale
    with no model anywhere.

    Token level emits a sentence-start marker row hashed from the full
    sentence (so cls pooling keys on the whole sentence), one or two subword
    rows per word, and a constant end marker row; markers map to word -1.
    """

    def __init__(self, dim: int = 64, seed: int = 0):
        if dim <= 0:
            raise EmbeddingError("dim_mismatch", "dim must be positive")
        self.dim = dim
        self.seed = seed
        self.embedder_id = f"mock{dim}-s{seed}"
        self._cache: dict[str, np.ndarray] = {}

    def _hash_vector(self, text: str) -> np.ndarray:
        cached = self._cache.get(text)
        if cached is not None:
            return cached
        need = self.dim * 4
        chunks = []
        for block in range(math.ceil(need / 64)):
            h = hashlib.blake2b(f"{self.seed}|{block}|{text}".encode("utf-8"), digest_size=64)
            chunks.append(h.digest())
        raw = b"".join(chunks)[:need]
        ints = np.frombuffer(raw, dtype="<u4").astype(np.float64)
        vec = ints / 2.0**32 * 2.0 - 1.0
        vec = (vec / np.linalg.norm(vec)).astype(np.float32)
        self._cache[text] = vec
        return vec

    def _subwords(self, word: str) -> list[str]:
        if len(word) >= 8:
            half = len(word) // 2
            return [word[:half], word[half:]]
        return [word]

    def _token_rows(self, text: str) -> tuple[np.ndarray, list[int]]:
        norm = _normalize_text(text)
        rows = [self._hash_vector("<s> " + norm)]
        wmap = [-1]
        for w_idx, word in enumerate(norm.split(" ") if norm else []):
            for sub in self._subwords(word):
                rows.append(self._hash_vector(sub))
                wmap.append(w_idx)
        rows.append(self._hash_vector("</s>"))
        wmap.append(-1)
        return np.stack(rows), wmap

    def embed(self, texts: Sequence[str], level: str, pooling: str = "mean") -> EmbeddingMatrix:
        if level == LEVEL_SENTENCE:
            vecs = []
            for text in texts:
                rows, _ = self._token_rows(text)
                # native pooling for this provider is the whole-sentence hash,
                # which is exactly the cls marker row
                vecs.append(pool(rows, "cls" if pooling == "native" else pooling))
            return EmbeddingMatrix(
                unit_ids=[str(i) for i in range(len(texts))],
                values=np.stack(vecs) if vecs else np.zeros((0, self.dim), np.float32),
                level=LEVEL_SENTENCE,
            )
        if level == LEVEL_TOKEN:
            all_rows = []
            ids = []
            wmap: list[int] = []
            for i, text in enumerate(texts):
                rows, wm = self._token_rows(text)
                all_rows.append(rows)
                ids.extend([str(i)] * rows.shape[0])
                wmap.extend(wm)
            values = np.concatenate(all_rows) if all_rows else np.zeros((0, self.dim), np.float32)
            return EmbeddingMatrix(unit_ids=ids, values=values, level=LEVEL_TOKEN, word_map=wmap)
        raise EmbeddingError("bad_level", f"unknown level {level!r}")

    def info(self) -> dict:
        return {"embedder_id": self.embedder_id, "dim": self.dim}


class HttpEmbeddingClient:
    """Client for the POST /embed + GET /info wire contract."""

    def __init__(self, base_url: str, token: str | None = None, retries: int = 3, timeout: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.token = token
        self.retries = retries
        self.timeout = timeout
        self.session = requests.Session()
        self._info: dict | None = None

    def _headers(self) -> dict:
        return {"X-Embed-Token": self.token} if self.token else {}

    def info(self) -> dict:
        if self._info is None:
            resp = self.session.get(f"{self.base_url}/info", headers=self._headers(), timeout=self.timeout)
            resp.raise_for_status()
            self._info = resp.json()
        return self._info

    @property
    def embedder_id(self) -> str:
        return str(self.info()["embedder_id"])

    @property
    def dim(self) -> int:
        return int(self.info()["dim"])

    def embed(self, texts: Sequence[str], level: str, pooling: str = "mean") -> EmbeddingMatrix:
        body = {"texts": list(texts), "level": level, "pooling": pooling}
        last_error = "no attempt made"
        for attempt in range(1, self.retries + 1):
            try:
                resp = self.session.post(
                    f"{self.base_url}/embed", json=body, headers=self._headers(), timeout=self.timeout
                )
                if resp.status_code >= 500:
                    last_error = f"server returned {resp.status_code}"
                    continue
                if resp.status_code != 200:
                    raise EmbeddingServiceError(f"embed request rejected: {resp.status_code} {resp.text}", attempt)
                return parse_embeddings_bytes(resp.content)
            except requests.RequestException as e:
                last_error = str(e)
        raise EmbeddingServiceError(f"embed request failed: {last_error}", self.retries)


def fetch_embeddings(
    provider,
    texts: Sequence[str],
    level: str,
    pooling: str = "mean",
    unit_ids: Sequence[str] | None = None,
) -> EmbeddingMatrix:
    """Embed texts and rebind the provider's positional unit ids to ours.

    At token level every row of sentence i carries unit_ids[i].
    """
    matrix = provider.embed(texts, level=level, pooling=pooling)
    if unit_ids is not None:
        if len(unit_ids) != len(texts):
            raise EmbeddingError("count_mismatch", "one unit id per text required")
        lookup = {str(i): str(uid) for i, uid in enumerate(unit_ids)}
        try:
            matrix.unit_ids = [lookup[u] for u in matrix.unit_ids]
        except KeyError as e:
            raise EmbeddingError("count_mismatch", f"provider returned unknown positional id {e}") from e
        matrix._index = None
    matrix.validate()
    return matrix


class FileEmbeddingProvider:
    """Serves pre-computed matrices from disk by unit id.

    Expects {dir}/{lang}.sentence.emb and {dir}/{lang}.token.emb files whose
    unit ids are the pipeline's sentence ids.
    """

    def __init__(self, root: str | Path, embedder_id: str | None = None):
        self.root = Path(root)
        self.embedder_id = embedder_id or f"file:{self.root.name}"
        self._loaded: dict[tuple[str, str], EmbeddingMatrix] = {}

    def matrix(self, lang: str, level: str) -> EmbeddingMatrix:
        key = (lang, level)
        if key not in self._loaded:
            path = self.root / f"{lang}.{level}.emb"
            if not path.exists():
                raise EmbeddingError("missing_unit", f"no embedding file {path}")
            self._loaded[key] = load_embeddings(path)
        return self._loaded[key]
