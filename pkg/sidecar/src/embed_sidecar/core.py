"""Embedding assembly: encoder output to wire-format matrices and files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .encoder import ProviderConfig, Warning_, build_encoder
from .wire import encode_matrix

POOLINGS = ("cls", "mean", "native")
LEVELS = ("sentence", "token")


def pool_rows(rows: np.ndarray, pooling: str) -> np.ndarray:
    if pooling == "mean":
        return rows.mean(axis=0)
    # cls and native both take the sentence-start row; these encoders carry
    # the whole-sentence representation there
    return rows[0]


def embed_to_bytes(
    encoder,
    texts: list[str],
    level: str,
    pooling: str,
    max_rows: int,
    unit_ids: list[str] | None = None,
) -> tuple[bytes, list[Warning_]]:
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    if pooling not in POOLINGS:
        raise ValueError(f"unknown pooling {pooling!r}")
    if not texts:
        raise ValueError("texts must be non-empty")
    ids = [str(u) for u in unit_ids] if unit_ids is not None else [str(i) for i in range(len(texts))]
    if len(ids) != len(texts):
        raise ValueError("one unit id per text required")
    encoded, warnings = encoder.encode(list(texts), max_rows=max_rows)
    if level == "sentence":
        values = np.stack([pool_rows(e.rows, pooling) for e in encoded]).astype(np.float32)
        return encode_matrix(ids, values, "sentence"), warnings
    values = np.concatenate([e.rows for e in encoded]).astype(np.float32)
    row_ids: list[str] = []
    word_map: list[int] = []
    for uid, e in zip(ids, encoded):
        row_ids.extend([uid] * e.rows.shape[0])
        word_map.extend(e.word_map)
    return encode_matrix(row_ids, values, "token", word_map), warnings


def read_sentences_jsonl(path: str | Path) -> tuple[list[str], list[str]]:
    """Sentence ids and their space-joined token texts from the pipeline's
    sentences.jsonl format.
    """
    ids = []
    texts = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            ids.append(str(rec["sentence_id"]))
            texts.append(" ".join(rec["tokens"]))
    return ids, texts


def embed_file(
    config: ProviderConfig,
    in_path: str | Path,
    out_path: str | Path,
    level: str,
    pooling: str | None = None,
) -> list[Warning_]:
    """Embed a sentences JSONL file into the binary format; truncated
    sentences are embedded anyway and reported, never dropped silently.
    """
    encoder = build_encoder(config)
    ids, texts = read_sentences_jsonl(in_path)
    if not ids:
        raise ValueError(f"no sentences in {in_path}")
    payload, warnings = embed_to_bytes(
        encoder, texts, level=level, pooling=pooling or config.pooling, max_rows=config.max_rows, unit_ids=ids
    )
    Path(out_path).write_bytes(payload)
    return warnings
