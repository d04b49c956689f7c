"""One-to-one word alignment from token-embedding similarity matrices.

Word vectors are subword means; the |src| x |tgt| cosine matrix is turned
into links by mutual argmax over the row-wise (forward) and column-wise
(backward) softmaxes. A link's probability is the geometric mean of the two
directional softmax probabilities, which makes the link set and scores
invariant under matrix transposition.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Sentence
from .embeddings import EmbeddingMatrix
from .miner import SentencePair


class AlignError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class AlignmentLink:
    src_word_idx: int
    tgt_word_idx: int
    p: float


@dataclass(frozen=True)
class WordPairObservation:
    dialect_word: str
    standard_word: str
    p: float
    src_sentence_id: str
    tgt_sentence_id: str


def word_vectors(token_matrix: EmbeddingMatrix, sentence: Sentence) -> np.ndarray:
    """One vector per word: the arithmetic mean of the word's subword rows.

    Marker rows (word index -1) are dropped; every word must own at least
    one row.
    """
    rows, wmap = token_matrix.block(sentence.sentence_id)
    n_words = len(sentence.tokens)
    groups: dict[int, list[int]] = {}
    for row_idx, w in enumerate(wmap):
        if w == -1:
            continue
        if w < 0 or w >= n_words:
            raise AlignError(
                "word_map_out_of_range",
                f"word index {w} outside 0..{n_words - 1} in sentence {sentence.sentence_id}",
            )
        groups.setdefault(w, []).append(row_idx)
    vecs = np.empty((n_words, rows.shape[1]), dtype=np.float64)
    for w in range(n_words):
        if w not in groups:
            raise AlignError(
                "unmapped_word",
                f"word {w} ({sentence.tokens[w]!r}) has no token rows in sentence {sentence.sentence_id}",
            )
        vecs[w] = rows[groups[w]].astype(np.float64).mean(axis=0)
    return vecs


def similarity_matrix(
    src_vecs: np.ndarray,
    tgt_vecs: np.ndarray,
    src_words: Sequence[str] | None = None,
    tgt_words: Sequence[str] | None = None,
) -> np.ndarray:
    """Entry (i, j) is the cosine between source word i and target word j."""
    src = np.asarray(src_vecs, dtype=np.float64)
    tgt = np.asarray(tgt_vecs, dtype=np.float64)
    if src.ndim != 2 or tgt.ndim != 2 or src.shape[0] == 0 or tgt.shape[0] == 0:
        raise AlignError("empty_side", "both word-vector sets must be non-empty 2-d arrays")
    if src.shape[1] != tgt.shape[1]:
        raise AlignError("dim_mismatch", f"dims differ: {src.shape[1]} vs {tgt.shape[1]}")
    for side, mat, words in (("source", src, src_words), ("target", tgt, tgt_words)):
        norms = np.linalg.norm(mat, axis=1)
        if (norms == 0).any():
            idx = int(np.argmin(norms))
            name = words[idx] if words is not None else f"index {idx}"
            raise AlignError("zero_norm", f"zero-norm {side} word vector: {name}")
    src = src / np.linalg.norm(src, axis=1, keepdims=True)
    tgt = tgt / np.linalg.norm(tgt, axis=1, keepdims=True)
    return src @ tgt.T


def _row_softmax(matrix: np.ndarray) -> np.ndarray:
    # contiguous copy so transposed views take the identical float path
    x = np.ascontiguousarray(matrix, dtype=np.float64)
    x = x - x.max(axis=1, keepdims=True)
    e = np.exp(x)
    return e / e.sum(axis=1, keepdims=True)


def extract_alignment(sim: np.ndarray) -> list[AlignmentLink]:
    """Extract one-to-one links by mutual argmax of the directional softmaxes.

    A cell is a candidate when it maximizes both its row of the forward
    softmax and its column of the backward softmax; tied maxima all count.
    Candidates are committed greedily in (i, j) order, skipping any whose
    word is already linked, which resolves ties toward lower indices while
    keeping the alignment one-to-one. p = sqrt(p_fwd * p_bwd).
    """
    sim = np.asarray(sim, dtype=np.float64)
    if sim.ndim != 2 or sim.size == 0:
        raise AlignError("empty_side", "similarity matrix must be non-empty and 2-d")
    if not np.isfinite(sim).all():
        raise AlignError("non_finite", "similarity matrix contains NaN or Inf")
    p_fwd = _row_softmax(sim)
    p_bwd = _row_softmax(sim.T).T
    candidates = (p_fwd == p_fwd.max(axis=1, keepdims=True)) & (p_bwd == p_bwd.max(axis=0, keepdims=True))
    links: list[AlignmentLink] = []
    used_src: set[int] = set()
    used_tgt: set[int] = set()
    for i, j in zip(*np.nonzero(candidates)):
        i, j = int(i), int(j)
        if i in used_src or j in used_tgt:
            continue
        used_src.add(i)
        used_tgt.add(j)
        links.append(AlignmentLink(i, j, math.sqrt(p_fwd[i, j] * p_bwd[i, j])))
    return links


def align_sentence_pair(
    pair: SentencePair,
    src_sentence: Sentence,
    tgt_sentence: Sentence,
    src_embeddings: EmbeddingMatrix,
    tgt_embeddings: EmbeddingMatrix,
) -> list[WordPairObservation]:
    """word_vectors -> similarity_matrix -> extract_alignment, with link
    indices mapped back to surface tokens. Unaligned words simply yield no
    observation.
    """
    src_vecs = word_vectors(src_embeddings, src_sentence)
    tgt_vecs = word_vectors(tgt_embeddings, tgt_sentence)
    sim = similarity_matrix(src_vecs, tgt_vecs, src_sentence.tokens, tgt_sentence.tokens)
    return [
        WordPairObservation(
            dialect_word=src_sentence.tokens[link.src_word_idx],
            standard_word=tgt_sentence.tokens[link.tgt_word_idx],
            p=link.p,
            src_sentence_id=pair.src_id,
            tgt_sentence_id=pair.tgt_id,
        )
        for link in extract_alignment(sim)
    ]


def links_for_pair(
    src_sentence: Sentence,
    tgt_sentence: Sentence,
    src_embeddings: EmbeddingMatrix,
    tgt_embeddings: EmbeddingMatrix,
) -> list[AlignmentLink]:
    src_vecs = word_vectors(src_embeddings, src_sentence)
    tgt_vecs = word_vectors(tgt_embeddings, tgt_sentence)
    return extract_alignment(similarity_matrix(src_vecs, tgt_vecs, src_sentence.tokens, tgt_sentence.tokens))


def write_alignments_jsonl(
    records: Iterable[tuple[SentencePair, list[AlignmentLink]]], path: str | Path
) -> None:
    """One object per sentence pair: ids plus its links as {i, j, p}."""
    with open(path, "w", encoding="utf-8") as f:
        for pair, links in records:
            rec = {
                "src_sentence_id": pair.src_id,
                "tgt_sentence_id": pair.tgt_id,
                "links": [{"i": l.src_word_idx, "j": l.tgt_word_idx, "p": l.p} for l in links],
            }
            f.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def read_alignments_jsonl(path: str | Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(json.loads(line))
    return out


def write_pharaoh(records: Iterable[tuple[SentencePair, list[AlignmentLink]]], path: str | Path) -> None:
    """Pharaoh text format: one "i-j i-j ..." line per sentence pair."""
    with open(path, "w", encoding="utf-8") as f:
        for _, links in records:
            f.write(" ".join(f"{l.src_word_idx}-{l.tgt_word_idx}" for l in links) + "\n")
