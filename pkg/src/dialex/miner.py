"""Bitext mining: per-page-pair nearest-neighbor retrieval by cosine,
cutoff filtering, and score-distribution statistics for comparing embedders.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Sentence
from .embeddings import EmbeddingMatrix

DEFAULT_CUTOFF = 0.7
DEFAULT_SAMPLE_SIZE = 1500
DEFAULT_SAMPLE_RANGE = (0.4, 0.95)
DEFAULT_THRESHOLDS = (0.5, 0.6, 0.7, 0.8, 0.9)


class MinerError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class SentencePair:
    src_id: str
    tgt_id: str
    cos: float
    embedder_id: str


@dataclass(frozen=True)
class ScoreDistribution:
    embedder_id: str
    mean: float
    std: float
    fraction_at_or_above: dict[float, float]

    def to_dict(self) -> dict:
        return {
            "embedder_id": self.embedder_id,
            "mean": self.mean,
            "std": self.std,
            "fraction_at_or_above": {f"{t:.2f}": v for t, v in sorted(self.fraction_at_or_above.items())},
        }


def _unit_rows(sentences: Sequence[Sentence], embeddings: EmbeddingMatrix) -> np.ndarray:
    rows = []
    for s in sentences:
        if not embeddings.has(s.sentence_id):
            raise MinerError("missing_embedding", f"no embedding row for sentence {s.sentence_id}")
        rows.append(embeddings.row(s.sentence_id))
    mat = np.stack(rows).astype(np.float64)
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    if (norms == 0).any():
        bad = sentences[int(np.argmin(norms))].sentence_id
        raise MinerError("zero_norm", f"zero-norm sentence embedding for {bad}")
    return mat / norms


def mine_page_pair(
    src_sentences: Sequence[Sentence],
    tgt_sentences: Sequence[Sentence],
    embeddings: EmbeddingMatrix,
    k: int = 1,
    embedder_id: str = "",
) -> list[SentencePair]:
    """For each source sentence, its top-k target sentences by cosine.

    Retrieval is exact brute force within the page pair; ties break on
    ascending target sentence id so the output is deterministic.
    """
    if not src_sentences or not tgt_sentences:
        raise MinerError("empty_page", "both sides of a page pair must be non-empty")
    if src_sentences[0].lang == tgt_sentences[0].lang:
        raise MinerError("same_language", "source and target sides share a language")
    if k < 1:
        raise MinerError("bad_k", "k must be positive")
    src = _unit_rows(src_sentences, embeddings)
    tgt = _unit_rows(tgt_sentences, embeddings)
    sims = src @ tgt.T
    pairs: list[SentencePair] = []
    for i, s in enumerate(src_sentences):
        ranked = sorted(
            ((float(sims[i, j]), tgt_sentences[j].sentence_id) for j in range(len(tgt_sentences))),
            key=lambda c: (-c[0], c[1]),
        )
        for cos, tgt_id in ranked[:k]:
            pairs.append(SentencePair(s.sentence_id, tgt_id, cos, embedder_id))
    return pairs


def apply_cutoff(pairs: Iterable[SentencePair], tau: float = DEFAULT_CUTOFF) -> list[SentencePair]:
    """Keep exactly the pairs with cos >= tau (boundary inclusive)."""
    if not -1.0 <= tau <= 1.0:
        raise MinerError("bad_cutoff", f"cutoff {tau} outside [-1, 1]")
    return [p for p in pairs if p.cos >= tau]


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise MinerError("bad_input", "pearson needs two equal-length 1-d samples")
    if xs.size < 2:
        raise MinerError("degenerate_sample", "pearson needs at least 2 points")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sx = float(np.sqrt(np.dot(dx, dx)))
    sy = float(np.sqrt(np.dot(dy, dy)))
    if sx == 0.0 or sy == 0.0:
        raise MinerError("degenerate_sample", "zero variance in a pearson argument")
    return float(np.dot(dx, dy) / (sx * sy))


def score_distribution(
    pairs: Sequence[SentencePair], thresholds: Sequence[float] = DEFAULT_THRESHOLDS
) -> ScoreDistribution:
    """Sample mean/std (n-1 denominator) of cosine scores plus, per threshold,
    the fraction of pairs scoring at or above it.
    """
    if not pairs:
        raise MinerError("empty_sample", "cannot summarize zero pairs")
    ids = {p.embedder_id for p in pairs}
    if len(ids) > 1:
        raise MinerError("mixed_embedders", f"pairs span several embedders: {sorted(ids)}")
    scores = np.asarray([p.cos for p in pairs], dtype=np.float64)
    std = float(scores.std(ddof=1)) if scores.size > 1 else 0.0
    fractions = {float(t): float((scores >= t).mean()) for t in thresholds}
    return ScoreDistribution(pairs[0].embedder_id, float(scores.mean()), std, fractions)


def group_scores_by_label(
    pairs: Iterable[SentencePair], annotations: Iterable[Mapping]
) -> dict[int, list[float]]:
    """Cosine scores grouped by Likert label 1..5; escape labels are excluded.

    Annotation records carry src_sentence_id, tgt_sentence_id, and label, as
    produced by the annotation export.
    """
    by_key = {(p.src_id, p.tgt_id): p.cos for p in pairs}
    groups: dict[int, list[float]] = {}
    for rec in annotations:
        label = str(rec.get("label"))
        if label not in {"1", "2", "3", "4", "5"}:
            continue
        key = (rec.get("src_sentence_id"), rec.get("tgt_sentence_id"))
        if key not in by_key:
            continue
        groups.setdefault(int(label), []).append(by_key[key])
    return groups


def sample_for_annotation(
    pairs: Sequence[SentencePair],
    n: int = DEFAULT_SAMPLE_SIZE,
    score_range: tuple[float, float] = DEFAULT_SAMPLE_RANGE,
    seed: int = 0,
) -> tuple[list[SentencePair], bool]:
    """Uniform sample without replacement of pairs inside the score range.

    Returns (sample, exhausted) where exhausted flags that the in-range
    population was not larger than n and was returned whole.
    """
    lo, hi = score_range
    in_range = sorted(
        (p for p in pairs if lo <= p.cos <= hi),
        key=lambda p: (p.src_id, p.tgt_id, p.embedder_id),
    )
    if len(in_range) <= n:
        return in_range, True
    rng = random.Random(seed)
    return rng.sample(in_range, n), False


def write_pairs_tsv(pairs: Iterable[SentencePair], path: str | Path) -> None:
    """Mined bitext TSV: src id, tgt id, cosine to 6 decimals, embedder id."""
    with open(path, "w", encoding="utf-8") as f:
        for p in pairs:
            f.write(f"{p.src_id}\t{p.tgt_id}\t{p.cos:.6f}\t{p.embedder_id}\n")


def read_pairs_tsv(path: str | Path) -> list[SentencePair]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            src_id, tgt_id, cos, embedder_id = line.split("\t")
            out.append(SentencePair(src_id, tgt_id, float(cos), embedder_id))
    return out


def model_comparison(per_embedder_pairs: Mapping[str, Sequence[SentencePair]]) -> dict:
    """Cross-embedder report: each embedder's score distribution plus pairwise
    Pearson correlation over the (src, tgt) pairs the two embedders share.
    """
    report: dict = {"embedders": {}, "pairwise_pearson": {}}
    for embedder_id, pairs in sorted(per_embedder_pairs.items()):
        report["embedders"][embedder_id] = score_distribution(pairs).to_dict()
    names = sorted(per_embedder_pairs)
    for i, a in enumerate(names):
        scores_a = {(p.src_id, p.tgt_id): p.cos for p in per_embedder_pairs[a]}
        for b in names[i + 1 :]:
            scores_b = {(p.src_id, p.tgt_id): p.cos for p in per_embedder_pairs[b]}
            shared = sorted(set(scores_a) & set(scores_b))
            entry: dict = {"shared_pairs": len(shared)}
            if len(shared) >= 2:
                try:
                    entry["pearson_r"] = pearson(
                        [scores_a[key] for key in shared], [scores_b[key] for key in shared]
                    )
                except MinerError:
                    entry["pearson_r"] = None
            else:
                entry["pearson_r"] = None
            report["pairwise_pearson"][f"{a}|{b}"] = entry
    return report


def write_model_comparison(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8")
