"""Lexicon evaluation: quartile-stratified sampling, dictionary coverage and
match rates, F1 threshold sweeps against human labels, normalized edit
distance with its probability correlation, annotator agreement, and the
pre-aligned word-vector nearest-neighbor baseline.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .lexicon import LexiconEntry
from .miner import MinerError, pearson

DEFAULT_PER_BIN = 250
LIKERT = ("1", "2", "3", "4", "5")


class EvalError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class QuartileSample:
    quartile: int  # 1 = lowest dialect_freq
    entries: tuple[LexiconEntry, ...]


@dataclass(frozen=True)
class F1SweepPoint:
    threshold: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class AgreementReport:
    exact_match_rate: float
    pearson_r: float | None = None  # likert task only


def nearest_rank(sorted_values: Sequence[int], percentile: float) -> int:
    """Nearest-rank percentile: the value at rank ceil(p/100 * n), 1-based."""
    n = len(sorted_values)
    if n == 0:
        raise EvalError("empty_sample", "percentile of an empty sample")
    rank = max(1, math.ceil(percentile / 100.0 * n))
    return sorted_values[rank - 1]


def quartile_bins(lexicon: Sequence[LexiconEntry]) -> list[list[LexiconEntry]]:
    """Partition the lexicon into 4 bins at the 25/50/75 percentiles of
    dialect_freq; entries whose frequency equals a cut point fall in the
    lower bin.
    """
    if not lexicon:
        raise EvalError("empty_sample", "cannot bin an empty lexicon")
    freqs = sorted(e.dialect_freq for e in lexicon)
    c25 = nearest_rank(freqs, 25)
    c50 = nearest_rank(freqs, 50)
    c75 = nearest_rank(freqs, 75)
    bins: list[list[LexiconEntry]] = [[], [], [], []]
    for e in lexicon:
        if e.dialect_freq <= c25:
            bins[0].append(e)
        elif e.dialect_freq <= c50:
            bins[1].append(e)
        elif e.dialect_freq <= c75:
            bins[2].append(e)
        else:
            bins[3].append(e)
    return bins


def stratified_sample(
    lexicon: Sequence[LexiconEntry], per_bin: int = DEFAULT_PER_BIN, seed: int = 0
) -> list[QuartileSample]:
    """Uniform sample without replacement of min(per_bin, bin size) entries
    from each frequency quartile, deterministic per seed.
    """
    rng = random.Random(seed)
    samples = []
    for q, entries in enumerate(quartile_bins(lexicon), start=1):
        ordered = sorted(entries, key=lambda e: (e.dialect_word, e.standard_word))
        take = min(per_bin, len(ordered))
        samples.append(QuartileSample(q, tuple(rng.sample(ordered, take))))
    return samples


def load_dictionary_tsv(path: str | Path) -> dict[str, set[str]]:
    """Dictionary TSV: standard_word, dialect_translation per row; multiple
    rows per headword accumulate. Keys and values are casefolded because
    matching is case-insensitive.
    """
    table: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            head, translation = line.split("\t")[:2]
            table.setdefault(head.casefold(), set()).add(translation.casefold())
    return table


def dictionary_eval(
    samples: Sequence[QuartileSample], dictionary: Mapping[str, set[str]]
) -> list[dict]:
    """Per quartile: coverage (sampled entries whose headword is in the
    dictionary) and match (covered entries whose dialect word equals a listed
    translation, case-insensitive exact). Near-miss spellings count as
    mismatches on purpose; orthographic variation is what gets measured.
    """
    out = []
    for sample in samples:
        n = len(sample.entries)
        covered = 0
        matched = 0
        for e in sample.entries:
            translations = dictionary.get(e.standard_word.casefold())
            if translations is None:
                continue
            covered += 1
            if e.dialect_word.casefold() in translations:
                matched += 1
        row = {
            "quartile": sample.quartile,
            "n": n,
            "covered": covered,
            "matched": matched,
            "coverage": covered / n if n else 0.0,
            "match": matched / covered if covered else 0.0,
            "match_defined": covered > 0,
        }
        out.append(row)
    return out


def f1_sweep(
    entries_with_labels: Sequence[tuple[LexiconEntry, bool]],
    thresholds: Sequence[float] | None = None,
) -> list[F1SweepPoint]:
    """Classify each labeled entry positive iff mean_p >= threshold and score
    precision/recall/F1 against the binary human labels at every threshold.
    Degenerate thresholds (no predicted or no actual positives) score 0, not
    an error.
    """
    if thresholds is None:
        thresholds = [round(0.70 + i * 0.01, 2) for i in range(30)]
    points = []
    for t in thresholds:
        tp = fp = fn = 0
        for entry, label in entries_with_labels:
            predicted = entry.mean_p >= t
            if predicted and label:
                tp += 1
            elif predicted and not label:
                fp += 1
            elif not predicted and label:
                fn += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        points.append(F1SweepPoint(float(t), precision, recall, f1))
    return points


def sweep_flags(entries_with_labels: Sequence[tuple[LexiconEntry, bool]]) -> list[str]:
    labels = {label for _, label in entries_with_labels}
    flags = []
    if len(labels) < 2:
        flags.append("single_class_labels")
    return flags


def levenshtein(a: str, b: str) -> int:
    """Unit-cost Levenshtein distance over Unicode scalar values."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalized_edit_distance(a: str, b: str) -> float:
    """Levenshtein distance divided by the mean of the two lengths."""
    if not a or not b:
        raise EvalError("empty_word", "edit distance of an empty word")
    return levenshtein(a, b) / ((len(a) + len(b)) / 2.0)


def edit_distance_correlation(entries: Sequence[LexiconEntry]) -> float:
    """Pearson r between normalized edit distance and mean alignment
    probability across the lexicon. Similarly spelled pairs aligning with
    higher probability shows up as a negative r.
    """
    if len(entries) < 2:
        raise EvalError("degenerate_sample", "need at least 2 entries")
    distances = [normalized_edit_distance(e.dialect_word, e.standard_word) for e in entries]
    probs = [e.mean_p for e in entries]
    try:
        return pearson(distances, probs)
    except MinerError as e:
        raise EvalError("degenerate_sample", str(e)) from e


def agreement(labels_a: Mapping, labels_b: Mapping, task: str) -> AgreementReport:
    """Inter-annotator agreement over the items both annotators labeled.

    likert: items where either label is not 1..5 are excluded; reports exact
    match rate plus Pearson r over the numeric labels (None when degenerate).
    binary: exact match rate over all shared items.
    """
    if task not in ("likert", "binary"):
        raise EvalError("bad_task", f"unknown agreement task {task!r}")
    shared = sorted(set(labels_a) & set(labels_b))
    if task == "likert":
        shared = [k for k in shared if str(labels_a[k]) in LIKERT and str(labels_b[k]) in LIKERT]
    if not shared:
        raise EvalError("no_overlap", "annotators share no comparable items")
    exact = sum(1 for k in shared if str(labels_a[k]) == str(labels_b[k])) / len(shared)
    if task == "binary":
        return AgreementReport(exact_match_rate=exact)
    try:
        r = pearson([int(labels_a[k]) for k in shared], [int(labels_b[k]) for k in shared])
    except MinerError:
        r = None
    return AgreementReport(exact_match_rate=exact, pearson_r=r)


# --- word-vector nearest-neighbor baseline ----------------------------------


def load_word_vectors(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Text word-vector format: first line "count dim", then one word plus
    dim space-separated floats per line. Repeated words keep their first row.
    """
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise EvalError("bad_header", f"expected 'count dim' header in {path}")
        count, dim = int(header[0]), int(header[1])
        words: list[str] = []
        seen: set[str] = set()
        rows = []
        for line in f:
            parts = line.rstrip("\n").split(" ")
            if len(parts) < dim + 1:
                raise EvalError("bad_row", f"row with {len(parts) - 1} values, expected {dim}")
            word = parts[0]
            if word in seen:
                continue
            seen.add(word)
            words.append(word)
            rows.append([float(x) for x in parts[1 : dim + 1]])
    if len(words) != count:
        raise EvalError("bad_header", f"header says {count} words, file has {len(words)}")
    return words, np.asarray(rows, dtype=np.float64)


@dataclass(frozen=True)
class NNBaselineReport:
    correct: int
    evaluated: int
    gold_size: int
    misses: tuple[str, ...]  # gold dialect words absent from the vocabulary

    def to_dict(self) -> dict:
        return {
            "correct": self.correct,
            "evaluated": self.evaluated,
            "gold_size": self.gold_size,
            "missing_from_vocabulary": list(self.misses),
        }


def nn_baseline(
    dialect_vectors: tuple[list[str], np.ndarray],
    standard_vectors: tuple[list[str], np.ndarray],
    gold: Mapping[str, set[str]],
) -> NNBaselineReport:
    """For each gold dialect word in the dialect vocabulary, retrieve the
    cosine-nearest standard word and count retrievals equal (case-insensitive)
    to a human-accepted translation.
    """
    d_words, d_mat = dialect_vectors
    s_words, s_mat = standard_vectors
    d_index = {w: i for i, w in enumerate(d_words)}
    s_norms = np.linalg.norm(s_mat, axis=1)
    s_norms[s_norms == 0] = 1.0
    s_unit = s_mat / s_norms[:, None]
    correct = 0
    evaluated = 0
    misses = []
    for dialect_word in sorted(gold):
        idx = d_index.get(dialect_word)
        if idx is None:
            misses.append(dialect_word)
            continue
        v = d_mat[idx]
        norm = np.linalg.norm(v)
        if norm == 0:
            misses.append(dialect_word)
            continue
        sims = s_unit @ (v / norm)
        retrieved = s_words[int(np.argmax(sims))]
        evaluated += 1
        accepted = {t.casefold() for t in gold[dialect_word]}
        if retrieved.casefold() in accepted:
            correct += 1
    return NNBaselineReport(correct, evaluated, len(gold), tuple(misses))


def write_f1_sweep_tsv(points: Sequence[F1SweepPoint], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("threshold\tprecision\trecall\tf1\n")
        for p in points:
            f.write(f"{p.threshold:.2f}\t{p.precision:.6f}\t{p.recall:.6f}\t{p.f1:.6f}\n")
