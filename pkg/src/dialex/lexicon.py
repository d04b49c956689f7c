"""Lexicon aggregation: word-pair observations to entries with counts, mean
alignment probability, corpus frequency, probability cutoff, and one-to-many
synonym grouping.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

from .aligner import WordPairObservation


@dataclass(frozen=True)
class LexiconEntry:
    dialect_word: str
    standard_word: str
    count: int
    mean_p: float
    dialect_freq: int = 0


@dataclass(frozen=True)
class SynonymGroup:
    standard_word: str
    variants: tuple[tuple[str, int], ...]  # (dialect_word, count), count descending


def is_word(token: str) -> bool:
    """A word has at least one letter and no digit; clitic apostrophes and
    hyphens are fine, pure punctuation and numbers are not.
    """
    return any(c.isalpha() for c in token) and not any(c.isdigit() for c in token)


def aggregate(observations: Iterable[WordPairObservation]) -> list[LexiconEntry]:
    """Group observations by the exact case-sensitive word pair.

    Pairs with a non-word member are dropped before grouping (is_word only
    looks at the token, so dropping before or after grouping is equivalent).
    Spelling variants are never merged: there is no lemmatizer to merge with.
    """
    counts: dict[tuple[str, str], int] = defaultdict(int)
    p_sums: dict[tuple[str, str], float] = defaultdict(float)
    for obs in observations:
        if not is_word(obs.dialect_word) or not is_word(obs.standard_word):
            continue
        key = (obs.dialect_word, obs.standard_word)
        counts[key] += 1
        p_sums[key] += obs.p
    entries = [
        LexiconEntry(dialect_word=d, standard_word=s, count=c, mean_p=p_sums[(d, s)] / c)
        for (d, s), c in counts.items()
    ]
    entries.sort(key=lambda e: (-e.count, e.dialect_word, e.standard_word))
    return entries


def apply_probability_cutoff(entries: Iterable[LexiconEntry], theta: float = 0.8) -> list[LexiconEntry]:
    """Keep entries with mean_p >= theta (boundary inclusive)."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"probability cutoff {theta} outside [0, 1]")
    return [e for e in entries if e.mean_p >= theta]


def group_one_to_many(entries: Iterable[LexiconEntry]) -> list[SynonymGroup]:
    """Group entries by their standard-language headword; each group lists the
    dialect variants sorted by count descending.
    """
    by_head: dict[str, list[LexiconEntry]] = defaultdict(list)
    for e in entries:
        by_head[e.standard_word].append(e)
    groups = []
    for head in sorted(by_head):
        variants = sorted(by_head[head], key=lambda e: (-e.count, e.dialect_word))
        groups.append(SynonymGroup(head, tuple((e.dialect_word, e.count) for e in variants)))
    return groups


def attach_frequencies(entries: Iterable[LexiconEntry], freq_index: Mapping[str, int]) -> list[LexiconEntry]:
    """Set dialect_freq from the dialect corpus token counts (case-sensitive
    surface match; absent words get 0).
    """
    return [replace(e, dialect_freq=int(freq_index.get(e.dialect_word, 0))) for e in entries]


def write_lexicon_tsv(entries: Iterable[LexiconEntry], path: str | Path) -> None:
    """TSV columns: dialect_word, standard_word, count, mean_p (4 decimals),
    dialect_freq; sorted by count descending then dialect_word.
    """
    rows = sorted(entries, key=lambda e: (-e.count, e.dialect_word, e.standard_word))
    with open(path, "w", encoding="utf-8") as f:
        for e in rows:
            f.write(f"{e.dialect_word}\t{e.standard_word}\t{e.count}\t{e.mean_p:.4f}\t{e.dialect_freq}\n")


def read_lexicon_tsv(path: str | Path) -> list[LexiconEntry]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            d, s, count, mean_p, freq = line.split("\t")
            out.append(LexiconEntry(d, s, int(count), float(mean_p), int(freq)))
    return out


def write_synonym_groups_json(groups: Iterable[SynonymGroup], path: str | Path) -> None:
    payload = [
        {
            "standard_word": g.standard_word,
            "variants": [{"dialect_word": d, "count": c} for d, c in g.variants],
        }
        for g in groups
    ]
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
