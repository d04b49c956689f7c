"""Corpus ingestion: sentence splitting, tokenization, filtering, page pairing.

Input layout: one directory per language with one UTF-8 text file per page
(filename stem = page id), plus a TSV link table pairing dialect pages with
standard-language pages.
"""

from __future__ import annotations

import json
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

TOKEN_MIN = 5
TOKEN_MAX = 25

# Rejection reasons, checked in this order; the first match wins.
REASONS = ("too_short", "too_long", "unbalanced_brackets", "bullet_point", "foreign_script")

# Greek, Cyrillic, and Hebrew blocks. Latin-extended characters (umlauts,
# eszett, diacritics) never fall in these ranges.
_FOREIGN_BLOCKS = (
    (0x0370, 0x03FF),  # Greek and Coptic
    (0x1F00, 0x1FFF),  # Greek Extended
    (0x0400, 0x04FF),  # Cyrillic
    (0x0500, 0x052F),  # Cyrillic Supplement
    (0x0590, 0x05FF),  # Hebrew
)

SENTENCE_FINAL = ".!?"


@dataclass(frozen=True)
class Sentence:
    sentence_id: str
    page_id: str
    lang: str
    text: str
    tokens: tuple[str, ...]

    def embedding_text(self) -> str:
        """Canonical single-space token form used for all embedding requests."""
        return " ".join(self.tokens)


@dataclass(frozen=True)
class PageLink:
    dialect_page_id: str
    standard_page_id: str
    dialect_title: str = ""
    standard_title: str = ""


@dataclass(frozen=True)
class CorpusStats:
    n_pages: int
    n_sentences: int
    n_tokens: int
    n_types: int

    def to_dict(self) -> dict:
        return {
            "n_pages": self.n_pages,
            "n_sentences": self.n_sentences,
            "n_tokens": self.n_tokens,
            "n_types": self.n_types,
        }


# A splitter takes raw page text and yields (sentence_text, tokens) pairs.
# This is the injection point for plugging in an external tool's output.
Splitter = Callable[[str], list[tuple[str, list[str]]]]


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _tokenize(sentence: str) -> list[str]:
    """Whitespace tokenization, peeling leading/trailing punctuation off words.

    Internal punctuation (clitic apostrophes, hyphens) stays attached.
    """
    tokens: list[str] = []
    for chunk in sentence.split():
        lead: list[str] = []
        trail: list[str] = []
        while chunk and _is_punct(chunk[0]):
            lead.append(chunk[0])
            chunk = chunk[1:]
        while chunk and _is_punct(chunk[-1]):
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return tokens


def default_splitter(page_text: str) -> list[tuple[str, list[str]]]:
    """Rule-based sentence splitter: break after sentence-final punctuation
    followed by whitespace and an uppercase letter or digit.
    """
    out: list[tuple[str, list[str]]] = []
    for line in page_text.split("\n"):
        line = line.strip()
        if not line:
            continue
        start = 0
        i = 0
        n = len(line)
        while i < n:
            if line[i] in SENTENCE_FINAL:
                j = i + 1
                while j < n and line[j] in SENTENCE_FINAL:
                    j += 1
                k = j
                while k < n and line[k].isspace():
                    k += 1
                if k > j and k < n and (line[k].isupper() or line[k].isdigit()):
                    out.append((line[start:j].strip(), []))
                    start = k
                    i = k
                    continue
                i = j
            else:
                i += 1
        rest = line[start:].strip()
        if rest:
            out.append((rest, []))
    return [(text, _tokenize(text)) for text, _ in out]


def pretokenized_splitter(page_text: str) -> list[tuple[str, list[str]]]:
    """Parse pages already split by an external tool: one sentence per line,
    tokens separated by single spaces.
    """
    out = []
    for line in page_text.split("\n"):
        line = line.strip()
        if line:
            out.append((line, line.split(" ")))
    return out


def split_and_tokenize(page_text: str, splitter: Splitter, lang: str = "", page_id: str = "") -> list[Sentence]:
    """Run the splitter over a page and wrap the results as Sentence records.

    Sentence ids encode (lang, page, position) and are assigned before
    filtering, so they stay stable whatever the filter outcome.
    """
    sentences = []
    for idx, (text, tokens) in enumerate(splitter(page_text)):
        if not tokens:
            continue
        sentences.append(
            Sentence(
                sentence_id=f"{lang}:{page_id}:{idx}",
                page_id=page_id,
                lang=lang,
                text=text,
                tokens=tuple(tokens),
            )
        )
    return sentences


def _has_foreign_script(text: str) -> bool:
    for ch in text:
        cp = ord(ch)
        for lo, hi in _FOREIGN_BLOCKS:
            if lo <= cp <= hi:
                return True
    return False


def filter_sentence(s: Sentence) -> str | None:
    """Return the rejection reason for a sentence, or None to keep it.

    Reasons are checked in REASONS order; the first match wins, so every
    rejection carries exactly one reason.
    """
    n = len(s.tokens)
    if n < TOKEN_MIN:
        return "too_short"
    if n > TOKEN_MAX:
        return "too_long"
    if s.text.count("(") != s.text.count(")") or s.text.count("[") != s.text.count("]"):
        return "unbalanced_brackets"
    if "•" in s.text or s.text.startswith(("- ", "* ", "· ")):
        return "bullet_point"
    if _has_foreign_script(s.text):
        return "foreign_script"
    return None


@dataclass
class PageCorpus:
    """Retained sentences of one language, grouped by page."""

    lang: str
    pages: dict[str, list[Sentence]] = field(default_factory=dict)
    rejections: list[tuple[Sentence, str]] = field(default_factory=list)
    n_pages_ingested: int = 0

    def retained(self) -> list[Sentence]:
        return [s for page in self.pages.values() for s in page]


def ingest_pages(page_texts: dict[str, str], lang: str, splitter: Splitter) -> PageCorpus:
    """Split, tokenize, and filter every page. Pages are independent, so the
    dict may be built from parallel per-page work and merged.
    """
    corpus = PageCorpus(lang=lang)
    for page_id in sorted(page_texts):
        corpus.n_pages_ingested += 1
        kept = []
        for s in split_and_tokenize(page_texts[page_id], splitter, lang, page_id):
            reason = filter_sentence(s)
            if reason is None:
                kept.append(s)
            else:
                corpus.rejections.append((s, reason))
        corpus.pages[page_id] = kept
    return corpus


def load_page_dir(path: str | Path) -> dict[str, str]:
    pages = {}
    for f in sorted(Path(path).iterdir()):
        if f.is_file():
            pages[f.stem] = f.read_text(encoding="utf-8")
    return pages


def read_link_table(path: str | Path) -> list[PageLink]:
    """Read the page link TSV: dialect_page_id, standard_page_id,
    dialect_title, standard_title (titles optional).
    """
    links = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise ValueError(f"link table row needs at least 2 columns: {line!r}")
            links.append(
                PageLink(
                    dialect_page_id=cols[0],
                    standard_page_id=cols[1],
                    dialect_title=cols[2] if len(cols) > 2 else "",
                    standard_title=cols[3] if len(cols) > 3 else "",
                )
            )
    return links


def pair_pages(
    links: Iterable[PageLink],
    dialect: PageCorpus,
    standard: PageCorpus,
) -> tuple[list[tuple[str, str]], list[tuple[PageLink, str]]]:
    """Resolve the link table against both corpora.

    A link survives only if both pages exist and retained at least one
    sentence; everything else is dropped with a reason. Duplicate dialect
    page ids keep their first link.
    """
    pairs: list[tuple[str, str]] = []
    dropped: list[tuple[PageLink, str]] = []
    seen: set[str] = set()
    for link in links:
        if link.dialect_page_id in seen:
            dropped.append((link, "duplicate_dialect_page"))
            continue
        seen.add(link.dialect_page_id)
        if link.dialect_page_id not in dialect.pages:
            dropped.append((link, "missing_dialect_page"))
            continue
        if link.standard_page_id not in standard.pages:
            dropped.append((link, "missing_standard_page"))
            continue
        if not dialect.pages[link.dialect_page_id]:
            dropped.append((link, "no_retained_dialect_sentences"))
            continue
        if not standard.pages[link.standard_page_id]:
            dropped.append((link, "no_retained_standard_sentences"))
            continue
        pairs.append((link.dialect_page_id, link.standard_page_id))
    return pairs, dropped


def compute_stats(corpus: PageCorpus) -> CorpusStats:
    """Counts over retained sentences; types are case-sensitive surface forms."""
    n_sentences = 0
    n_tokens = 0
    types: set[str] = set()
    for s in corpus.retained():
        n_sentences += 1
        n_tokens += len(s.tokens)
        types.update(s.tokens)
    return CorpusStats(
        n_pages=corpus.n_pages_ingested,
        n_sentences=n_sentences,
        n_tokens=n_tokens,
        n_types=len(types),
    )


def token_frequencies(corpus: PageCorpus) -> Counter:
    """Case-sensitive surface-form counts over the retained token stream."""
    freq: Counter = Counter()
    for s in corpus.retained():
        freq.update(s.tokens)
    return freq


def write_sentences_jsonl(sentences: Iterable[Sentence], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for s in sentences:
            rec = {
                "sentence_id": s.sentence_id,
                "page_id": s.page_id,
                "lang": s.lang,
                "text": s.text,
                "tokens": list(s.tokens),
            }
            f.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def read_sentences_jsonl(path: str | Path) -> list[Sentence]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            out.append(
                Sentence(
                    sentence_id=rec["sentence_id"],
                    page_id=rec["page_id"],
                    lang=rec["lang"],
                    text=rec["text"],
                    tokens=tuple(rec["tokens"]),
                )
            )
    return out


def write_rejections_tsv(rejections: Iterable[tuple[Sentence, str]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for s, reason in rejections:
            text = s.text.replace("\t", " ")
            f.write(f"{text}\t{reason}\n")
