"""Subword-to-word mapping from character offsets.

The pipeline tokenizes on whitespace, so a word's character span is a
whitespace-delimited run of the text; a subword belongs to the word whose
span contains its own span. Marker/special rows map to -1.
"""

from __future__ import annotations

from typing import Sequence


def word_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        start = i
        while i < n and not text[i].isspace():
            i += 1
        spans.append((start, i))
    return spans


def map_subwords_to_words(spans: Sequence[tuple[int, int]], offsets: Sequence[tuple[int, int]]) -> list[int]:
    """One word index per subword offset; empty or out-of-word offsets get -1."""
    out = []
    for start, end in offsets:
        word_idx = -1
        if end > start:
            for w, (ws, we) in enumerate(spans):
                if start >= ws and end <= we:
                    word_idx = w
                    break
        out.append(word_idx)
    return out
