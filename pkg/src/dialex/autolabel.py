"""Deterministic scripted annotators.

End-to-end runs need labels but no human is in the loop at desk scale, so
these rule-based annotators stand in: sentence pairs are judged by token
overlap, word pairs by normalized edit distance. A "second annotator"
variant derives deterministic disagreements from the item id, giving the
agreement report something to measure.
"""

from __future__ import annotations

import hashlib

from .evaluation import normalized_edit_distance


def _overlap(src_tokens: list[str], tgt_tokens: list[str]) -> float:
    a = {t.casefold() for t in src_tokens}
    b = {t.casefold() for t in tgt_tokens}
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def bitext_label(src_text: str, tgt_text: str) -> dict:
    """Likert judgment from token overlap; factual set where the schema
    requires it.
    """
    ratio = _overlap(src_text.split(), tgt_text.split())
    if ratio >= 0.999:
        return {"label": "5"}
    if ratio >= 0.6:
        return {"label": "4", "factual": "misses_details"}
    if ratio >= 0.4:
        return {"label": "3", "factual": "different_details", "grammar_differs": True}
    if ratio >= 0.2:
        return {"label": "2", "factual": "minor_inconsistency"}
    return {"label": "1"}


def wordpair_label(dialect_word: str, standard_word: str) -> dict:
    """Binary judgment from spelling distance: a pair is acceptable when the
    words differ by at most roughly a third of their characters.
    """
    if len(dialect_word) <= 2 or len(standard_word) <= 2:
        return {"label": "idk"}
    d = normalized_edit_distance(dialect_word, standard_word)
    if d <= 0.35:
        rec = {"label": "yes"}
        low_d = dialect_word.casefold()
        low_s = standard_word.casefold()
        if low_d != low_s and (low_d in low_s or low_s in low_d):
            rec["partial_match"] = True
        return rec
    return {"label": "no"}


def _jitter(item_id: str, modulus: int) -> int:
    digest = hashlib.blake2b(item_id.encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little") % modulus


def second_opinion_bitext(item_id: str, primary: dict) -> dict:
    """Deterministically shifts roughly one in five numeric labels by one
    step, mimicking the near-label confusions a second human produces.
    """
    label = primary["label"]
    if label not in ("1", "2", "3", "4", "5") or _jitter(item_id, 5) != 0:
        return dict(primary)
    shifted = max(1, min(5, int(label) + (1 if _jitter(item_id, 2) else -1)))
    rec = {"label": str(shifted)}
    if rec["label"] in ("2", "3", "4"):
        rec["factual"] = primary.get("factual", "different_details")
    return rec


def second_opinion_wordpair(item_id: str, primary: dict) -> dict:
    if primary["label"] not in ("yes", "no") or _jitter(item_id, 5) != 0:
        return dict(primary)
    return {"label": "no" if primary["label"] == "yes" else "yes"}
