#!/usr/bin/env python3
"""Align one dialect/standard sentence pair word by word: word vectors from
token embeddings, the cosine similarity matrix, mutual-argmax link
extraction, and the Pharaoh rendering.

Run from the repo root: python3 demos/03_word_alignment.py
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dialex import aligner
from dialex.corpus import Sentence
from dialex.embeddings import MockEmbedder, fetch_embeddings
from dialex.miner import SentencePair

src = Sentence("bar:x:0", "x", "bar", "Des Kloster war a Benediktinakloster im Bistum.",
               ("Des", "Kloster", "war", "a", "Benediktinakloster", "im", "Bistum", "."))
tgt = Sentence("de:y:0", "y", "de", "Das Kloster war ein Benediktinerkloster im Bistum.",
               ("Das", "Kloster", "war", "ein", "Benediktinerkloster", "im", "Bistum", "."))

embedder = MockEmbedder(dim=64, seed=0)
src_m = fetch_embeddings(embedder, [src.embedding_text()], "token", unit_ids=[src.sentence_id])
tgt_m = fetch_embeddings(embedder, [tgt.embedding_text()], "token", unit_ids=[tgt.sentence_id])

src_vecs = aligner.word_vectors(src_m, src)
tgt_vecs = aligner.word_vectors(tgt_m, tgt)
sim = aligner.similarity_matrix(src_vecs, tgt_vecs, src.tokens, tgt.tokens)

print("similarity matrix (rows = dialect words, cols = standard words):")
with np.printoptions(precision=2, suppress=True):
    print(sim)

links = aligner.extract_alignment(sim)
print("\nmutual-argmax links:")
for l in links:
    print(f"  {src.tokens[l.src_word_idx]:>20s} -> {tgt.tokens[l.tgt_word_idx]:<22s} p={l.p:.3f}")
unaligned = set(range(len(src.tokens))) - {l.src_word_idx for l in links}
for i in sorted(unaligned):
    print(f"  {src.tokens[i]:>20s} -> (unaligned)")

print("\npharaoh line:", " ".join(f"{l.src_word_idx}-{l.tgt_word_idx}" for l in links))

obs = aligner.align_sentence_pair(SentencePair(src.sentence_id, tgt.sentence_id, 0.9, "demo"), src, tgt, src_m, tgt_m)
print("\nword pair observations:", [(o.dialect_word, o.standard_word, round(o.p, 3)) for o in obs[:3]], "...")
