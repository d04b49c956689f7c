#!/usr/bin/env python3
"""Mine parallel sentences for one linked page pair with the mock embedder
and show how the cosine cutoff separates translations from filler.

Run from the repo root: python3 demos/02_bitext_mining.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dialex import corpus, miner
from dialex.embeddings import MockEmbedder, fetch_embeddings

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

splitter = corpus.default_splitter
dialect = corpus.ingest_pages(corpus.load_page_dir(FIXTURES / "corpus" / "bar"), "bar", splitter)
standard = corpus.ingest_pages(corpus.load_page_dir(FIXTURES / "corpus" / "de"), "de", splitter)
src = dialect.pages["bar03"]
tgt = standard.pages["de03"]

embedder = MockEmbedder(dim=64, seed=0)
sentences = src + tgt
matrix = fetch_embeddings(
    embedder,
    [s.embedding_text() for s in sentences],
    "sentence",
    pooling="mean",
    unit_ids=[s.sentence_id for s in sentences],
)

pairs = miner.mine_page_pair(src, tgt, matrix, k=1, embedder_id=f"{embedder.embedder_id}:mean")
by_id = {s.sentence_id: s for s in sentences}
print("nearest standard sentence per dialect sentence:")
for p in pairs:
    print(f"  cos={p.cos:.3f}")
    print(f"    bar: {by_id[p.src_id].text}")
    print(f"    de:  {by_id[p.tgt_id].text}")

retained = miner.apply_cutoff(pairs, 0.7)
print(f"\ncutoff 0.7 keeps {len(retained)} of {len(pairs)} pairs")

dist = miner.score_distribution(pairs, thresholds=(0.5, 0.7, 0.8, 0.9))
print(f"score distribution: mean={dist.mean:.3f} std={dist.std:.3f}")
for t, frac in sorted(dist.fraction_at_or_above.items()):
    print(f"  >= {t:.2f}: {frac:.0%}")
