#!/usr/bin/env python3
"""Run the pipeline through lexicon induction on the fixture corpus and show
the induced entries, spelling-variant groups, and the probability cutoff.

Run from the repo root: python3 demos/04_lexicon_induction.py
"""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dialex import lexicon, pipeline

ROOT = Path(__file__).resolve().parent.parent

with tempfile.TemporaryDirectory() as tmp:
    cfg = pipeline.load_config(ROOT / "fixtures" / "config.yaml", {"out": tmp})
    pipeline.stage_ingest(cfg)
    pipeline.stage_mine(cfg)
    pipeline.stage_align(cfg)
    result = pipeline.stage_build_lexicon(cfg)
    print(f"{result['n_observations']} aligned word pair observations "
          f"-> {result['n_entries']} lexicon entries "
          f"(after cutoff {cfg.alignment_cutoff}: {result['n_entries_after_cutoff']})")

    entries = lexicon.read_lexicon_tsv(cfg.out_path("lexicon_full.tsv"))
    print("\ninduced spelling variants (dialect != standard):")
    print(f"  {'dialect':>20s} {'standard':<22s} {'#':>3s} {'mean_p':>7s} {'freq':>5s}")
    for e in entries:
        if e.dialect_word != e.standard_word:
            print(f"  {e.dialect_word:>20s} {e.standard_word:<22s} {e.count:>3d} {e.mean_p:>7.4f} {e.dialect_freq:>5d}")

    groups = lexicon.group_one_to_many(entries)
    print("\nstandard headwords with several dialect variants:")
    for g in groups:
        if len(g.variants) > 1:
            variants = ", ".join(f"{d} ({c})" for d, c in g.variants)
            print(f"  {g.standard_word}: {variants}")
