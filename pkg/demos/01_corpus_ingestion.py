#!/usr/bin/env python3
"""Walk through corpus ingestion: sentence splitting, tokenization, the
filter cascade, page pairing, and corpus statistics on the fixture corpus.

Run from the repo root: python3 demos/01_corpus_ingestion.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dialex import corpus

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

page_text = (FIXTURES / "corpus" / "bar" / "bar00.txt").read_text(encoding="utf-8")
print("raw page text:")
print(page_text)

sentences = corpus.split_and_tokenize(page_text, corpus.default_splitter, lang="bar", page_id="bar00")
print(f"split into {len(sentences)} sentences; first tokenization:")
print(" ", sentences[0].tokens)

print("\nfilter decisions:")
for s in sentences:
    reason = corpus.filter_sentence(s)
    verdict = "keep" if reason is None else f"reject({reason})"
    print(f"  {verdict:28s} {s.text[:60]}")

dialect = corpus.ingest_pages(corpus.load_page_dir(FIXTURES / "corpus" / "bar"), "bar", corpus.default_splitter)
standard = corpus.ingest_pages(corpus.load_page_dir(FIXTURES / "corpus" / "de"), "de", corpus.default_splitter)
links = corpus.read_link_table(FIXTURES / "links.tsv")
pairs, dropped = corpus.pair_pages(links, dialect, standard)

print(f"\npage pairing: {len(pairs)} pairs survived, {len(dropped)} dropped")
for lang, c in (("bar", dialect), ("de", standard)):
    stats = corpus.compute_stats(c)
    print(f"  {lang}: {stats.n_pages} pages, {stats.n_sentences} sentences, "
          f"{stats.n_tokens} tokens, {stats.n_types} types")
