#!/usr/bin/env python3
"""Generate the committed desk-scale fixture corpus.

20 interlinked page pairs of synthetic Bavarian-flavored dialect and standard
German. Parallel sentences change only 1-2 words so the mock embedder (token
hash vectors, mean pooled) keeps their cosine above the mining cutoff, and
most long-word replacements share a subword half so the aligner genuinely
links the variant pair. Pages also carry non-parallel filler and filter bait
(short, bullet, bracket, foreign-script sentences).

Run from the repo root: python3 tools/gen_fixture.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from dialex.embeddings import MockEmbedder  # noqa: E402

FIXTURES = ROOT / "fixtures"

# standard word -> dialect variants; rotation over variants creates the
# one-to-many spelling variation the lexicon groups later
WORD_MAP: dict[str, list[str]] = {
    "München": ["Minga", "Minka"],
    "Bürgermeister": ["Bürgermoasta"],
    "Benediktinerkloster": ["Benediktinakloster"],
    "Einwohner": ["Eihwohner"],
    "Landkreis": ["Landkroas"],
    "Touristen": ["Touristn"],
    "Freizeitzentrum": ["Freizeidzentrum"],
    "Hauptbahnhof": ["Haubtbahnhof"],
    "Kirche": ["Kiacha"],
    "Stadt": ["Stod", "Stadd"],
    "zwei": ["zwoa"],
    "klein": ["kloa"],
    "alte": ["oide"],
    "nicht": ["ned"],
    "auch": ["aa"],
    "Jahr": ["Joar"],
    "Weiher": ["Weiha"],
    "Gemeinde": ["Gmoa"],
    "Sommer": ["Summa"],
    "heute": ["heid"],
    "Brücke": ["Bruckn"],
    "gehört": ["ghead"],
    "Wald": ["Woid"],
    "Dorf": ["Doaf"],
    "wieder": ["wieda"],
    "Schule": ["Schui"],
}

# compounds whose replacement shares one subword half with the original, so
# the aligner links them, but whose other half differs enough that the
# scripted annotator rejects the pair (similar context, not synonyms)
DECOY_MAP: dict[str, list[str]] = {
    "Wanderwegnetz": ["Wanderbusplan"],
    "Mineralquellen": ["Mineralbrunnen"],
    "Heimatmuseum": ["Heimatverein"],
}

NAMES = [
    "Adldorf", "Bergheim", "Chamerau", "Dietfurt", "Eichenried",
    "Falkenfels", "Grainet", "Hohenau", "Irlbach", "Kirchdorf",
    "Lalling", "Mengkofen", "Neuschönau", "Ortenburg", "Pilsting",
    "Rattiszell", "Saldenburg", "Tettenweis", "Untergriesbach", "Viechtach",
]

# each template is a list of tokens without the final period
TEMPLATES = [
    "Die Gemeinde {name} liegt im Landkreis und ist lange bekannt",
    "Das Kloster {name} war früher ein Benediktinerkloster im Bistum",
    "Der Bach speist unterhalb der Mündung einige Weiher",
    "Die Stadt {name} hat seit {year} einen Bürgermeister",
    "Viele Touristen besuchen im Sommer die alte Kirche",
    "Die Einwohner sprechen heute noch zwei Formen des Dialekts",
    "Eine Brücke führt über den Bach zum Hauptbahnhof",
    "Das Freizeitzentrum wurde im Jahr {year} gebaut",
    "Im Winter ist das Dorf nicht leicht zu erreichen",
    "Der Wald gehört seit {year} wieder zur Gemeinde {name}",
    "Die alte Schule steht auch heute noch am Markt",
    "Die Kirche {name} wurde {year} erstmals urkundlich erwähnt",
    "Das Wanderwegnetz rund um {name} wurde neu markiert",
    "Die Mineralquellen am Ortsrand sind seit Jahren gefasst",
    "Das Heimatmuseum zeigt alte Karten aus der Region",
]

STANDARD_FILLERS = [
    "Die Chronik des Ortes verzeichnet mehrere große Brände",
    "Eine Umgehungsstraße wurde nach langer Planung gebaut",
    "Der Gemeinderat besteht aus zwölf gewählten Mitgliedern",
]

DIALECT_FILLERS = [
    "Da Maibaum werd jeds Joar aufgstellt und gfeiert",
    "As Wirtshaus am Plotz is scho lang zua",
    "De Musikkapelln spuit bei jedm Fest im Ort",
]

FILTER_BAIT = [
    "Kurz.",
    "- Liste der Ortsteile im Gebiet der Gemeinde.",
    "Die Klammer ( bleibt in diesem Satz offen stehen.",
    "Der Берлин Artikel ist hier fertig geschrieben.",
]


def dialectize(tokens: list[str], page_idx: int, sent_idx: int) -> list[str]:
    """Replace at most two mapped words, never the sentence-initial token.

    Which candidates get replaced, and which spelling variant wins, rotates
    deterministically with the page and sentence position.
    """
    mapping = {**WORD_MAP, **DECOY_MAP}
    candidates = [i for i, t in enumerate(tokens[1:], start=1) if t in mapping]
    if not candidates:
        return list(tokens)
    k = min(2, len(candidates))
    start = (page_idx + sent_idx) % len(candidates)
    chosen = [candidates[(start + j) % len(candidates)] for j in range(k)]
    out = list(tokens)
    for i in chosen:
        variants = mapping[out[i]]
        out[i] = variants[page_idx % len(variants)]
    return out


def page_sentences(page_idx: int) -> tuple[list[str], list[str]]:
    name = NAMES[page_idx]
    year = str(1800 + page_idx * 9)
    standard = []
    dialect = []
    n_templates = 5 + page_idx % 4
    for sent_idx in range(n_templates):
        template = TEMPLATES[(page_idx + sent_idx) % len(TEMPLATES)]
        tokens = template.format(name=name, year=year).split()
        standard.append(" ".join(tokens) + ".")
        dialect.append(" ".join(dialectize(tokens, page_idx, sent_idx)) + ".")
    standard.append(STANDARD_FILLERS[page_idx % len(STANDARD_FILLERS)] + ".")
    dialect.append(DIALECT_FILLERS[page_idx % len(DIALECT_FILLERS)] + ".")
    standard.append(FILTER_BAIT[page_idx % len(FILTER_BAIT)])
    dialect.append(FILTER_BAIT[(page_idx + 2) % len(FILTER_BAIT)])
    return dialect, standard


def write_corpus() -> None:
    bar_dir = FIXTURES / "corpus" / "bar"
    de_dir = FIXTURES / "corpus" / "de"
    bar_dir.mkdir(parents=True, exist_ok=True)
    de_dir.mkdir(parents=True, exist_ok=True)
    links = []
    for i in range(len(NAMES)):
        dialect, standard = page_sentences(i)
        (bar_dir / f"bar{i:02d}.txt").write_text("\n".join(dialect) + "\n", encoding="utf-8")
        (de_dir / f"de{i:02d}.txt").write_text("\n".join(standard) + "\n", encoding="utf-8")
        links.append(f"bar{i:02d}\tde{i:02d}\t{NAMES[i]}\t{NAMES[i]}")
    (FIXTURES / "links.tsv").write_text("\n".join(links) + "\n", encoding="utf-8")


def write_dictionary() -> None:
    """Community-dictionary-style TSV. Per headword rotation: exact induced form, a variant
    spelling that will count as covered-but-unmatched, or absent entirely.
    """
    rows = []
    for idx, (standard, variants) in enumerate(sorted(WORD_MAP.items())):
        if idx % 3 == 0:
            for v in variants:
                rows.append(f"{standard}\t{v}")
        elif idx % 3 == 1:
            rows.append(f"{standard}\t{variants[0]}x")  # near-miss spelling
    rows.append("Oberpfälzer\tObapfejza")
    rows.append("Zusammen\tZ'samm")
    rows.append("Zusammen\tzaum")
    (FIXTURES / "dictionary.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")


def write_word_vectors() -> None:
    """Pre-aligned cross-lingual vector files in the word2vec text format.

    Dialect words with an even hash clone their standard counterpart's
    vector, so the nearest-neighbor baseline retrieves part of the gold set.
    """
    embedder = MockEmbedder(dim=16, seed=77)
    standard_vocab = sorted(WORD_MAP) + ["Ablenkung", "Gegenwort", "Zufall"]
    dialect_rows = []
    for standard, variants in sorted(WORD_MAP.items()):
        for v_idx, variant in enumerate(variants):
            clone = (len(variant) + v_idx) % 2 == 0
            vec = embedder._hash_vector(standard if clone else variant)
            dialect_rows.append((variant, vec))
    with open(FIXTURES / "wordvecs_bar.txt", "w", encoding="utf-8") as f:
        f.write(f"{len(dialect_rows)} 16\n")
        for word, vec in dialect_rows:
            f.write(word + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")
    with open(FIXTURES / "wordvecs_de.txt", "w", encoding="utf-8") as f:
        f.write(f"{len(standard_vocab)} 16\n")
        for word in standard_vocab:
            vec = embedder._hash_vector(word)
            f.write(word + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")


def write_config() -> None:
    config = f"""\
dialect_dir: fixtures/corpus/bar
standard_dir: fixtures/corpus/de
dialect_lang: bar
standard_lang: de
links: fixtures/links.tsv
out: out
embedder: mock
pooling: mean
cosine_cutoff: 0.7
alignment_cutoff: 0.8
retrieval_k: 1
seed: 42
workers: 1
bitext_sample_size: 60
bitext_sample_range: [0.4, 0.95]
wordpair_sample_per_bin: 40
control_size: 20
dictionary: fixtures/dictionary.tsv
word_vectors_dialect: fixtures/wordvecs_bar.txt
word_vectors_standard: fixtures/wordvecs_de.txt
"""
    (FIXTURES / "config.yaml").write_text(config, encoding="utf-8")


def main() -> None:
    write_corpus()
    write_dictionary()
    write_word_vectors()
    write_config()
    print(f"fixture corpus written under {FIXTURES}")


if __name__ == "__main__":
    main()
