#!/usr/bin/env python3
"""Evaluate an induced lexicon: quartile-stratified sampling, dictionary
coverage and match, the normalized-edit-distance correlation, an F1
threshold sweep against binary labels, and the word-vector baseline.

Run from the repo root: python3 demos/05_evaluation.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dialex import evaluation
from dialex.autolabel import wordpair_label
from dialex.lexicon import LexiconEntry

ROOT = Path(__file__).resolve().parent.parent

lexicon = [
    LexiconEntry("Eihgmoant", "Eingemeindet", 112, 0.99, 112),
    LexiconEntry("Sidlichn", "Südlichen", 71, 0.96, 80),
    LexiconEntry("Augschburg", "Augsburg", 39, 0.91, 39),
    LexiconEntry("Dytsche", "Deutsche", 290, 0.77, 300),
    LexiconEntry("Yywohner", "Bewohner", 189, 0.83, 200),
    LexiconEntry("Wanderbusplan", "Wanderwegnetz", 7, 0.51, 7),
    LexiconEntry("Mineralbrunnen", "Mineralquellen", 6, 0.48, 6),
    LexiconEntry("Obapfäjza", "Oberpfälzer", 4, 0.62, 4),
]

print("normalized edit distance vs alignment probability:")
for e in lexicon:
    ned = evaluation.normalized_edit_distance(e.dialect_word, e.standard_word)
    print(f"  {e.dialect_word:>15s} / {e.standard_word:<15s} ned={ned:.3f} mean_p={e.mean_p:.2f}")
print(f"pearson r = {evaluation.edit_distance_correlation(lexicon):+.3f} "
      "(similar spellings align with higher probability)")

samples = evaluation.stratified_sample(lexicon, per_bin=2, seed=42)
dictionary = evaluation.load_dictionary_tsv(ROOT / "fixtures" / "dictionary.tsv")
print("\ndictionary coverage/match per frequency quartile:")
for row in evaluation.dictionary_eval(samples, dictionary):
    print(f"  Q{row['quartile']}: n={row['n']} coverage={row['coverage']:.0%} match={row['match']:.0%}")

labeled = [(e, wordpair_label(e.dialect_word, e.standard_word)["label"] == "yes") for e in lexicon]
print("\nF1 sweep over the alignment-probability threshold:")
for point in evaluation.f1_sweep(labeled, thresholds=[0.5, 0.6, 0.7, 0.8, 0.9]):
    print(f"  t={point.threshold:.2f} precision={point.precision:.2f} "
          f"recall={point.recall:.2f} f1={point.f1:.2f}")

dialect_vecs = evaluation.load_word_vectors(ROOT / "fixtures" / "wordvecs_bar.txt")
standard_vecs = evaluation.load_word_vectors(ROOT / "fixtures" / "wordvecs_de.txt")
gold = {"Minga": {"München"}, "Stod": {"Stadt"}, "Kiacha": {"Kirche"}, "Touristn": {"Touristen"}}
report = evaluation.nn_baseline(dialect_vecs, standard_vecs, gold)
print(f"\nword-vector nearest-neighbor baseline: {report.correct} of {report.evaluated} retrieved "
      f"({len(report.misses)} gold words outside the vocabulary)")
