"""dialex: induce a dialect-to-standard bilingual lexicon from comparable corpora.

The pipeline mines parallel sentences from interlinked page pairs with
embedding cosine similarity, extracts one-to-one word alignments from
token-embedding similarity matrices, aggregates the aligned word pairs
into a lexicon, and evaluates the result against a dictionary, human
labels, and a cross-lingual word-vector baseline.
"""

__version__ = "0.1.0"
