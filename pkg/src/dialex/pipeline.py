"""Pipeline stages with file-based handoff.

Each stage reads the previous stage's files, writes its declared outputs
under the configured output directory, and records config + input + output
hashes in a manifest. Re-running a stage with unchanged inputs and seed
produces byte-identical outputs.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import yaml

from . import aligner, corpus, embeddings, lexicon, miner
from .evaluation import (
    EvalError,
    agreement,
    dictionary_eval,
    edit_distance_correlation,
    f1_sweep,
    load_dictionary_tsv,
    load_word_vectors,
    nn_baseline,
    normalized_edit_distance,
    stratified_sample,
    sweep_flags,
    write_f1_sweep_tsv,
)

STAGES = ("ingest", "mine", "align", "build-lexicon", "sample-annotation", "evaluate", "report")

# config keys that may be overridden from the environment
_ENV_KEYS = {
    "DIALEX_EMBEDDER": "embedder",
    "DIALEX_OUT": "out",
    "DIALEX_DIALECT_DIR": "dialect_dir",
    "DIALEX_STANDARD_DIR": "standard_dir",
    "DIALEX_LINKS": "links",
    "DIALEX_DICTIONARY": "dictionary",
    "DIALEX_WORD_VECTORS_DIALECT": "word_vectors_dialect",
    "DIALEX_WORD_VECTORS_STANDARD": "word_vectors_standard",
    "DIALEX_BITEXT_LABELS": "bitext_labels",
    "DIALEX_WORDPAIR_LABELS": "wordpair_labels",
}


class ConfigError(Exception):
    """Carries every validation failure, not just the first."""

    def __init__(self, errors: list[str]):
        super().__init__("invalid config: " + "; ".join(errors))
        self.errors = errors


class MissingInputError(Exception):
    def __init__(self, path: str | Path):
        super().__init__(f"missing_input: {path}")
        self.path = str(path)


class PipelineError(Exception):
    pass


@dataclass
class PipelineConfig:
    dialect_dir: str = ""
    standard_dir: str = ""
    dialect_lang: str = "bar"
    standard_lang: str = "de"
    links: str = ""
    out: str = "out"
    embedder: str = "mock"
    pooling: str = "mean"
    cosine_cutoff: float = 0.7
    alignment_cutoff: float = 0.8
    retrieval_k: int = 1
    seed: int = 42
    workers: int = 1
    splitter: str = "default"
    bitext_sample_size: int = 1500
    bitext_sample_range: tuple[float, float] = (0.4, 0.95)
    wordpair_sample_per_bin: int = 250
    control_size: int = 200
    score_thresholds: tuple[float, ...] = (0.5, 0.6, 0.7, 0.8, 0.9)
    dictionary: str = ""
    word_vectors_dialect: str = ""
    word_vectors_standard: str = ""
    bitext_labels: str = ""
    wordpair_labels: str = ""
    mined_inputs: tuple[str, ...] = ()
    annotation_token: str = ""

    def out_path(self, name: str) -> Path:
        return Path(self.out) / name

    def config_hash(self) -> str:
        canonical = json.dumps(asdict(self), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def validate_config(cfg: PipelineConfig) -> list[str]:
    """Collect every config problem; callers report them all at once."""
    errors = []
    if not cfg.dialect_dir:
        errors.append("dialect_dir is required")
    if not cfg.standard_dir:
        errors.append("standard_dir is required")
    if not cfg.links:
        errors.append("links is required")
    if cfg.dialect_lang == cfg.standard_lang:
        errors.append("dialect_lang and standard_lang must differ")
    if not -1.0 <= cfg.cosine_cutoff <= 1.0:
        errors.append(f"cosine_cutoff {cfg.cosine_cutoff} outside [-1, 1]")
    if not 0.0 <= cfg.alignment_cutoff <= 1.0:
        errors.append(f"alignment_cutoff {cfg.alignment_cutoff} outside [0, 1]")
    if cfg.retrieval_k < 1:
        errors.append("retrieval_k must be >= 1")
    if cfg.workers < 1:
        errors.append("workers must be >= 1")
    if not isinstance(cfg.seed, int):
        errors.append("seed must be an integer")
    if cfg.pooling not in embeddings.POOLINGS:
        errors.append(f"pooling must be one of {embeddings.POOLINGS}")
    if cfg.splitter not in ("default", "pretokenized"):
        errors.append("splitter must be 'default' or 'pretokenized'")
    lo, hi = cfg.bitext_sample_range
    if not -1.0 <= lo <= hi <= 1.0:
        errors.append(f"bitext_sample_range {cfg.bitext_sample_range} is not a valid cosine range")
    if cfg.bitext_sample_size < 1:
        errors.append("bitext_sample_size must be >= 1")
    if cfg.wordpair_sample_per_bin < 1:
        errors.append("wordpair_sample_per_bin must be >= 1")
    if cfg.control_size < 0:
        errors.append("control_size must be >= 0")
    if not (
        cfg.embedder.startswith("mock")
        or cfg.embedder.startswith("file:")
        or cfg.embedder.startswith(("http://", "https://"))
    ):
        errors.append(f"embedder {cfg.embedder!r} is not mock, file:<path>, or an http(s) URL")
    return errors


def load_config(path: str | Path | None, overrides: dict | None = None) -> PipelineConfig:
    """YAML config file + environment overrides + CLI overrides, validated
    exhaustively.
    """
    data: dict = {}
    if path is not None:
        if not Path(path).exists():
            raise MissingInputError(path)
        loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        if loaded is not None:
            if not isinstance(loaded, dict):
                raise ConfigError(["config file must hold a mapping"])
            data.update(loaded)
    for env_key, cfg_key in sorted(_ENV_KEYS.items()):
        if os.environ.get(env_key):
            data[cfg_key] = os.environ[env_key]
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    known = {f.name for f in PipelineConfig.__dataclass_fields__.values()}
    unknown = sorted(set(data) - known)
    errors = [f"unknown config key {k!r}" for k in unknown]
    for k in unknown:
        data.pop(k)
    if "bitext_sample_range" in data:
        data["bitext_sample_range"] = tuple(float(x) for x in data["bitext_sample_range"])
    if "score_thresholds" in data:
        data["score_thresholds"] = tuple(float(x) for x in data["score_thresholds"])
    if "mined_inputs" in data:
        data["mined_inputs"] = tuple(str(x) for x in data["mined_inputs"])
    try:
        cfg = PipelineConfig(**data)
    except TypeError as e:
        raise ConfigError(errors + [str(e)]) from e
    errors.extend(validate_config(cfg))
    if errors:
        raise ConfigError(errors)
    return cfg


# --- manifest ---------------------------------------------------------------


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _update_manifest(cfg: PipelineConfig, stage: str, inputs: Sequence[Path], outputs: Sequence[Path]) -> None:
    manifest_path = cfg.out_path("manifest.json")
    manifest = {}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    manifest[stage] = {
        "config_sha256": cfg.config_hash(),
        "inputs": {str(p): _sha256_file(Path(p)) for p in inputs if Path(p).is_file()},
        "outputs": {str(p): _sha256_file(Path(p)) for p in outputs},
    }
    manifest_path.write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _require(path: Path) -> Path:
    if not path.exists():
        raise MissingInputError(path)
    return path


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8")


# --- embedding provider facade ----------------------------------------------


class ProviderFacade:
    """Adapts mock / file / http backends to per-language matrix requests."""

    def __init__(self, cfg: PipelineConfig):
        spec = cfg.embedder
        self.cfg = cfg
        self.kind = "mock"
        if spec.startswith("mock"):
            dim, seed = 64, 0
            parts = spec.split(":")
            if len(parts) >= 2 and parts[1]:
                dim = int(parts[1])
            if len(parts) >= 3 and parts[2]:
                seed = int(parts[2])
            self.backend = embeddings.MockEmbedder(dim=dim, seed=seed)
        elif spec.startswith("file:"):
            self.kind = "file"
            self.backend = embeddings.FileEmbeddingProvider(spec[len("file:") :])
        else:
            self.kind = "http"
            self.backend = embeddings.HttpEmbeddingClient(spec)

    @property
    def profile(self) -> embeddings.EmbedderProfile:
        dim = getattr(self.backend, "dim", 0)
        if self.kind == "file":
            dim = self.backend.matrix(self.cfg.dialect_lang, embeddings.LEVEL_SENTENCE).dim
        return embeddings.EmbedderProfile(
            embedder_id=self.backend.embedder_id,
            pooling=self.cfg.pooling,
            dim=int(dim),
            emits_sentence_vectors=True,  # every backend answers sentence-level requests
        )

    @property
    def embedder_id(self) -> str:
        return self.profile.key

    def sentence_matrix(self, sentences: Sequence[corpus.Sentence], lang: str) -> embeddings.EmbeddingMatrix:
        if self.kind == "file":
            return self.backend.matrix(lang, embeddings.LEVEL_SENTENCE)
        return embeddings.fetch_embeddings(
            self.backend,
            [s.embedding_text() for s in sentences],
            level=embeddings.LEVEL_SENTENCE,
            pooling=self.cfg.pooling,
            unit_ids=[s.sentence_id for s in sentences],
        )

    def token_matrix(self, sentences: Sequence[corpus.Sentence], lang: str) -> embeddings.EmbeddingMatrix:
        if self.kind == "file":
            return self.backend.matrix(lang, embeddings.LEVEL_TOKEN)
        return embeddings.fetch_embeddings(
            self.backend,
            [s.embedding_text() for s in sentences],
            level=embeddings.LEVEL_TOKEN,
            pooling=self.cfg.pooling,
            unit_ids=[s.sentence_id for s in sentences],
        )


def _concat_sentence_matrices(mats: Sequence[embeddings.EmbeddingMatrix]) -> embeddings.EmbeddingMatrix:
    import numpy as np

    return embeddings.EmbeddingMatrix(
        unit_ids=[u for m in mats for u in m.unit_ids],
        values=np.concatenate([m.values for m in mats]),
        level=embeddings.LEVEL_SENTENCE,
    )


# --- stages ------------------------------------------------------------------


def stage_ingest(cfg: PipelineConfig) -> dict:
    splitter = corpus.default_splitter if cfg.splitter == "default" else corpus.pretokenized_splitter
    dialect_dir = _require(Path(cfg.dialect_dir))
    standard_dir = _require(Path(cfg.standard_dir))
    links_path = _require(Path(cfg.links))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)

    dialect = corpus.ingest_pages(corpus.load_page_dir(dialect_dir), cfg.dialect_lang, splitter)
    standard = corpus.ingest_pages(corpus.load_page_dir(standard_dir), cfg.standard_lang, splitter)
    links = corpus.read_link_table(links_path)
    pairs, dropped = corpus.pair_pages(links, dialect, standard)

    sentences_path = cfg.out_path("sentences.jsonl")
    corpus.write_sentences_jsonl(dialect.retained() + standard.retained(), sentences_path)
    rejections_path = cfg.out_path("rejections.tsv")
    corpus.write_rejections_tsv(dialect.rejections + standard.rejections, rejections_path)
    pairs_path = cfg.out_path("page_pairs.tsv")
    with open(pairs_path, "w", encoding="utf-8") as f:
        for d, s in pairs:
            f.write(f"{d}\t{s}\n")
    dropped_path = cfg.out_path("page_pairs_dropped.tsv")
    with open(dropped_path, "w", encoding="utf-8") as f:
        for link, reason in dropped:
            f.write(f"{link.dialect_page_id}\t{link.standard_page_id}\t{reason}\n")

    drops_by_reason: dict[str, int] = {}
    for _, reason in dropped:
        drops_by_reason[reason] = drops_by_reason.get(reason, 0) + 1
    stats = {
        "dialect": {"lang": cfg.dialect_lang, **corpus.compute_stats(dialect).to_dict()},
        "standard": {"lang": cfg.standard_lang, **corpus.compute_stats(standard).to_dict()},
        "pairing": {"n_links": len(links), "n_pairs": len(pairs), "dropped": drops_by_reason},
        "rejections": {
            reason: sum(1 for _, r in dialect.rejections + standard.rejections if r == reason)
            for reason in corpus.REASONS
        },
    }
    stats_path = cfg.out_path("corpus_stats.json")
    _write_json(stats_path, stats)
    _update_manifest(
        cfg,
        "ingest",
        [links_path],
        [sentences_path, rejections_path, pairs_path, dropped_path, stats_path],
    )
    return stats


def _load_sentences_by_page(cfg: PipelineConfig) -> tuple[dict[str, corpus.Sentence], dict[tuple[str, str], list[corpus.Sentence]]]:
    sentences = corpus.read_sentences_jsonl(_require(cfg.out_path("sentences.jsonl")))
    by_id = {s.sentence_id: s for s in sentences}
    by_page: dict[tuple[str, str], list[corpus.Sentence]] = {}
    for s in sentences:
        by_page.setdefault((s.lang, s.page_id), []).append(s)
    return by_id, by_page


def _read_page_pairs(cfg: PipelineConfig) -> list[tuple[str, str]]:
    pairs = []
    with open(_require(cfg.out_path("page_pairs.tsv")), encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if line:
                d, s = line.split("\t")
                pairs.append((d, s))
    return pairs


def stage_mine(cfg: PipelineConfig) -> dict:
    _, by_page = _load_sentences_by_page(cfg)
    page_pairs = _read_page_pairs(cfg)
    facade = ProviderFacade(cfg)

    dialect_sents = [s for (lang, page), group in sorted(by_page.items()) if lang == cfg.dialect_lang for s in group]
    standard_sents = [s for (lang, page), group in sorted(by_page.items()) if lang == cfg.standard_lang for s in group]
    matrix = _concat_sentence_matrices(
        [
            facade.sentence_matrix(dialect_sents, cfg.dialect_lang),
            facade.sentence_matrix(standard_sents, cfg.standard_lang),
        ]
    )
    embedder_id = facade.embedder_id

    def mine_one(pair: tuple[str, str]) -> list[miner.SentencePair]:
        d_page, s_page = pair
        return miner.mine_page_pair(
            by_page[(cfg.dialect_lang, d_page)],
            by_page[(cfg.standard_lang, s_page)],
            matrix,
            k=cfg.retrieval_k,
            embedder_id=embedder_id,
        )

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            mined_lists = list(pool.map(mine_one, page_pairs))
    else:
        mined_lists = [mine_one(p) for p in page_pairs]
    mined = [p for chunk in mined_lists for p in chunk]

    bitext_path = cfg.out_path("bitext.tsv")
    miner.write_pairs_tsv(mined, bitext_path)
    dist_path = cfg.out_path("score_distribution.json")
    if mined:
        _write_json(dist_path, miner.score_distribution(mined, cfg.score_thresholds).to_dict())
    else:
        _write_json(dist_path, {"embedder_id": embedder_id, "n_pairs": 0})
    _update_manifest(
        cfg, "mine", [cfg.out_path("sentences.jsonl"), cfg.out_path("page_pairs.tsv")], [bitext_path, dist_path]
    )
    return {"n_pairs": len(mined)}


def stage_align(cfg: PipelineConfig) -> dict:
    by_id, _ = _load_sentences_by_page(cfg)
    pairs = miner.read_pairs_tsv(_require(cfg.out_path("bitext.tsv")))
    retained = miner.apply_cutoff(pairs, cfg.cosine_cutoff)
    facade = ProviderFacade(cfg)

    src_ids = sorted({p.src_id for p in retained})
    tgt_ids = sorted({p.tgt_id for p in retained})
    records: list[tuple[miner.SentencePair, list[aligner.AlignmentLink]]] = []
    if retained:
        src_matrix = facade.token_matrix([by_id[i] for i in src_ids], cfg.dialect_lang)
        tgt_matrix = facade.token_matrix([by_id[i] for i in tgt_ids], cfg.standard_lang)

        def align_one(pair: miner.SentencePair) -> tuple[miner.SentencePair, list[aligner.AlignmentLink]]:
            return pair, aligner.links_for_pair(by_id[pair.src_id], by_id[pair.tgt_id], src_matrix, tgt_matrix)

        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                records = list(pool.map(align_one, retained))
        else:
            records = [align_one(p) for p in retained]

    alignments_path = cfg.out_path("alignments.jsonl")
    aligner.write_alignments_jsonl(records, alignments_path)
    pharaoh_path = cfg.out_path("alignments.pharaoh.txt")
    aligner.write_pharaoh(records, pharaoh_path)
    _update_manifest(
        cfg,
        "align",
        [cfg.out_path("bitext.tsv"), cfg.out_path("sentences.jsonl")],
        [alignments_path, pharaoh_path],
    )
    return {"n_aligned_pairs": len(records), "n_links": sum(len(links) for _, links in records)}


def stage_build_lexicon(cfg: PipelineConfig) -> dict:
    by_id, _ = _load_sentences_by_page(cfg)
    alignment_records = aligner.read_alignments_jsonl(_require(cfg.out_path("alignments.jsonl")))

    observations = []
    for rec in alignment_records:
        src = by_id[rec["src_sentence_id"]]
        tgt = by_id[rec["tgt_sentence_id"]]
        for link in rec["links"]:
            observations.append(
                aligner.WordPairObservation(
                    dialect_word=src.tokens[link["i"]],
                    standard_word=tgt.tokens[link["j"]],
                    p=float(link["p"]),
                    src_sentence_id=src.sentence_id,
                    tgt_sentence_id=tgt.sentence_id,
                )
            )
    entries = lexicon.aggregate(observations)
    dialect_corpus = corpus.PageCorpus(lang=cfg.dialect_lang)
    for s in by_id.values():
        if s.lang == cfg.dialect_lang:
            dialect_corpus.pages.setdefault(s.page_id, []).append(s)
    entries = lexicon.attach_frequencies(entries, corpus.token_frequencies(dialect_corpus))

    full_path = cfg.out_path("lexicon_full.tsv")
    lexicon.write_lexicon_tsv(entries, full_path)
    kept = lexicon.apply_probability_cutoff(entries, cfg.alignment_cutoff)
    cut_path = cfg.out_path("lexicon.tsv")
    lexicon.write_lexicon_tsv(kept, cut_path)
    groups_path = cfg.out_path("synonym_groups.json")
    lexicon.write_synonym_groups_json(lexicon.group_one_to_many(kept), groups_path)
    _update_manifest(
        cfg,
        "build-lexicon",
        [cfg.out_path("alignments.jsonl"), cfg.out_path("sentences.jsonl")],
        [full_path, cut_path, groups_path],
    )
    return {"n_observations": len(observations), "n_entries": len(entries), "n_entries_after_cutoff": len(kept)}


def stage_sample_annotation(cfg: PipelineConfig) -> dict:
    by_id, _ = _load_sentences_by_page(cfg)
    pairs = miner.read_pairs_tsv(_require(cfg.out_path("bitext.tsv")))
    entries = lexicon.read_lexicon_tsv(_require(cfg.out_path("lexicon_full.tsv")))

    bitext_sample, exhausted = miner.sample_for_annotation(
        pairs, n=cfg.bitext_sample_size, score_range=cfg.bitext_sample_range, seed=cfg.seed
    )
    bitext_path = cfg.out_path("annotation_bitext_items.jsonl")
    with open(bitext_path, "w", encoding="utf-8") as f:
        for p in bitext_sample:
            item = {
                "item_id": f"{p.src_id}|{p.tgt_id}",
                "src_sentence_id": p.src_id,
                "tgt_sentence_id": p.tgt_id,
                "src_text": by_id[p.src_id].text,
                "tgt_text": by_id[p.tgt_id].text,
                "cos": round(p.cos, 6),
            }
            f.write(json.dumps(item, ensure_ascii=False, sort_keys=True) + "\n")

    samples = stratified_sample(entries, per_bin=cfg.wordpair_sample_per_bin, seed=cfg.seed)
    wordpair_path = cfg.out_path("annotation_wordpair_items.jsonl")
    with open(wordpair_path, "w", encoding="utf-8") as f:
        for sample in samples:
            for e in sample.entries:
                # word pairs are shown without sentence context on purpose
                item = {
                    "item_id": f"{e.dialect_word}|{e.standard_word}",
                    "dialect_word": e.dialect_word,
                    "standard_word": e.standard_word,
                    "quartile": sample.quartile,
                    "mean_p": round(e.mean_p, 6),
                    "dialect_freq": e.dialect_freq,
                }
                f.write(json.dumps(item, ensure_ascii=False, sort_keys=True) + "\n")

    _update_manifest(
        cfg,
        "sample-annotation",
        [cfg.out_path("bitext.tsv"), cfg.out_path("lexicon_full.tsv")],
        [bitext_path, wordpair_path],
    )
    return {
        "n_bitext_items": len(bitext_sample),
        "bitext_sample_exhausted": exhausted,
        "n_wordpair_items": sum(len(s.entries) for s in samples),
    }


def _read_jsonl(path: Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(json.loads(line))
    return out


def _labels_by_annotator(records: list[dict]) -> dict[str, dict[str, str]]:
    by_annotator: dict[str, dict[str, str]] = {}
    for rec in records:
        by_annotator.setdefault(rec["annotator_id"], {})[rec["item_id"]] = rec["label"]
    return by_annotator


def _primary_annotator(records: list[dict]) -> str | None:
    """The annotator who labeled the most items; ties go alphabetically."""
    by_annotator = _labels_by_annotator(records)
    if not by_annotator:
        return None
    return sorted(by_annotator, key=lambda a: (-len(by_annotator[a]), a))[0]


def stage_evaluate(cfg: PipelineConfig) -> dict:
    entries = lexicon.read_lexicon_tsv(_require(cfg.out_path("lexicon_full.tsv")))
    wordpair_items = _read_jsonl(_require(cfg.out_path("annotation_wordpair_items.jsonl")))
    by_pair = {(e.dialect_word, e.standard_word): e for e in entries}

    quartile_of = {}
    sampled_entries = {}
    for item in wordpair_items:
        key = (item["dialect_word"], item["standard_word"])
        quartile_of[key] = item["quartile"]
        sampled_entries[key] = by_pair[key]

    evaluation: dict = {
        "lexicon": {
            "n_entries": len(entries),
            "n_entries_after_cutoff": len(lexicon.apply_probability_cutoff(entries, cfg.alignment_cutoff)),
            "alignment_cutoff": cfg.alignment_cutoff,
        },
        "sample": {"n_wordpair_items": len(wordpair_items), "per_bin": cfg.wordpair_sample_per_bin},
    }

    from .evaluation import QuartileSample

    def quartile_samples(keys) -> list[QuartileSample]:
        per_q: dict[int, list] = {1: [], 2: [], 3: [], 4: []}
        for key in keys:
            per_q[quartile_of[key]].append(sampled_entries[key])
        return [
            QuartileSample(q, tuple(sorted(per_q[q], key=lambda e: (e.dialect_word, e.standard_word))))
            for q in (1, 2, 3, 4)
        ]

    dictionary = None
    if cfg.dictionary:
        dictionary = load_dictionary_tsv(_require(Path(cfg.dictionary)))
        evaluation["dictionary"] = {
            "path": cfg.dictionary,
            "n_headwords": len(dictionary),
            "sampled": dictionary_eval(quartile_samples(sampled_entries), dictionary),
        }

    wordpair_labels = None
    if cfg.wordpair_labels:
        wordpair_labels = _read_jsonl(_require(Path(cfg.wordpair_labels)))
        primary = _primary_annotator(wordpair_labels)
        labels = {
            rec["item_id"]: rec["label"] for rec in wordpair_labels if rec["annotator_id"] == primary
        }

        def key_of(item_id: str):
            d, s = item_id.split("|", 1)
            return (d, s)

        labeled_keys = [key_of(i) for i in labels if key_of(i) in sampled_entries]
        accepted_keys = [k for k in labeled_keys if labels[f"{k[0]}|{k[1]}"] == "yes"]

        human_rows = []
        for sample in quartile_samples(labeled_keys):
            n = len(sample.entries)
            yes = sum(
                1 for e in sample.entries if labels.get(f"{e.dialect_word}|{e.standard_word}") == "yes"
            )
            human_rows.append(
                {"quartile": sample.quartile, "n_labeled": n, "accepted": yes, "human": yes / n if n else 0.0}
            )
        evaluation["human"] = {
            "annotator_id": primary,
            "n_labeled": len(labeled_keys),
            "n_accepted": len(accepted_keys),
            "per_quartile": human_rows,
        }
        if dictionary is not None:
            # coverage over the human-accepted subset, reported side by side
            # with the full-sample numbers
            evaluation["dictionary"]["accepted"] = dictionary_eval(quartile_samples(accepted_keys), dictionary)

        sweep_input = [
            (sampled_entries[key_of(i)], label == "yes")
            for i, label in sorted(labels.items())
            if label in ("yes", "no") and key_of(i) in sampled_entries
        ]
        points = f1_sweep(sweep_input)
        evaluation["f1_sweep"] = {
            "flags": sweep_flags(sweep_input),
            "points": [
                {"threshold": p.threshold, "precision": p.precision, "recall": p.recall, "f1": p.f1}
                for p in points
            ],
        }

        annotators = _labels_by_annotator(wordpair_labels)
        if len(annotators) >= 2:
            first, second = sorted(annotators)[:2]
            try:
                rep = agreement(annotators[first], annotators[second], "binary")
                evaluation["agreement_wordpair"] = {"exact_match_rate": rep.exact_match_rate}
            except EvalError as e:
                evaluation["agreement_wordpair"] = {"error": e.code}

    if cfg.bitext_labels:
        bitext_records = _read_jsonl(_require(Path(cfg.bitext_labels)))
        pairs = miner.read_pairs_tsv(_require(cfg.out_path("bitext.tsv")))
        primary = _primary_annotator(bitext_records)
        primary_records = [r for r in bitext_records if r["annotator_id"] == primary]
        groups = miner.group_scores_by_label(pairs, primary_records)
        evaluation["score_groups_by_label"] = {
            str(label): {
                "n": len(scores),
                "mean": sum(scores) / len(scores),
                "scores": [round(s, 6) for s in sorted(scores)],
            }
            for label, scores in sorted(groups.items())
        }
        annotators = _labels_by_annotator(bitext_records)
        if len(annotators) >= 2:
            first, second = sorted(annotators)[:2]
            try:
                rep = agreement(annotators[first], annotators[second], "likert")
                evaluation["agreement_bitext"] = {
                    "exact_match_rate": rep.exact_match_rate,
                    "pearson_r": rep.pearson_r,
                }
            except EvalError as e:
                evaluation["agreement_bitext"] = {"error": e.code}

    try:
        evaluation["edit_distance"] = {"pearson_r": edit_distance_correlation(entries)}
    except EvalError as e:
        evaluation["edit_distance"] = {"pearson_r": None, "error": e.code}

    if cfg.word_vectors_dialect and cfg.word_vectors_standard and wordpair_labels is not None:
        primary = _primary_annotator(wordpair_labels)
        gold: dict[str, set[str]] = {}
        for rec in wordpair_labels:
            if rec["annotator_id"] == primary and rec["label"] == "yes":
                gold.setdefault(rec["dialect_word"], set()).add(rec["standard_word"])
        report = nn_baseline(
            load_word_vectors(_require(Path(cfg.word_vectors_dialect))),
            load_word_vectors(_require(Path(cfg.word_vectors_standard))),
            gold,
        )
        evaluation["nn_baseline"] = report.to_dict()

    eval_path = cfg.out_path("evaluation.json")
    _write_json(eval_path, evaluation)
    inputs = [cfg.out_path("lexicon_full.tsv"), cfg.out_path("annotation_wordpair_items.jsonl")]
    for name in (cfg.dictionary, cfg.wordpair_labels, cfg.bitext_labels):
        if name:
            inputs.append(Path(name))
    _update_manifest(cfg, "evaluate", inputs, [eval_path])
    return evaluation


def stage_report(cfg: PipelineConfig) -> dict:
    evaluation = json.loads(_require(cfg.out_path("evaluation.json")).read_text(encoding="utf-8"))

    mined_paths = [Path(p) for p in cfg.mined_inputs] or [cfg.out_path("bitext.tsv")]
    per_embedder: dict[str, list[miner.SentencePair]] = {}
    for path in mined_paths:
        for pair in miner.read_pairs_tsv(_require(path)):
            per_embedder.setdefault(pair.embedder_id, []).append(pair)
    comparison = miner.model_comparison(per_embedder) if per_embedder else {"embedders": {}}

    table5 = {"quartiles": []}
    dict_section = evaluation.get("dictionary", {})
    human_rows = {row["quartile"]: row for row in evaluation.get("human", {}).get("per_quartile", [])}
    for row in dict_section.get("sampled", []):
        q = row["quartile"]
        table5["quartiles"].append(
            {
                "quartile": q,
                "dictionary_coverage": row["coverage"],
                "dictionary_match": row["match"],
                "human": human_rows.get(q, {}).get("human"),
            }
        )

    report = {
        "table_dictionary_human": table5,
        "model_comparison": comparison,
        "corpus_stats": None,
        "edit_distance": evaluation.get("edit_distance"),
        "agreement": {
            "bitext": evaluation.get("agreement_bitext"),
            "wordpair": evaluation.get("agreement_wordpair"),
        },
        "nn_baseline": evaluation.get("nn_baseline"),
        "score_groups_by_label": evaluation.get("score_groups_by_label"),
    }
    stats_path = cfg.out_path("corpus_stats.json")
    if stats_path.exists():
        report["corpus_stats"] = json.loads(stats_path.read_text(encoding="utf-8"))

    report_path = cfg.out_path("report.json")
    _write_json(report_path, report)
    sweep_path = cfg.out_path("f1_sweep.tsv")
    points = evaluation.get("f1_sweep", {}).get("points", [])
    from .evaluation import F1SweepPoint

    write_f1_sweep_tsv(
        [F1SweepPoint(p["threshold"], p["precision"], p["recall"], p["f1"]) for p in points], sweep_path
    )
    _update_manifest(cfg, "report", [cfg.out_path("evaluation.json"), *mined_paths], [report_path, sweep_path])
    return report


STAGE_FUNCS = {
    "ingest": stage_ingest,
    "mine": stage_mine,
    "align": stage_align,
    "build-lexicon": stage_build_lexicon,
    "sample-annotation": stage_sample_annotation,
    "evaluate": stage_evaluate,
    "report": stage_report,
}


def run_stages(cfg: PipelineConfig, upto: str | None = None) -> None:
    for stage in STAGES:
        STAGE_FUNCS[stage](cfg)
        if stage == upto:
            return
