"""Encoders producing per-subword embeddings with word offsets.

Model identifiers:
  hash:<dim>:<seed>  built-in deterministic encoder (no model download);
                     subwords are fixed-width character chunks, vectors are
                     hashes of the chunk text
  hf:<name>          any transformer encoder via the transformers library
                     (requires the "hf" extra and a local/downloadable model)
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .wordmap import map_subwords_to_words, word_spans


@dataclass
class ProviderConfig:
    model: str = "hash:64:0"
    pooling: str = "mean"
    batch_size: int = 32
    device: str = "cpu"
    max_rows: int = 512  # per-sentence row budget including marker rows


@dataclass
class EncodedSentence:
    rows: np.ndarray  # (n_rows, dim) float32, marker rows included
    word_map: list[int]
    truncated: bool = False


@dataclass
class Warning_:
    index: int
    message: str


class HashedEncoder:
    """Deterministic stand-in model: every subword vector is a hash of its
    text, L2-normalized; the start marker hashes the whole sentence.
    """

    CHUNK = 4

    def __init__(self, dim: int = 64, seed: int = 0):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.seed = seed
        self.embedder_id = f"hash{dim}-s{seed}"

    def _vector(self, text: str) -> np.ndarray:
        need = self.dim * 4
        chunks = []
        block = 0
        while len(chunks) * 32 < need:
            h = hashlib.sha256(f"{self.seed}#{block}#{text}".encode("utf-8"))
            chunks.append(h.digest())
            block += 1
        raw = b"".join(chunks)[:need]
        ints = np.frombuffer(raw, dtype="<u4").astype(np.float64)
        vec = ints / 2.0**32 * 2.0 - 1.0
        return (vec / np.linalg.norm(vec)).astype(np.float32)

    def _pieces(self, text: str) -> tuple[list[str], list[tuple[int, int]]]:
        pieces = []
        offsets = []
        for start, end in word_spans(text):
            for s in range(start, end, self.CHUNK):
                e = min(s + self.CHUNK, end)
                pieces.append(text[s:e])
                offsets.append((s, e))
        return pieces, offsets

    def encode(self, texts: list[str], max_rows: int) -> tuple[list[EncodedSentence], list[Warning_]]:
        out = []
        warnings = []
        for idx, text in enumerate(texts):
            pieces, offsets = self._pieces(text)
            word_map = map_subwords_to_words(word_spans(text), offsets)
            truncated = False
            budget = max_rows - 2  # room for the two marker rows
            if len(pieces) > budget:
                pieces = pieces[:budget]
                word_map = word_map[:budget]
                truncated = True
                warnings.append(Warning_(idx, f"sentence {idx} truncated to {budget} subwords"))
            rows = [self._vector("<s> " + text)]
            rows.extend(self._vector(p) for p in pieces)
            rows.append(self._vector("</s>"))
            out.append(
                EncodedSentence(
                    rows=np.stack(rows),
                    word_map=[-1, *word_map, -1],
                    truncated=truncated,
                )
            )
        return out, warnings


class TransformersEncoder:
    """Wraps a Hugging Face encoder; subword-to-word mapping comes from the
    fast tokenizer's character offsets. Inference runs in eval mode with
    gradients off, so output is deterministic for fixed model and input.
    """

    def __init__(self, model_name: str, device: str = "cpu", batch_size: int = 32):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as e:
            raise RuntimeError("transformers backend needs the 'hf' extra installed") from e
        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_name, use_fast=True)
        self.model = AutoModel.from_pretrained(model_name).to(device).eval()
        self.device = device
        self.batch_size = batch_size
        self.embedder_id = model_name
        self.dim = int(self.model.config.hidden_size)

    def encode(self, texts: list[str], max_rows: int) -> tuple[list[EncodedSentence], list[Warning_]]:
        out: list[EncodedSentence] = []
        warnings: list[Warning_] = []
        limit = min(max_rows, getattr(self.tokenizer, "model_max_length", max_rows))
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start : start + self.batch_size]
            enc = self.tokenizer(
                batch,
                return_offsets_mapping=True,
                truncation=True,
                max_length=limit,
                padding=True,
                return_tensors="pt",
            )
            offsets = enc.pop("offset_mapping")
            with self._torch.no_grad():
                hidden = self.model(**{k: v.to(self.device) for k, v in enc.items()}).last_hidden_state
            for b, text in enumerate(batch):
                n = int(enc["attention_mask"][b].sum())
                rows = hidden[b, :n].cpu().numpy().astype(np.float32)
                offs = [tuple(map(int, o)) for o in offsets[b][:n].tolist()]
                word_map = map_subwords_to_words(word_spans(text), offs)
                truncated = offs and offs[-1][1] < len(text.rstrip())
                if truncated:
                    warnings.append(Warning_(start + b, f"sentence {start + b} truncated at {limit} tokens"))
                out.append(EncodedSentence(rows=rows, word_map=word_map, truncated=bool(truncated)))
        return out, warnings


def build_encoder(config: ProviderConfig):
    spec = config.model
    if spec.startswith("hash:") or spec == "hash":
        parts = spec.split(":")
        dim = int(parts[1]) if len(parts) > 1 and parts[1] else 64
        seed = int(parts[2]) if len(parts) > 2 and parts[2] else 0
        return HashedEncoder(dim=dim, seed=seed)
    if spec.startswith("hf:"):
        return TransformersEncoder(spec[3:], device=config.device, batch_size=config.batch_size)
    raise ValueError(f"unknown model identifier {spec!r}; use hash:<dim>:<seed> or hf:<name>")
