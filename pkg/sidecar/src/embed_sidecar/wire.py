"""Writer for the pipeline's binary embedding format.

Independent implementation of the documented layout (little-endian): magic
"DBLIEMB1", u32 row count, u32 dim, level byte (0=sentence, 1=token),
row-major float32 values, u32 trailer length, UTF-8 JSON trailer with
unit_ids and, at token level, word_map (-1 for marker rows).
"""

from __future__ import annotations

import json
import struct
from typing import Sequence

import numpy as np

MAGIC = b"DBLIEMB1"
LEVEL_BYTES = {"sentence": 0, "token": 1}


def encode_matrix(
    unit_ids: Sequence[str],
    values: np.ndarray,
    level: str,
    word_map: Sequence[int] | None = None,
) -> bytes:
    values = np.ascontiguousarray(values, dtype="<f4")
    if values.ndim != 2:
        raise ValueError("values must be a 2-d matrix")
    n, dim = values.shape
    if len(unit_ids) != n:
        raise ValueError(f"{len(unit_ids)} unit ids for {n} rows")
    if level not in LEVEL_BYTES:
        raise ValueError(f"unknown level {level!r}")
    if not np.isfinite(values).all():
        raise ValueError("matrix contains NaN or Inf")
    trailer: dict = {"unit_ids": list(unit_ids)}
    if level == "token":
        if word_map is None or len(word_map) != n:
            raise ValueError("token level requires a word_map covering every row")
        trailer["word_map"] = [int(w) for w in word_map]
    trailer_bytes = json.dumps(trailer, ensure_ascii=False, sort_keys=True).encode("utf-8")
    return (
        MAGIC
        + struct.pack("<IIB", n, dim, LEVEL_BYTES[level])
        + values.tobytes()
        + struct.pack("<I", len(trailer_bytes))
        + trailer_bytes
    )
