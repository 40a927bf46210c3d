"""Writer for the engine's feature-file format (manifest + matrix).

The format is the contract shared with the engine: a directory holding
`manifest.json` (fields: name, n_items, n_features, abstraction_level,
item_ids, thumbnail_paths, matrix_path, matrix_encoding, checksum) plus the
matrix file it references. Values are written raw; the engine normalizes at
load time.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Sequence

import numpy as np

MANIFEST_NAME = "manifest.json"


def write_feature_file(
    values: np.ndarray,
    item_ids: Sequence[str],
    name: str,
    out_dir: str | Path,
    abstraction_level: str,
    *,
    encoding: str = "binary-f32-row-major",
    thumbnail_paths: Sequence[str] | None = None,
) -> Path:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != len(item_ids):
        raise ValueError(f"matrix shape {values.shape} does not match {len(item_ids)} item ids")
    if not np.all(np.isfinite(values)):
        raise ValueError("feature values must be finite")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if encoding == "csv":
        matrix_name = "matrix.csv"
        np.savetxt(out / matrix_name, values, delimiter=",", fmt="%.10g")
    elif encoding == "binary-f32-row-major":
        matrix_name = "matrix.f32"
        values.astype("<f4").tofile(out / matrix_name)
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    checksum = hashlib.sha256((out / matrix_name).read_bytes()).hexdigest()
    manifest = {
        "name": name,
        "n_items": int(values.shape[0]),
        "n_features": int(values.shape[1]),
        "abstraction_level": abstraction_level,
        "item_ids": list(item_ids),
        "thumbnail_paths": None if thumbnail_paths is None else list(thumbnail_paths),
        "matrix_path": matrix_name,
        "matrix_encoding": encoding,
        "checksum": checksum,
    }
    manifest_path = out / MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest_path
