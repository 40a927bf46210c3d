"""Feature-file format, dataset loading, and synthetic desk-scale datasets.

A dataset on disk is a directory holding `manifest.json` plus the matrix
file it references. The manifest is the contract shared with external
extractor tools; its field names are fixed:

    name, n_items, n_features, abstraction_level, item_ids,
    thumbnail_paths, matrix_path, matrix_encoding, checksum

Matrix encodings: `csv` (one row per item, comma-separated, for human
inspection) or `binary-f32-row-major` (raw little-endian float32).
The checksum is the SHA-256 hex digest of the matrix file bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from olisteer.errors import ChecksumMismatchError, ContractViolation, DatasetFormatError
from olisteer.core import FeatureMatrix, normalize_features

ABSTRACTION_LEVELS = ("low", "mid", "high", "synthetic")
ENCODINGS = ("csv", "binary-f32-row-major")
MAX_FEATURES = 65536
MANIFEST_NAME = "manifest.json"

REGIMES = ("aligned", "distributed", "entangled")


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    n_items: int
    n_features: int
    abstraction_level: str
    item_ids: tuple[str, ...]
    thumbnail_paths: tuple[str, ...] | None
    matrix_path: str
    matrix_encoding: str
    checksum: str

    def __post_init__(self) -> None:
        if self.abstraction_level not in ABSTRACTION_LEVELS:
            raise DatasetFormatError(f"abstraction_level must be one of {ABSTRACTION_LEVELS}")
        if self.matrix_encoding not in ENCODINGS:
            raise DatasetFormatError(f"matrix_encoding must be one of {ENCODINGS}")
        if self.n_features > MAX_FEATURES:
            raise DatasetFormatError(f"n_features {self.n_features} exceeds cap {MAX_FEATURES}")
        if len(self.item_ids) != self.n_items:
            raise DatasetFormatError(
                f"{len(self.item_ids)} item_ids for n_items={self.n_items}"
            )
        if self.thumbnail_paths is not None and len(self.thumbnail_paths) != self.n_items:
            raise DatasetFormatError("thumbnail_paths length must match n_items")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def read_manifest(manifest_path: str | Path) -> DatasetManifest:
    path = Path(manifest_path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"manifest {path} is not valid JSON: {exc}") from exc
    required = {
        "name", "n_items", "n_features", "abstraction_level",
        "item_ids", "thumbnail_paths", "matrix_path", "matrix_encoding", "checksum",
    }
    missing = required - raw.keys()
    if missing:
        raise DatasetFormatError(f"manifest {path} missing fields: {sorted(missing)}")
    thumbs = raw["thumbnail_paths"]
    return DatasetManifest(
        name=str(raw["name"]),
        n_items=int(raw["n_items"]),
        n_features=int(raw["n_features"]),
        abstraction_level=str(raw["abstraction_level"]),
        item_ids=tuple(str(x) for x in raw["item_ids"]),
        thumbnail_paths=None if thumbs is None else tuple(str(x) for x in thumbs),
        matrix_path=str(raw["matrix_path"]),
        matrix_encoding=str(raw["matrix_encoding"]),
        checksum=str(raw["checksum"]),
    )


def _read_matrix(path: Path, encoding: str, n_items: int, n_features: int) -> np.ndarray:
    if encoding == "csv":
        try:
            raw = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise DatasetFormatError(f"cannot parse csv matrix {path}: {exc}") from exc
    else:
        flat = np.fromfile(path, dtype="<f4")
        if flat.size != n_items * n_features:
            raise DatasetFormatError(
                f"binary matrix {path} has {flat.size} values, "
                f"expected {n_items}x{n_features}"
            )
        raw = flat.astype(np.float64).reshape(n_items, n_features)
    if raw.shape != (n_items, n_features):
        raise DatasetFormatError(
            f"matrix {path} has shape {raw.shape}, manifest says ({n_items}, {n_features})"
        )
    return raw


def load_dataset(manifest_path: str | Path) -> tuple[FeatureMatrix, DatasetManifest]:
    """Load, checksum-verify, validate, and normalize a feature file."""
    path = Path(manifest_path)
    manifest = read_manifest(path)
    matrix_file = path.parent / manifest.matrix_path
    if not matrix_file.is_file():
        raise DatasetFormatError(f"matrix file {matrix_file} not found")
    actual = _sha256(matrix_file)
    if actual != manifest.checksum:
        raise ChecksumMismatchError(
            f"matrix file {matrix_file}: checksum {actual} != manifest {manifest.checksum}"
        )
    raw = _read_matrix(matrix_file, manifest.matrix_encoding, manifest.n_items, manifest.n_features)
    try:
        features = normalize_features(raw, item_ids=manifest.item_ids)
    except ContractViolation as exc:
        raise DatasetFormatError(f"dataset {manifest.name}: {exc}") from exc
    return features, manifest


def export_dataset(
    features: FeatureMatrix,
    name: str,
    out_dir: str | Path,
    *,
    encoding: str = "binary-f32-row-major",
    abstraction_level: str = "synthetic",
    thumbnail_paths: tuple[str, ...] | None = None,
) -> Path:
    """Write a feature file and return its manifest path.

    Binary export quantizes values once to float32; reloading an exported
    dataset round-trips bit-identically from then on. CSV keeps ~10
    significant digits.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except (OSError, FileExistsError) as exc:
        raise DatasetFormatError(f"cannot create output directory {out}: {exc}") from exc
    if encoding not in ENCODINGS:
        raise DatasetFormatError(f"matrix_encoding must be one of {ENCODINGS}")
    matrix_name = "matrix.csv" if encoding == "csv" else "matrix.f32"
    matrix_file = out / matrix_name
    try:
        if encoding == "csv":
            np.savetxt(matrix_file, features.values, delimiter=",", fmt="%.10g")
        else:
            features.values.astype("<f4").tofile(matrix_file)
    except OSError as exc:
        raise DatasetFormatError(f"cannot write matrix file {matrix_file}: {exc}") from exc
    manifest = DatasetManifest(
        name=name,
        n_items=features.n_items,
        n_features=features.n_features,
        abstraction_level=abstraction_level,
        item_ids=features.item_ids,
        thumbnail_paths=thumbnail_paths,
        matrix_path=matrix_name,
        matrix_encoding=encoding,
        checksum=_sha256(matrix_file),
    )
    manifest_path = out / MANIFEST_NAME
    try:
        manifest_path.write_text(json.dumps(asdict(manifest), indent=2) + "\n")
    except OSError as exc:
        raise DatasetFormatError(f"cannot write manifest {manifest_path}: {exc}") from exc
    return manifest_path


@dataclass(frozen=True)
class SyntheticRegimeSpec:
    """Recipe for a planted-ground-truth dataset.

    Regimes model how a concept is encoded in the features:
      aligned      one feature carries the concept directly
      distributed  the concept is the mean of several noisy features
      entangled    the concept is an XOR of two thresholded features,
                   inexpressible by any linear feature weighting
    """

    regime: str
    n_items: int
    n_features: int
    concept_labels: tuple[int, ...] | None = None
    noise_sigma: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise DatasetFormatError(f"regime must be one of {REGIMES}")
        if self.n_items < 4 or self.n_items % 2:
            raise DatasetFormatError("n_items must be even (balanced classes) and >= 4")
        if self.noise_sigma < 0:
            raise DatasetFormatError("noise_sigma must be >= 0")
        if self.regime == "distributed" and self.n_features < 4:
            raise DatasetFormatError("distributed regime needs >= 4 features")
        if self.regime == "entangled" and self.n_features < 2:
            raise DatasetFormatError("entangled regime needs >= 2 features")
        if self.concept_labels is not None:
            labels = tuple(int(v) for v in self.concept_labels)
            if len(labels) != self.n_items or any(v not in (0, 1) for v in labels):
                raise DatasetFormatError("concept_labels must be a binary vector of length n_items")
            if sum(labels) != self.n_items // 2:
                raise DatasetFormatError("concept_labels must be balanced")
            object.__setattr__(self, "concept_labels", labels)


def _default_labels(n_items: int) -> np.ndarray:
    labels = np.zeros(n_items, dtype=np.int64)
    labels[n_items // 2 :] = 1
    return labels


def generate_synthetic(spec: SyntheticRegimeSpec) -> tuple[FeatureMatrix, np.ndarray]:
    """Deterministic synthetic dataset plus its concept labels."""
    rng = np.random.default_rng(spec.seed)
    n, d = spec.n_items, spec.n_features
    labels = (
        np.asarray(spec.concept_labels, dtype=np.int64)
        if spec.concept_labels is not None
        else _default_labels(n)
    )
    values = rng.random((n, d))

    if spec.regime == "aligned":
        values[:, 0] = np.clip(labels + rng.normal(0.0, spec.noise_sigma, size=n), 0.0, 1.0)
    elif spec.regime == "distributed":
        base = 0.25 + 0.5 * labels
        for k in range(4):
            values[:, k] = np.clip(base + rng.normal(0.0, spec.noise_sigma, size=n), 0.0, 1.0)
        # the concept must equal the mean rule exactly; resample rare violators
        for row in range(n):
            for _ in range(1000):
                if (values[row, :4].mean() > 0.5) == bool(labels[row]):
                    break
                values[row, :4] = np.clip(
                    base[row] + rng.normal(0.0, spec.noise_sigma, size=4), 0.0, 1.0
                )
            else:
                values[row, :4] = base[row]
    else:  # entangled: label = XOR(f0 > 0.5, f1 > 0.5)
        # Alternate class-consistent quadrants so both are evenly used.
        flip = np.zeros(n, dtype=bool)
        for cls in (0, 1):
            members = np.flatnonzero(labels == cls)
            flip[members[1::2]] = True
        high0 = np.where(labels == 1, ~flip, flip)  # class 1: (hi,lo)/(lo,hi); class 0: (lo,lo)/(hi,hi)
        high1 = flip
        margin = 0.02
        lo = rng.uniform(margin, 0.5 - margin, size=(n, 2))
        hi = rng.uniform(0.5 + margin, 1.0 - margin, size=(n, 2))
        values[:, 0] = np.where(high0, hi[:, 0], lo[:, 0])
        values[:, 1] = np.where(high1, hi[:, 1], lo[:, 1])

    features = normalize_features(values)
    return features, labels
