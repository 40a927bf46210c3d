"""Low-level features: RGB color histograms compressed with PCA.

Each image becomes a 255-bins-per-channel histogram (765 values), then PCA
reduces to the requested dimensionality. 255 bins is the documented
convention here, one less than the usual 256.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from extractors.formats import write_feature_file
from extractors.job import ExtractionJob, SkipReport

BINS_PER_CHANNEL = 255


def rgb_histogram(image: Image.Image) -> np.ndarray:
    """Per-channel histogram, shape (3, 255), normalized to frequencies."""
    rgb = np.asarray(image.convert("RGB"), dtype=np.uint8)
    out = np.zeros((3, BINS_PER_CHANNEL))
    for channel in range(3):
        counts, _ = np.histogram(rgb[..., channel], bins=BINS_PER_CHANNEL, range=(0, 255))
        out[channel] = counts / counts.sum()
    return out


def pca_reduce(data: np.ndarray, target_dims: int) -> np.ndarray:
    """Project onto the top principal components, clamped to matrix rank.

    Deterministic: component signs are fixed so each component's
    largest-magnitude coordinate is positive.
    """
    centered = data - data.mean(axis=0)
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(svals > svals[0] * 1e-12)) if svals.size else 0
    dims = max(1, min(target_dims, rank))
    components = vt[:dims]
    for row in range(dims):
        anchor = int(np.argmax(np.abs(components[row])))
        if components[row, anchor] < 0:
            components[row] = -components[row]
    return centered @ components.T


def extract_hist(job: ExtractionJob) -> tuple[Path, SkipReport]:
    """Color-histogram features for every decodable image in the folder."""
    report = SkipReport()
    rows: list[np.ndarray] = []
    ids: list[str] = []
    for path in job.images():
        try:
            with Image.open(path) as img:
                hist = rgb_histogram(img)
        except (UnidentifiedImageError, OSError) as exc:
            report.skip(path, f"undecodable: {exc}")
            continue
        rows.append(hist.ravel())
        ids.append(path.stem)
    if len(rows) < 2:
        raise ValueError("need at least 2 decodable images")
    features = pca_reduce(np.vstack(rows), job.target_dims)
    if features.shape[1] < job.target_dims:
        report.warn(
            f"PCA rank {features.shape[1]} < requested {job.target_dims} dims; clamped"
        )
    manifest = write_feature_file(
        features, ids, job.image_dir.name or "hist", job.output_dir, "low"
    )
    return manifest, report
