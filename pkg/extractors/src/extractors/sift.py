"""Mid-level features: SIFT keypoint descriptors pooled with a
bag-of-visual-words codebook.

All descriptors from the folder are clustered into `target_dims` visual
words (seeded k-means), then each image becomes the L1-normalized histogram
of its descriptors' word assignments. Images yielding no keypoints get a
zero vector and a warning.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np
from scipy.cluster.vq import kmeans2, vq

from extractors.formats import write_feature_file
from extractors.job import ExtractionJob, SkipReport


def sift_descriptors(gray: np.ndarray) -> np.ndarray | None:
    sift = cv2.SIFT_create()
    _, desc = sift.detectAndCompute(gray, None)
    return desc


def _load_gray(path: Path) -> np.ndarray | None:
    data = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    return data


def build_codebook(descriptors: np.ndarray, n_words: int, seed: int) -> np.ndarray:
    """Seeded k-means codebook; word count clamps to the descriptor count."""
    n_words = min(n_words, descriptors.shape[0])
    centroids, _ = kmeans2(
        descriptors.astype(np.float64), n_words, minit="++", seed=seed
    )
    # drop empty clusters deterministically to keep vq assignments stable
    keep = ~np.all(centroids == 0.0, axis=1) | (np.arange(n_words) == 0)
    return centroids[keep]


def extract_sift(job: ExtractionJob) -> tuple[Path, SkipReport]:
    """Bag-of-visual-words SIFT features for every decodable image."""
    report = SkipReport()
    per_image: list[np.ndarray | None] = []
    ids: list[str] = []
    all_desc: list[np.ndarray] = []
    for path in job.images():
        gray = _load_gray(path)
        if gray is None:
            report.skip(path, "undecodable")
            continue
        desc = sift_descriptors(gray)
        if desc is None or len(desc) == 0:
            report.warn(f"{path.name}: no keypoints, zero feature vector")
            per_image.append(None)
        else:
            per_image.append(desc)
            all_desc.append(desc)
        ids.append(path.stem)
    if len(ids) < 2:
        raise ValueError("need at least 2 decodable images")
    if not all_desc:
        raise ValueError("no image produced any SIFT keypoints")

    codebook = build_codebook(np.vstack(all_desc), job.target_dims, job.seed)
    n_words = codebook.shape[0]
    if n_words < job.target_dims:
        report.warn(f"codebook has {n_words} words < requested {job.target_dims}")

    rows = np.zeros((len(ids), n_words))
    for row, desc in enumerate(per_image):
        if desc is None:
            continue
        words, _ = vq(desc.astype(np.float64), codebook)
        counts = np.bincount(words, minlength=n_words).astype(np.float64)
        rows[row] = counts / counts.sum()
    manifest = write_feature_file(
        rows, ids, job.image_dir.name or "sift", job.output_dir, "mid"
    )
    return manifest, report
