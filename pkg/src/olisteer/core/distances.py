"""Weighted distances and feature normalization.

The metric is a per-feature weighted Euclidean distance

    D_w(x_i, x_j) = sqrt( sum_k w_k * (x_ik - x_jk)^2 )

over normalized features, so a weight expresses how much a feature
contributes to similarity in the current projection.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from olisteer.errors import ContractViolation, InsufficientPairsError
from olisteer.core.types import (
    DistanceVector,
    FeatureMatrix,
    Layout,
    WeightVector,
    as_weights_array,
)


def weighted_distance(
    x_i: np.ndarray, x_j: np.ndarray, w: WeightVector | np.ndarray
) -> float:
    """Weighted Euclidean distance between two feature rows."""
    x_i = np.asarray(x_i, dtype=np.float64)
    x_j = np.asarray(x_j, dtype=np.float64)
    wv = as_weights_array(w)
    if not (x_i.shape == x_j.shape == wv.shape):
        raise ContractViolation(
            f"dimension mismatch: rows {x_i.shape}/{x_j.shape}, weights {wv.shape}"
        )
    diff = x_i - x_j
    return float(np.sqrt(np.sum(wv * diff * diff)))


def _resolve_subset(n_items: int, subset: Iterable[int] | None) -> np.ndarray:
    if subset is None:
        return np.arange(n_items)
    idx = np.asarray(sorted(set(int(k) for k in subset)), dtype=np.intp)
    if idx.size and (idx[0] < 0 or idx[-1] >= n_items):
        raise ContractViolation(f"subset indices out of range [0, {n_items})")
    return idx


def pair_indices(n_items: int, subset: Iterable[int] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """All unordered pairs (i < j) over a subset, in lexicographic order."""
    idx = _resolve_subset(n_items, subset)
    if idx.size < 2:
        raise InsufficientPairsError(f"need at least 2 items, got {idx.size}")
    a, b = np.triu_indices(idx.size, k=1)
    return idx[a], idx[b]


def pairwise_distances(
    f: FeatureMatrix,
    w: WeightVector | np.ndarray,
    subset: Iterable[int] | None = None,
) -> DistanceVector:
    """Weighted nD distances for every unordered pair in the subset."""
    wv = as_weights_array(w)
    if wv.shape[0] != f.n_features:
        raise ContractViolation(
            f"weights have {wv.shape[0]} entries for {f.n_features} features"
        )
    i, j = pair_indices(f.n_items, subset)
    diff = f.values[i] - f.values[j]
    d = np.sqrt(np.einsum("pk,k,pk->p", diff, wv, diff))
    return DistanceVector(i=i, j=j, d=d)


def layout_distances(layout: Layout, subset: Iterable[int] | None = None) -> DistanceVector:
    """2D pair distances of a layout over the subset."""
    i, j = pair_indices(layout.n_items, subset)
    diff = layout.positions[i] - layout.positions[j]
    return DistanceVector(i=i, j=j, d=np.sqrt(np.sum(diff * diff, axis=1)))


def weighted_distance_matrix(f: FeatureMatrix, w: WeightVector | np.ndarray) -> np.ndarray:
    """Full symmetric n x n weighted distance matrix."""
    wv = as_weights_array(w)
    scaled = f.values * np.sqrt(np.maximum(wv, 0.0))
    sq = np.sum(scaled * scaled, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (scaled @ scaled.T)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(np.maximum(d2, 0.0))


def normalize_features(
    raw: np.ndarray, item_ids: Sequence[str] | None = None
) -> FeatureMatrix:
    """Per-feature min-max scaling to [0, 1].

    Constant features are mapped to 0.5 everywhere: zero variance carries no
    distance information regardless of value, and 0.5 keeps the feature
    weightable without effect.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 2:
        raise ContractViolation(f"expected a 2-D matrix, got shape {raw.shape}")
    bad = np.argwhere(~np.isfinite(raw))
    if bad.size:
        coords = ", ".join(f"(row {r}, col {c})" for r, c in bad[:5])
        more = "" if bad.shape[0] <= 5 else f" and {bad.shape[0] - 5} more"
        raise ContractViolation(f"non-finite values at {coords}{more}")
    lo = raw.min(axis=0)
    hi = raw.max(axis=0)
    span = hi - lo
    constant = span <= 0
    span_safe = np.where(constant, 1.0, span)
    values = np.clip((raw - lo) / span_safe, 0.0, 1.0)
    values[:, constant] = 0.5
    if item_ids is None:
        width = len(str(raw.shape[0] - 1))
        item_ids = [f"item-{k:0{width}d}" for k in range(raw.shape[0])]
    return FeatureMatrix(values=values, item_ids=tuple(item_ids))
