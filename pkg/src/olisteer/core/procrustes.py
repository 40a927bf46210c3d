"""Rigid alignment of layouts for visual stability between updates."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from olisteer.errors import ContractViolation, InsufficientAnchorsError
from olisteer.core.types import Layout


def procrustes_align(source: Layout, target: Layout, anchor_set: Iterable[int]) -> Layout:
    """Rigidly move `source` so its anchor points best match `target`.

    Applies the rotation/reflection/translation (no scaling) minimizing the
    summed squared displacement of the anchor points relative to `target`,
    then transforms every source point with it. Stress is invariant under
    the transform, so alignment never changes solve quality.
    """
    if source.n_items != target.n_items:
        raise ContractViolation("layouts must have the same number of items")
    anchors = np.asarray(sorted(set(int(k) for k in anchor_set)), dtype=np.intp)
    if anchors.size < 2:
        raise InsufficientAnchorsError(f"need at least 2 anchors, got {anchors.size}")
    if anchors[0] < 0 or anchors[-1] >= source.n_items:
        raise ContractViolation("anchor indices out of range")

    src = source.positions[anchors]
    tgt = target.positions[anchors]
    src_center = src.mean(axis=0)
    tgt_center = tgt.mean(axis=0)
    cross = (src - src_center).T @ (tgt - tgt_center)
    u, _, vt = np.linalg.svd(cross)
    rot = u @ vt  # reflections are permitted, so no determinant correction
    moved = (source.positions - src_center) @ rot + tgt_center
    return Layout(positions=moved)


def anchor_residual(aligned: Layout, target: Layout, anchor_set: Iterable[int]) -> float:
    """Summed squared anchor displacement after alignment."""
    anchors = np.asarray(sorted(set(int(k) for k in anchor_set)), dtype=np.intp)
    diff = aligned.positions[anchors] - target.positions[anchors]
    return float(np.sum(diff * diff))
