"""Normalized stress between a 2D layout and weighted nD target distances.

2D workspace units and weighted nD units are incommensurate, so every
evaluation solves for the least-squares scale

    s* = sum(d_layout * d_target) / sum(d_layout^2)

applied to the layout distances before the residual is taken:

    stress = sum((s* d_layout - d_target)^2) / sum(d_target^2)

This makes the objective invariant to rigid transforms and to positive
uniform rescaling of the layout, and removes the shrink-to-zero minimum.
If all targets are zero the normalization is undefined and the raw
sum(d_layout^2) is returned instead.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from olisteer.errors import ContractViolation
from olisteer.core.types import (
    ZERO_DISTANCE_GUARD,
    DistanceVector,
    FeatureMatrix,
    Layout,
    WeightVector,
    as_weights_array,
)
from olisteer.core.distances import pair_indices


def lsq_scale(d_layout: np.ndarray, d_target: np.ndarray) -> float:
    """Closed-form scale minimizing sum((s*d_layout - d_target)^2)."""
    denom = float(np.dot(d_layout, d_layout))
    if denom <= 0.0:
        return 0.0
    return float(np.dot(d_layout, d_target)) / denom


def stress_from_arrays(d_layout: np.ndarray, d_target: np.ndarray) -> float:
    target_ss = float(np.dot(d_target, d_target))
    if target_ss <= 0.0:
        return float(np.dot(d_layout, d_layout))
    s = lsq_scale(d_layout, d_target)
    resid = s * d_layout - d_target
    return float(np.dot(resid, resid)) / target_ss


def stress(layout_d: DistanceVector, target_d: DistanceVector) -> float:
    """Scale-normalized squared-residual stress between two pair-distance sets."""
    if not layout_d.same_pairs(target_d):
        raise ContractViolation("layout and target distance vectors cover different pair sets")
    return stress_from_arrays(layout_d.d, target_d.d)


def stress_and_weight_gradient(
    d_layout: np.ndarray, sq_diffs: np.ndarray, w: np.ndarray
) -> tuple[float, np.ndarray]:
    """Stress and its gradient with respect to the feature weights.

    `sq_diffs` is the (n_pairs, n_features) matrix of squared per-feature
    differences, so target distances are sqrt(sq_diffs @ w). The scale s* is
    a minimizer over s, so by the envelope theorem it is held fixed while
    the target-distance dependence is differentiated (quotient rule over the
    normalizing sum of squared targets).
    """
    dt2 = sq_diffs @ w
    dt = np.sqrt(np.maximum(dt2, 0.0))
    target_ss = float(dt2.sum())
    if target_ss <= 0.0:
        return float(np.dot(d_layout, d_layout)), np.zeros_like(w)
    s = lsq_scale(d_layout, dt)
    resid = s * d_layout - dt
    num = float(np.dot(resid, resid))
    # dN/dw_k = -sum_p resid_p * sq_diffs[p,k] / dt_p   (guard dt ~ 0)
    safe = dt > ZERO_DISTANCE_GUARD
    coef = np.where(safe, resid / np.where(safe, dt, 1.0), 0.0)
    dnum = -(coef @ sq_diffs)
    # dD/dw_k = sum_p sq_diffs[p,k], exactly
    dden = sq_diffs.sum(axis=0)
    grad = (dnum * target_ss - num * dden) / (target_ss * target_ss)
    return num / target_ss, grad


def stress_gradients(
    f: FeatureMatrix,
    w: WeightVector | np.ndarray,
    layout: Layout,
    subset: Iterable[int] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of the stress objective.

    Returns (grad wrt layout positions, grad wrt weights). The layout
    gradient is a full n x 2 array with zero rows for items outside the
    subset. Pairs with layout distance below the zero guard contribute a
    subgradient of 0 for the square-root term.
    """
    wv = as_weights_array(w)
    if layout.n_items != f.n_items:
        raise ContractViolation("layout and feature matrix disagree on n_items")
    i, j = pair_indices(f.n_items, subset)
    pos = layout.positions
    delta = pos[i] - pos[j]
    dl = np.sqrt(np.sum(delta * delta, axis=1))
    fdiff = f.values[i] - f.values[j]
    sq_diffs = fdiff * fdiff
    dt2 = sq_diffs @ wv
    dt = np.sqrt(np.maximum(dt2, 0.0))
    target_ss = float(dt2.sum())

    grad_pos = np.zeros_like(pos)
    if target_ss <= 0.0:
        # stress = sum(d_layout^2): gradient is 2 * (y_i - y_j) per pair.
        np.add.at(grad_pos, i, 2.0 * delta)
        np.add.at(grad_pos, j, -2.0 * delta)
        return grad_pos, np.zeros_like(wv)

    s = lsq_scale(dl, dt)
    resid = s * dl - dt
    safe = dl > ZERO_DISTANCE_GUARD
    coef = np.where(safe, 2.0 * s * resid / np.where(safe, dl, 1.0), 0.0) / target_ss
    np.add.at(grad_pos, i, coef[:, None] * delta)
    np.add.at(grad_pos, j, -coef[:, None] * delta)

    _, grad_w = stress_and_weight_gradient(dl, sq_diffs, wv)
    return grad_pos, grad_w
