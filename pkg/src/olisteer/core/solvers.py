"""Forward and inverse weighted-MDS solvers.

Forward (`wmds_solve`): embed items in 2D so layout distances match the
weighted nD distances, via SMACOF iterative majorization. Each Guttman
transform is followed by the closed-form optimal rescale, which keeps the
normalized stress trace non-increasing (majorization descends the raw
squared residual; rescaling can only improve it further).

Inverse (`wmds_inverse`): retrain the distance function by updating the
feature weights so the weighted nD distances of user-moved items match the
2D distances the user expressed. Projected gradient descent on the weight
simplex (floor + constant mass) with a backtracking line search, so the
trace is non-increasing by construction.
"""

from __future__ import annotations

import threading
from typing import Mapping

import numpy as np

from olisteer.errors import (
    ContractViolation,
    DegenerateLayoutError,
    InsufficientPairsError,
)
from olisteer.core.types import (
    WEIGHT_FLOOR,
    ZERO_DISTANCE_GUARD,
    FeatureMatrix,
    Layout,
    SolveReport,
    WeightVector,
    as_weights_array,
    project_weights,
)
from olisteer.core.distances import weighted_distance_matrix
from olisteer.core.procrustes import procrustes_align
from olisteer.core.stress import lsq_scale, stress_and_weight_gradient

FORWARD_MAX_ITER = 300
FORWARD_TOL = 1e-7
INVERSE_MAX_ITER = 500
INVERSE_TOL = 1e-7


def _cancelled(cancel: threading.Event | None) -> bool:
    return cancel is not None and cancel.is_set()


def classical_embedding(dist: np.ndarray) -> np.ndarray:
    """Deterministic 2D spectral embedding of a distance matrix.

    Double-centers the squared distances and takes the top two positive
    eigenpairs. Eigenvector signs are fixed so the largest-magnitude entry
    is positive, making the result reproducible across runs.
    """
    n = dist.shape[0]
    d2 = dist * dist
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ d2 @ j
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]
    out = np.zeros((n, 2))
    for axis in range(min(2, n)):
        lam = evals[axis]
        if lam <= 0:
            break
        col = evecs[:, axis]
        anchor = int(np.argmax(np.abs(col)))
        if col[anchor] < 0:
            col = -col
        out[:, axis] = col * np.sqrt(lam)
    return out


def _square_pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _normalized_stress(dl: np.ndarray, dt: np.ndarray, target_ss: float) -> float:
    if target_ss <= 0.0:
        return float(np.dot(dl, dl))
    s = lsq_scale(dl, dt)
    resid = s * dl - dt
    return float(np.dot(resid, resid)) / target_ss


def wmds_solve(
    f: FeatureMatrix,
    w: WeightVector | np.ndarray,
    init: Layout | None = None,
    *,
    max_iter: int = FORWARD_MAX_ITER,
    tol: float = FORWARD_TOL,
    cancel: threading.Event | None = None,
) -> tuple[Layout, SolveReport]:
    """Project weighted nD distances into a 2D layout, minimizing stress.

    When `init` is given the solve starts there and the result is rigidly
    aligned back to it, preserving the user's frame of reference across
    model updates.
    """
    wv = as_weights_array(w)
    if wv.shape[0] != f.n_features:
        raise ContractViolation("weight length does not match n_features")
    if init is not None and init.n_items != f.n_items:
        raise ContractViolation("init layout does not match n_items")

    n = f.n_items
    target = weighted_distance_matrix(f, wv)
    iu, ju = _square_pair_arrays(n)
    dt = target[iu, ju]
    target_ss = float(np.dot(dt, dt))

    pos = init.positions.copy() if init is not None else classical_embedding(target)

    def pair_dist(y: np.ndarray) -> np.ndarray:
        diff = y[iu] - y[ju]
        return np.sqrt(np.sum(diff * diff, axis=1))

    def rescaled(y: np.ndarray) -> np.ndarray:
        if target_ss <= 0.0:
            return np.zeros_like(y)
        s = lsq_scale(pair_dist(y), dt)
        if s > 0:
            return (y - y.mean(axis=0)) * s
        return y - y.mean(axis=0)

    pos = rescaled(pos)
    trace = [_normalized_stress(pair_dist(pos), dt, target_ss)]
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        if _cancelled(cancel):
            iterations -= 1
            break
        # Guttman transform: Y <- (1/n) B(Y) Y with B_ij = -delta_ij / d_ij.
        cur = np.zeros((n, n))
        cur[iu, ju] = pair_dist(pos)
        cur += cur.T
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(cur > ZERO_DISTANCE_GUARD, target / np.where(cur > 0, cur, 1.0), 0.0)
        np.fill_diagonal(ratio, 0.0)
        b = -ratio
        np.fill_diagonal(b, ratio.sum(axis=1))
        pos = rescaled((b @ pos) / n)
        value = _normalized_stress(pair_dist(pos), dt, target_ss)
        prev = trace[-1]
        trace.append(min(value, prev))  # guard float wobble at convergence
        if prev - value <= tol * max(prev, 1e-30):
            converged = True
            break

    layout = Layout(positions=pos)
    if init is not None:
        layout = procrustes_align(layout, init, range(n))
    report = SolveReport(
        final_objective=trace[-1],
        iterations=iterations,
        converged=converged,
        objective_trace=tuple(trace),
    )
    return layout, report


def wmds_inverse(
    f: FeatureMatrix,
    w_current: WeightVector | np.ndarray,
    moved: Mapping[int, tuple[float, float]],
    *,
    max_iter: int = INVERSE_MAX_ITER,
    tol: float = INVERSE_TOL,
    cancel: threading.Event | None = None,
) -> tuple[WeightVector, SolveReport]:
    """Learn feature weights from the 2D distances expressed by moved items.

    Only pairwise distances among the moved items enter the objective;
    unmoved items are excluded so a possibly wrong projection cannot anchor
    the model. The optimizer starts at `w_current` and every accepted step
    is a strict descent, so no-op drags never worsen the fit.
    """
    if len(moved) < 2:
        raise InsufficientPairsError(f"need at least 2 moved items, got {len(moved)}")
    indices = np.asarray(sorted(int(k) for k in moved), dtype=np.intp)
    if indices[0] < 0 or indices[-1] >= f.n_items:
        raise ContractViolation("moved item index out of range")
    positions = np.asarray([moved[int(k)] for k in indices], dtype=np.float64)
    if positions.shape[1] != 2 or not np.all(np.isfinite(positions)):
        raise ContractViolation("moved positions must be finite 2D points")
    spread = positions.max(axis=0) - positions.min(axis=0)
    if float(np.max(spread)) <= ZERO_DISTANCE_GUARD:
        raise DegenerateLayoutError("all moved positions coincide; expressed distances are all zero")

    m = indices.size
    a, b = np.triu_indices(m, k=1)
    delta = positions[a] - positions[b]
    dl = np.sqrt(np.sum(delta * delta, axis=1))
    fdiff = f.values[indices[a]] - f.values[indices[b]]
    sq_diffs = fdiff * fdiff

    w = project_weights(as_weights_array(w_current))

    def objective(weights: np.ndarray) -> float:
        dt2 = sq_diffs @ weights
        dt = np.sqrt(np.maximum(dt2, 0.0))
        return _normalized_stress(dl, dt, float(dt2.sum()))

    value = objective(w)
    _, grad = stress_and_weight_gradient(dl, sq_diffs, w)
    trace = [value]
    converged = False
    iterations = 0
    step = 1.0

    for iterations in range(1, max_iter + 1):
        if _cancelled(cancel):
            iterations -= 1
            break
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= 1e-15:
            converged = True
            break
        # Backtracking: halve the step until the projected point descends.
        step = min(step * 2.0, 1e6)
        accepted = False
        while step > 1e-14:
            candidate = project_weights(w - step * grad)
            cand_value = objective(candidate)
            if cand_value <= value:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        improvement = value - cand_value
        w, value = candidate, cand_value
        trace.append(value)
        _, grad = stress_and_weight_gradient(dl, sq_diffs, w)
        if improvement <= tol * max(trace[-2], 1e-30):
            converged = True
            break

    report = SolveReport(
        final_objective=value,
        iterations=iterations,
        converged=converged,
        objective_trace=tuple(trace),
    )
    return WeightVector(w), report
