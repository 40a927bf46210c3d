"""Simulated-analyst benchmark harness.

Reproduces, at desk scale, a 3x3 factorial study of feature-encoding
regimes against task concept levels. A deterministic analyst policy plays
rounds against a live session: each round it drags the most-misplaced
items of each class to two fixed far-apart anchors, commits, and scores
the resulting layout against the ground-truth labels. A task is complete
when the score reaches the success threshold, partial when it ends at
least at 75% of the threshold, and failed otherwise, in which case the
interactive cost is marked as infinity.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from olisteer.errors import ContractViolation, DatasetFormatError
from olisteer.core import (
    WEIGHT_FLOOR,
    FeatureMatrix,
    Layout,
    WeightVector,
    wmds_solve,
)
from olisteer.ingest import SyntheticRegimeSpec, generate_synthetic, load_dataset
from olisteer.session import DragEvent, Session, create_session

ANCHOR_A = (-1.5, 0.0)
ANCHOR_B = (1.5, 0.0)
# Same-class exemplars are spread around their anchor by this much so the
# expressed within/between distance ratio stays achievable; demanding
# near-coincident placement drives the inverse solve into overfit corners.
ANCHOR_JITTER = 0.3

COMPLETE = "complete"
PARTIAL = "partial"
FAILED = "failed"

TASKS = ("single_feature", "linear_combination", "xor")
REGIME_ORDER = ("aligned", "distributed", "entangled")

# How a regime (feature abstraction level) encodes a task concept
# (concept abstraction level). When the features are abstract enough for
# the concept, the concept appears aligned/distributed in them; when the
# concept exceeds the feature level, only an entangled (XOR) encoding
# remains and no linear weighting can express it.
CELL_CONSTRUCTION = {
    ("aligned", "single_feature"): "aligned",
    ("aligned", "linear_combination"): "aligned",
    ("aligned", "xor"): "aligned",
    ("distributed", "single_feature"): "distributed",
    ("distributed", "linear_combination"): "distributed",
    ("distributed", "xor"): "entangled",
    ("entangled", "single_feature"): "aligned",
    ("entangled", "linear_combination"): "entangled",
    ("entangled", "xor"): "entangled",
}

CONSTRUCTION_SIGMA = {"aligned": 0.05, "distributed": 0.22, "entangled": 0.05}


@dataclass(frozen=True)
class ExperimentSpec:
    """One simulated-analyst run against one labeled dataset."""

    dataset: SyntheticRegimeSpec | str  # spec or manifest path (labels required)
    labels: tuple[int, ...] | None = None  # required when dataset is a path
    drags_per_round: int = 6
    interaction_cap: int = 50
    success_metric: str = "nearest_centroid_accuracy"
    success_threshold: float = 0.95
    seed: int = 0

    def __post_init__(self) -> None:
        if self.interaction_cap < self.drags_per_round:
            raise ContractViolation("interaction_cap must be >= drags_per_round")
        if not 0 < self.success_threshold <= 1:
            raise ContractViolation("success_threshold must lie in (0, 1]")
        if self.success_metric not in ("nearest_centroid_accuracy", "silhouette"):
            raise ContractViolation(f"unknown success metric {self.success_metric!r}")
        if self.drags_per_round < 2:
            raise ContractViolation("drags_per_round must be >= 2")


@dataclass(frozen=True)
class ExperimentResult:
    completeness: str
    cost: float  # interaction count, or math.inf when the task failed
    rounds: int
    metric_trace: tuple[float, ...]
    final_weights: WeightVector

    def __post_init__(self) -> None:
        if len(self.metric_trace) != self.rounds:
            raise ContractViolation("metric_trace length must equal rounds")


def nearest_centroid_accuracy(layout: Layout, labels: np.ndarray) -> float:
    """Fraction of items whose nearest class centroid (in 2D) is their own."""
    pos = layout.positions
    labels = np.asarray(labels)
    centroids = np.stack([pos[labels == c].mean(axis=0) for c in (0, 1)])
    d0 = np.sum((pos - centroids[0]) ** 2, axis=1)
    d1 = np.sum((pos - centroids[1]) ** 2, axis=1)
    assigned = (d1 < d0).astype(np.int64)
    return float((assigned == labels).mean())


def silhouette_score_2d(layout: Layout, labels: np.ndarray) -> float:
    """Mean silhouette of the 2D layout under the binary labels, mapped to
    [0, 1] so thresholds share a scale with accuracy."""
    pos = layout.positions
    labels = np.asarray(labels)
    n = pos.shape[0]
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    scores = np.zeros(n)
    for idx in range(n):
        own = labels == labels[idx]
        own[idx] = False
        other = labels != labels[idx]
        a = dist[idx, own].mean() if own.any() else 0.0
        b = dist[idx, other].mean() if other.any() else 0.0
        denom = max(a, b)
        scores[idx] = 0.0 if denom == 0 else (b - a) / denom
    return float((scores.mean() + 1.0) / 2.0)


_METRICS = {
    "nearest_centroid_accuracy": nearest_centroid_accuracy,
    "silhouette": silhouette_score_2d,
}


def _resolve_dataset(spec: ExperimentSpec) -> tuple[FeatureMatrix, np.ndarray]:
    if isinstance(spec.dataset, SyntheticRegimeSpec):
        return generate_synthetic(spec.dataset)
    features, _ = load_dataset(spec.dataset)
    if spec.labels is None:
        raise ContractViolation("labels are required when dataset is a manifest path")
    labels = np.asarray(spec.labels, dtype=np.int64)
    if labels.shape[0] != features.n_items:
        raise ContractViolation("labels length must match dataset n_items")
    return features, labels


def _anchor_positions(anchor: tuple[float, float], count: int) -> list[tuple[float, float]]:
    # spread placements slightly so expressed pair distances stay informative
    mid = (count - 1) / 2.0
    return [(anchor[0], anchor[1] + ANCHOR_JITTER * (k - mid)) for k in range(count)]


def _pick_misplaced(
    layout: Layout,
    labels: np.ndarray,
    cls: int,
    anchor: tuple[float, float],
    count: int,
    exclude: Sequence[int] = (),
) -> list[int]:
    members = [int(m) for m in np.flatnonzero(labels == cls) if int(m) not in set(exclude)]
    delta = layout.positions[members] - np.asarray(anchor)
    dist = np.sum(delta * delta, axis=1)
    order = np.argsort(-dist, kind="stable")
    return [members[k] for k in order[:count]]


def _pick_veterans(
    layout: Layout, history: Sequence[int], anchor: tuple[float, float], count: int
) -> list[int]:
    """Previously dragged items currently best settled near their anchor."""
    seen = list(dict.fromkeys(history))
    delta = layout.positions[seen] - np.asarray(anchor)
    dist = np.sum(delta * delta, axis=1)
    order = np.argsort(dist, kind="stable")
    return [int(seen[k]) for k in order[:count]]


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Play analyst rounds against a fresh session until success or cap.

    Round policy: for each class, re-drag one established exemplar (the
    previously dragged item best settled near its anchor) and fill the rest
    of the budget with the most-misplaced items of that class, placing all
    of them in that class's anchor region. Re-dragging an exemplar keeps
    each commit's moved-pair objective tied to the structure built so far.
    """
    features, labels = _resolve_dataset(spec)
    metric_fn = _METRICS[spec.success_metric]
    session: Session = create_session(features)
    per_class = spec.drags_per_round // 2
    n_veterans = min(1, per_class - 1)
    history: dict[int, list[int]] = {0: [], 1: []}

    trace: list[float] = []
    completeness = FAILED
    while session.interaction_cost() + 2 * per_class <= spec.interaction_cap:
        drags: list[DragEvent] = []
        for cls, anchor in ((0, ANCHOR_A), (1, ANCHOR_B)):
            veterans = (
                _pick_veterans(session.layout, history[cls], anchor, n_veterans)
                if trace and history[cls]
                else []
            )
            picks = veterans + _pick_misplaced(
                session.layout, labels, cls, anchor, per_class - len(veterans), exclude=veterans
            )
            history[cls].extend(picks)
            for item_idx, pos in zip(picks, _anchor_positions(anchor, len(picks))):
                drags.append(DragEvent(item_id=features.item_ids[item_idx], x=pos[0], y=pos[1]))
        session.oli_update(drags)
        trace.append(metric_fn(session.layout, labels))
        if trace[-1] >= spec.success_threshold:
            completeness = COMPLETE
            break
    else:
        if trace and trace[-1] >= 0.75 * spec.success_threshold:
            completeness = PARTIAL

    if not trace:  # cap smaller than one round: nothing could be expressed
        completeness = FAILED
    cost = math.inf if completeness == FAILED else float(session.interaction_cost())
    return ExperimentResult(
        completeness=completeness,
        cost=cost,
        rounds=len(trace),
        metric_trace=tuple(trace),
        final_weights=session.weights,
    )


@dataclass(frozen=True)
class GridCell:
    regime: str
    task: str
    experiment: ExperimentSpec


@dataclass(frozen=True)
class GridRow:
    regime: str
    task: str
    completeness: str
    cost: float
    rounds: int
    error: str | None = None


@dataclass(frozen=True)
class GridReport:
    rows: tuple[GridRow, ...] = field(default_factory=tuple)

    def cell(self, regime: str, task: str) -> GridRow:
        for row in self.rows:
            if row.regime == regime and row.task == task:
                return row
        raise KeyError((regime, task))

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["regime", "task", "completeness", "cost", "rounds"])
            for row in self.rows:
                cost = "inf" if math.isinf(row.cost) else f"{row.cost:g}"
                writer.writerow([row.regime, row.task, row.completeness, cost, row.rounds])

    def render_text(self) -> str:
        """Regime x task grid; filled circle complete, half partial, open failed."""
        symbols = {COMPLETE: "(*)", PARTIAL: "(~)", FAILED: "( )"}
        tasks = [t for t in TASKS if any(r.task == t for r in self.rows)]
        regimes = [r for r in REGIME_ORDER if any(x.regime == r for x in self.rows)]
        width = max([len(t) for t in tasks] + [14]) + 2
        lines = ["regime \\ task".ljust(16) + "".join(t.ljust(width) for t in tasks)]
        for regime in regimes:
            cells = []
            for task in tasks:
                try:
                    row = self.cell(regime, task)
                except KeyError:
                    cells.append("-".ljust(width))
                    continue
                cost = "inf" if math.isinf(row.cost) else f"{row.cost:g}"
                cells.append(f"{symbols[row.completeness]} cost={cost}".ljust(width))
            lines.append(regime.ljust(16) + "".join(cells))
        lines.append("(*) complete   (~) partial   ( ) failed")
        return "\n".join(lines) + "\n"


def default_grid_specs(
    n_items: int = 100,
    n_features: int = 16,
    seed: int = 3063,
    drags_per_round: int = 6,
    interaction_cap: int = 50,
    success_threshold: float = 0.95,
) -> list[GridCell]:
    """The 3x3 grid of regime rows against task columns."""
    cells = []
    for r_idx, regime in enumerate(REGIME_ORDER):
        for t_idx, task in enumerate(TASKS):
            construction = CELL_CONSTRUCTION[(regime, task)]
            dataset = SyntheticRegimeSpec(
                regime=construction,
                n_items=n_items,
                n_features=n_features,
                noise_sigma=CONSTRUCTION_SIGMA[construction],
                seed=seed + 10 * r_idx + t_idx,
            )
            cells.append(
                GridCell(
                    regime=regime,
                    task=task,
                    experiment=ExperimentSpec(
                        dataset=dataset,
                        drags_per_round=drags_per_round,
                        interaction_cap=interaction_cap,
                        success_threshold=success_threshold,
                        seed=seed,
                    ),
                )
            )
    return cells


def run_grid(cells: Iterable[GridCell]) -> GridReport:
    """Run every cell; an error in one cell never blocks the others."""
    rows = []
    for cell in cells:
        try:
            result = run_experiment(cell.experiment)
            rows.append(
                GridRow(
                    regime=cell.regime,
                    task=cell.task,
                    completeness=result.completeness,
                    cost=result.cost,
                    rounds=result.rounds,
                )
            )
        except Exception as exc:  # isolate cell failures
            rows.append(
                GridRow(
                    regime=cell.regime,
                    task=cell.task,
                    completeness=FAILED,
                    cost=math.inf,
                    rounds=0,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return GridReport(rows=tuple(rows))


def _compositions(k: int, total: int) -> np.ndarray:
    """All k-tuples of nonnegative integers summing to `total`."""
    if k == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for first in range(total + 1):
        rest = _compositions(k - 1, total - first)
        col = np.full((rest.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([col, rest]))
    return np.vstack(blocks)


def _simplex_grid(k: int, steps: int) -> np.ndarray:
    """All compositions of `steps` into k parts, as fractions summing to 1."""
    return _compositions(k, steps).astype(np.float64) / steps


def oracle_best_weights(
    features: FeatureMatrix,
    labels: np.ndarray,
    candidates: Sequence[int],
    resolution: float = 0.01,
    metric: str = "nearest_centroid_accuracy",
    embed: bool = False,
) -> tuple[WeightVector, float]:
    """Exhaustive grid search over the weight simplex of candidate features.

    Non-candidate features are held at the weight floor. With `embed` the
    metric is evaluated on a full 2D solve per grid point (use a coarse
    resolution); otherwise it is evaluated in the weighted feature space,
    which upper-bounds what any 2D projection of those weights can express.
    """
    candidates = sorted(set(int(c) for c in candidates))
    if not 1 <= len(candidates) <= 4:
        raise ContractViolation("exhaustive search supports 1..4 candidate features")
    if any(c < 0 or c >= features.n_features for c in candidates):
        raise ContractViolation("candidate index out of range")
    steps = max(1, round(1.0 / resolution))
    grid = _simplex_grid(len(candidates), steps)
    d = features.n_features
    budget = d - d * WEIGHT_FLOOR
    labels = np.asarray(labels, dtype=np.int64)

    best_value = -math.inf
    best_weights: np.ndarray | None = None
    if embed:
        for frac in grid:
            w = np.full(d, WEIGHT_FLOOR)
            w[candidates] += frac * budget
            layout, _ = wmds_solve(features, w)
            value = _METRICS[metric](layout, labels)
            if value > best_value:
                best_value, best_weights = value, w
    else:
        vals = features.values
        mask0 = labels == 0
        mu0 = vals[mask0].mean(axis=0)
        mu1 = vals[~mask0].mean(axis=0)
        sq0 = (vals - mu0) ** 2
        sq1 = (vals - mu1) ** 2
        weights = np.full((grid.shape[0], d), WEIGHT_FLOOR)
        weights[:, candidates] += grid * budget
        d0 = sq0 @ weights.T  # (n_items, n_grid)
        d1 = sq1 @ weights.T
        assigned = d1 < d0
        acc = (assigned == (labels[:, None] == 1)).mean(axis=0)
        best = int(np.argmax(acc))
        best_value = float(acc[best])
        best_weights = weights[best]
    return WeightVector(best_weights), float(best_value)


def write_reports(report: GridReport, out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DatasetFormatError(f"cannot create output directory {out}: {exc}") from exc
    csv_path = out / "results.csv"
    txt_path = out / "results.txt"
    report.write_csv(csv_path)
    txt_path.write_text(report.render_text())
    return csv_path, txt_path
