"""Stateful interactive loop around the numerical kernel.

A session holds one dataset's features, the current weight vector and
layout, a staged batch of drag interactions, and an append-only log. Drags
are staged and applied on explicit commit (the update cycle: drag ->
inverse weight learning -> forward re-projection -> rigid anchoring to the
previous layout); slider-style weight edits apply immediately.

Concurrency: single writer per session. All mutations serialize on an
internal lock; reads take it briefly for consistent snapshots. A newly
arriving mutation may cancel an in-flight solve via `request_supersede`,
in which case the cancelled update commits its best-so-far result flagged
non-converged and the new mutation proceeds from there.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from olisteer.errors import (
    ContractViolation,
    InsufficientPairsError,
    UnknownItemError,
)
from olisteer.core import (
    WEIGHT_FLOOR,
    FeatureMatrix,
    Layout,
    SolveReport,
    WeightVector,
    procrustes_align,
    wmds_inverse,
    wmds_solve,
)

# Share of total weight mass granted to a feature by "maximize".
MAXIMIZE_SHARE = 0.9

# Below this many staged drags the expressed distances constrain the
# model only weakly; commits still proceed but carry a warning.
LOW_INFORMATION_DRAGS = 3


@dataclass(frozen=True)
class DragEvent:
    """A staged observation-level move of one item to a new 2D position."""

    item_id: str
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ContractViolation("drag coordinates must be finite")


@dataclass(frozen=True)
class WeightEdit:
    """A direct slider-style edit of one feature weight."""

    feature_index: int
    new_weight: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.new_weight) or self.new_weight < 0:
            raise ContractViolation("weight must be finite and nonnegative")


@dataclass(frozen=True)
class InteractionLogEntry:
    kind: str  # oli_commit | weight_edit | weight_maximize | reset
    payload: tuple
    reports: tuple[SolveReport, ...]
    revision: int
    timestamp: float


@dataclass
class SessionSnapshot:
    """Consistent read of the mutable session state."""

    session_id: str
    dataset_ref: str
    revision: int
    weights: WeightVector
    layout: Layout
    item_ids: tuple[str, ...]
    last_report: SolveReport
    staged: tuple[DragEvent, ...] = field(default_factory=tuple)
    warning: str | None = None


def _redistribute(weights: np.ndarray, fixed_index: int, fixed_value: float) -> np.ndarray:
    """Set one weight and rescale the rest so mass stays at n_features."""
    d = weights.shape[0]
    mass = float(d)
    if d == 1:
        return np.array([mass])
    value = float(np.clip(fixed_value, WEIGHT_FLOOR, mass - (d - 1) * WEIGHT_FLOOR))
    rest = np.delete(weights, fixed_index)
    budget = mass - value - (d - 1) * WEIGHT_FLOOR
    surplus = np.maximum(rest - WEIGHT_FLOOR, 0.0)
    total = surplus.sum()
    if total <= 0.0:
        rest_new = np.full(d - 1, WEIGHT_FLOOR + budget / (d - 1))
    else:
        rest_new = WEIGHT_FLOOR + surplus * (budget / total)
    out = np.empty(d)
    out[fixed_index] = value
    out[np.arange(d) != fixed_index] = rest_new
    return out


class Session:
    """Single-dataset interactive state with staged OLI commits."""

    def __init__(
        self,
        features: FeatureMatrix,
        dataset_ref: str = "",
        session_id: str | None = None,
        clock: Callable[[], float] = time.time,
    ):
        self.session_id = session_id or uuid.uuid4().hex
        self.dataset_ref = dataset_ref
        self.features = features
        self._clock = clock
        self._lock = threading.RLock()
        self._index = {item: k for k, item in enumerate(features.item_ids)}
        self._commit_hooks: list[Callable[[Session], None]] = []
        self._inflight_cancel: threading.Event | None = None
        self.pending_revision: int | None = None

        self.weights = WeightVector.uniform(features.n_features)
        layout, report = wmds_solve(features, self.weights)
        self._initial_layout = layout
        self._initial_report = report
        self.layout = layout
        self.last_report = report
        self.staged: dict[str, DragEvent] = {}
        self.log: list[InteractionLogEntry] = []
        self.revision = 0

    # -- infrastructure ----------------------------------------------------

    def add_commit_hook(self, hook: Callable[["Session"], None]) -> None:
        """Register a callback invoked (under the session lock) after every
        committed revision."""
        with self._lock:
            self._commit_hooks.append(hook)

    def request_supersede(self) -> None:
        """Cancel any in-flight solve; its update commits best-so-far."""
        cancel = self._inflight_cancel
        if cancel is not None:
            cancel.set()

    def _begin_solve(self) -> threading.Event:
        cancel = threading.Event()
        self._inflight_cancel = cancel
        self.pending_revision = self.revision + 1
        return cancel

    def _commit(self, kind: str, payload: tuple, reports: tuple[SolveReport, ...]) -> None:
        self.revision += 1
        self.log.append(
            InteractionLogEntry(
                kind=kind,
                payload=payload,
                reports=reports,
                revision=self.revision,
                timestamp=self._clock(),
            )
        )
        self._inflight_cancel = None
        self.pending_revision = None
        for hook in self._commit_hooks:
            hook(self)

    def _resolve(self, item_id: str) -> int:
        try:
            return self._index[item_id]
        except KeyError:
            raise UnknownItemError(item_id) from None

    # -- reads ---------------------------------------------------------------

    def snapshot(self) -> SessionSnapshot:
        with self._lock:
            warning = None
            if 0 < len(self.staged) < LOW_INFORMATION_DRAGS:
                warning = (
                    f"only {len(self.staged)} staged drag(s); "
                    f"{LOW_INFORMATION_DRAGS}+ give the model more signal"
                )
            return SessionSnapshot(
                session_id=self.session_id,
                dataset_ref=self.dataset_ref,
                revision=self.revision,
                weights=self.weights,
                layout=self.layout,
                item_ids=self.features.item_ids,
                last_report=self.last_report,
                staged=tuple(self.staged.values()),
                warning=warning,
            )

    def get_item_feature_values(self, item_id: str) -> np.ndarray:
        with self._lock:
            return self.features.values[self._resolve(item_id)].copy()

    def interaction_cost(self) -> int:
        """Committed analyst interactions: dragged items plus weight edits."""
        with self._lock:
            cost = 0
            for entry in self.log:
                if entry.kind == "oli_commit":
                    cost += len(entry.payload)
                elif entry.kind in ("weight_edit", "weight_maximize"):
                    cost += 1
            return cost

    def get_log(self) -> tuple[InteractionLogEntry, ...]:
        with self._lock:
            return tuple(self.log)

    # -- mutations -----------------------------------------------------------

    def stage_drag(self, event: DragEvent) -> None:
        """Stage a drag; staging is passive (no model update, same item
        re-staged keeps the last position)."""
        with self._lock:
            self._resolve(event.item_id)
            self.staged[event.item_id] = event

    def clear_staged(self) -> None:
        with self._lock:
            self.staged.clear()

    def commit_oli(self) -> SessionSnapshot:
        """Run the staged drags through inverse then forward WMDS."""
        with self._lock:
            if len(self.staged) < 2:
                raise InsufficientPairsError(
                    f"need at least 2 staged drags to commit, got {len(self.staged)}"
                )
            events = tuple(self.staged.values())
            moved = {self._resolve(e.item_id): (e.x, e.y) for e in events}
            cancel = self._begin_solve()
            try:
                new_weights, inverse_report = wmds_inverse(
                    self.features, self.weights, moved, cancel=cancel
                )
                new_layout, forward_report = wmds_solve(
                    self.features, new_weights, init=self.layout, cancel=cancel
                )
                unmoved = [k for k in range(self.features.n_items) if k not in moved]
                anchors = unmoved if len(unmoved) >= 2 else range(self.features.n_items)
                new_layout = procrustes_align(new_layout, self.layout, anchors)
            except Exception:
                self._inflight_cancel = None
                self.pending_revision = None
                raise
            self.weights = new_weights
            self.layout = new_layout
            self.last_report = forward_report
            self.staged.clear()
            payload = tuple((e.item_id, e.x, e.y) for e in events)
            self._commit("oli_commit", payload, (inverse_report, forward_report))
            return self.snapshot()

    def oli_update(self, events: Iterable[DragEvent]) -> SessionSnapshot:
        """Stage a batch and commit atomically; on any error nothing changes."""
        events = list(events)
        with self._lock:
            for e in events:
                self._resolve(e.item_id)  # validate before touching state
            before = dict(self.staged)
            try:
                for e in events:
                    self.staged[e.item_id] = e
                return self.commit_oli()
            except Exception:
                self.staged = before
                raise

    def _resolve_feature_index(self, feature_index: int) -> int:
        k = int(feature_index)
        if not 0 <= k < self.features.n_features:
            raise ContractViolation(
                f"feature index {k} out of range [0, {self.features.n_features})"
            )
        return k

    def _resolve_layout(self, weights: WeightVector, cancel: threading.Event) -> tuple[Layout, SolveReport]:
        layout, report = wmds_solve(self.features, weights, init=self.layout, cancel=cancel)
        return layout, report

    def apply_weight_edit(self, edit: WeightEdit) -> SessionSnapshot:
        """Set one weight, renormalize mass, and re-project immediately."""
        with self._lock:
            k = self._resolve_feature_index(edit.feature_index)
            new_values = _redistribute(self.weights.values, k, edit.new_weight)
            new_weights = WeightVector(new_values)
            cancel = self._begin_solve()
            try:
                layout, report = self._resolve_layout(new_weights, cancel)
            except Exception:
                self._inflight_cancel = None
                self.pending_revision = None
                raise
            self.weights = new_weights
            self.layout = layout
            self.last_report = report
            self._commit("weight_edit", (k, float(edit.new_weight)), (report,))
            return self.snapshot()

    def maximize_weight(self, feature_index: int) -> SessionSnapshot:
        """Give one feature a dominant share (90%) of the weight mass."""
        with self._lock:
            k = self._resolve_feature_index(feature_index)
            d = self.features.n_features
            if d == 1:
                new_weights = self.weights  # single feature already has all mass
            else:
                values = np.full(d, (1.0 - MAXIMIZE_SHARE) * d / (d - 1))
                values[k] = MAXIMIZE_SHARE * d
                new_weights = WeightVector(values)
            cancel = self._begin_solve()
            try:
                layout, report = self._resolve_layout(new_weights, cancel)
            except Exception:
                self._inflight_cancel = None
                self.pending_revision = None
                raise
            self.weights = new_weights
            self.layout = layout
            self.last_report = report
            self._commit("weight_maximize", (k,), (report,))
            return self.snapshot()

    def reset(self) -> SessionSnapshot:
        """Back to all-ones weights and the initial deterministic layout."""
        with self._lock:
            self.weights = WeightVector.uniform(self.features.n_features)
            self.layout = self._initial_layout
            self.last_report = self._initial_report
            self.staged.clear()
            self._commit("reset", (), (self._initial_report,))
            return self.snapshot()


def create_session(
    features: FeatureMatrix, dataset_ref: str = "", session_id: str | None = None
) -> Session:
    """New session with all-ones weights and the default projection."""
    return Session(features=features, dataset_ref=dataset_ref, session_id=session_id)


def replay(features: FeatureMatrix, log: Iterable[InteractionLogEntry], dataset_ref: str = "") -> Session:
    """Rebuild a session by replaying a committed interaction log."""
    session = create_session(features, dataset_ref=dataset_ref)
    for entry in log:
        if entry.kind == "oli_commit":
            session.oli_update(DragEvent(item_id=i, x=x, y=y) for i, x, y in entry.payload)
        elif entry.kind == "weight_edit":
            k, value = entry.payload
            session.apply_weight_edit(WeightEdit(feature_index=int(k), new_weight=float(value)))
        elif entry.kind == "weight_maximize":
            session.maximize_weight(int(entry.payload[0]))
        elif entry.kind == "reset":
            session.reset()
        else:
            raise ContractViolation(f"unknown log entry kind {entry.kind!r}")
    return session
