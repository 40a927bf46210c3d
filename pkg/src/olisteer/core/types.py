"""Domain value types for the numerical kernel.

All types wrap read-only numpy arrays and validate their invariants at
construction time, so downstream code can assume well-formed inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from olisteer.errors import ContractViolation

# Lower bound kept on every feature weight so no feature is ever fully
# removable from the metric.
WEIGHT_FLOOR = 1e-6

# Pair distances below this are treated as zero in gradient formulas
# (subgradient 0 for the square-root term).
ZERO_DISTANCE_GUARD = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FeatureMatrix:
    """n_items x n_features matrix of normalized feature values in [0, 1]."""

    values: np.ndarray
    item_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        values = _readonly(self.values)
        object.__setattr__(self, "values", values)
        ids = tuple(str(i) for i in self.item_ids)
        object.__setattr__(self, "item_ids", ids)
        if values.ndim != 2:
            raise ContractViolation(f"feature matrix must be 2-D, got shape {values.shape}")
        n, d = values.shape
        if n < 2:
            raise ContractViolation(f"need at least 2 items, got {n}")
        if d < 1:
            raise ContractViolation("need at least 1 feature")
        if len(ids) != n:
            raise ContractViolation(f"{len(ids)} item ids for {n} rows")
        if len(set(ids)) != n:
            raise ContractViolation("item ids must be unique")
        if not np.all(np.isfinite(values)):
            raise ContractViolation("feature values must be finite")
        if values.min() < 0.0 or values.max() > 1.0:
            raise ContractViolation("feature values must lie in [0, 1]; run normalize_features first")

    @property
    def n_items(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def index_of(self, item_id: str) -> int:
        try:
            return self.item_ids.index(item_id)
        except ValueError:
            raise KeyError(item_id) from None


def project_weights(raw: np.ndarray, floor: float = WEIGHT_FLOOR) -> np.ndarray:
    """Project an arbitrary weight vector onto the feasible set.

    Feasible set: w_k >= floor and sum(w) = n_features. Clamps to the floor,
    then rescales the above-floor surplus so total mass is exact.
    """
    raw = np.asarray(raw, dtype=np.float64)
    d = raw.shape[0]
    mass = float(d)
    surplus = np.maximum(raw - floor, 0.0)
    budget = mass - d * floor
    total = surplus.sum()
    if total <= 0.0:
        return np.full(d, mass / d)
    return floor + surplus * (budget / total)


@dataclass(frozen=True)
class WeightVector:
    """Per-feature nonnegative weights with constant mass sum(w) = n_features."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = _readonly(self.values)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.shape[0] < 1:
            raise ContractViolation("weights must be a non-empty 1-D vector")
        if not np.all(np.isfinite(values)):
            raise ContractViolation("weights must be finite")
        d = values.shape[0]
        if values.min() < WEIGHT_FLOOR * (1.0 - 1e-9):
            raise ContractViolation(f"weights must be >= {WEIGHT_FLOOR}")
        if abs(float(values.sum()) - d) > 1e-9 * max(1.0, d):
            raise ContractViolation(f"weights must sum to {d}, got {values.sum()!r}")

    @classmethod
    def uniform(cls, n_features: int) -> "WeightVector":
        return cls(np.ones(n_features))

    @classmethod
    def from_raw(cls, raw: np.ndarray) -> "WeightVector":
        """Build a valid vector from arbitrary nonnegative values via projection."""
        return cls(project_weights(np.asarray(raw, dtype=np.float64)))

    @property
    def n_features(self) -> int:
        return self.values.shape[0]


def as_weights_array(w: "WeightVector | np.ndarray") -> np.ndarray:
    return w.values if isinstance(w, WeightVector) else np.asarray(w, dtype=np.float64)


@dataclass(frozen=True)
class Layout:
    """n_items x 2 workspace coordinates."""

    positions: np.ndarray

    def __post_init__(self) -> None:
        positions = _readonly(self.positions)
        object.__setattr__(self, "positions", positions)
        if positions.ndim != 2 or positions.shape[1] != 2:
            raise ContractViolation(f"layout must be n x 2, got shape {positions.shape}")
        if not np.all(np.isfinite(positions)):
            raise ContractViolation("layout coordinates must be finite")

    @property
    def n_items(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class DistanceVector:
    """Distances for unordered item pairs (i < j) over a designated subset."""

    i: np.ndarray
    j: np.ndarray
    d: np.ndarray

    def __post_init__(self) -> None:
        i = np.ascontiguousarray(self.i, dtype=np.intp)
        j = np.ascontiguousarray(self.j, dtype=np.intp)
        d = _readonly(self.d)
        i.setflags(write=False)
        j.setflags(write=False)
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "d", d)
        if not (i.shape == j.shape == d.shape) or i.ndim != 1:
            raise ContractViolation("pair index and distance arrays must be 1-D and equal length")
        if i.shape[0] == 0:
            raise ContractViolation("empty pair set")
        if np.any(i >= j):
            raise ContractViolation("pairs must satisfy i < j")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ContractViolation("distances must be finite and nonnegative")
        keys = set(zip(i.tolist(), j.tolist()))
        if len(keys) != i.shape[0]:
            raise ContractViolation("duplicate pairs")

    @property
    def n_pairs(self) -> int:
        return self.d.shape[0]

    def same_pairs(self, other: "DistanceVector") -> bool:
        return (
            self.n_pairs == other.n_pairs
            and bool(np.array_equal(self.i, other.i))
            and bool(np.array_equal(self.j, other.j))
        )


@dataclass(frozen=True)
class SolveReport:
    """Outcome of an iterative solve; the trace is non-increasing by contract."""

    final_objective: float
    iterations: int
    converged: bool
    objective_trace: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        trace = tuple(float(v) for v in self.objective_trace)
        object.__setattr__(self, "objective_trace", trace)
        if self.final_objective < 0:
            raise ContractViolation("objective must be nonnegative")
        for prev, cur in zip(trace, trace[1:]):
            if cur > prev + 1e-12 * max(1.0, abs(prev)):
                raise ContractViolation("objective trace must be non-increasing")
