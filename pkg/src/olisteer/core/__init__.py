"""Pure numerical kernel: weighted distances, stress, forward/inverse WMDS,
rigid alignment, analytic gradients.

All operations are pure functions of immutable inputs and safe for
concurrent use; long-running solves accept a `threading.Event` cancellation
token checked once per iteration.
"""

from olisteer.core.types import (
    WEIGHT_FLOOR,
    ZERO_DISTANCE_GUARD,
    DistanceVector,
    FeatureMatrix,
    Layout,
    SolveReport,
    WeightVector,
    project_weights,
)
from olisteer.core.distances import (
    layout_distances,
    normalize_features,
    pairwise_distances,
    weighted_distance,
    weighted_distance_matrix,
)
from olisteer.core.stress import stress, stress_gradients
from olisteer.core.procrustes import anchor_residual, procrustes_align
from olisteer.core.solvers import classical_embedding, wmds_inverse, wmds_solve

__all__ = [
    "WEIGHT_FLOOR",
    "ZERO_DISTANCE_GUARD",
    "DistanceVector",
    "FeatureMatrix",
    "Layout",
    "SolveReport",
    "WeightVector",
    "project_weights",
    "layout_distances",
    "normalize_features",
    "pairwise_distances",
    "weighted_distance",
    "weighted_distance_matrix",
    "stress",
    "stress_gradients",
    "anchor_residual",
    "procrustes_align",
    "classical_embedding",
    "wmds_inverse",
    "wmds_solve",
]
