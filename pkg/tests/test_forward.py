import threading

import numpy as np
import pytest

from olisteer.core import (
    FeatureMatrix,
    Layout,
    WeightVector,
    layout_distances,
    pairwise_distances,
    wmds_solve,
)
from olisteer.errors import ContractViolation

from conftest import random_features, random_weights


def planted_2d(rng, n=10, d=8):
    """Known 2D points padded with constant columns: exactly embeddable."""
    pts = rng.random((n, 2))
    pts = (pts - pts.min(axis=0)) / (pts.max(axis=0) - pts.min(axis=0))
    values = np.hstack([pts, np.full((n, d - 2), 0.5)])
    return FeatureMatrix(values=values, item_ids=[f"i{k}" for k in range(n)]), pts


class TestForwardSolve:
    def test_two_points_exact(self):
        f = FeatureMatrix(values=np.array([[0.0, 0.0], [1.0, 1.0]]), item_ids=["a", "b"])
        _, report = wmds_solve(f, WeightVector.uniform(2))
        assert report.final_objective <= 1e-8

    def test_equilateral_triangle(self):
        # three mutually equidistant items embed exactly
        values = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        f = FeatureMatrix(values=values, item_ids=["a", "b", "c"])
        layout, report = wmds_solve(f, WeightVector.uniform(3))
        assert report.final_objective <= 1e-6
        dists = layout_distances(layout).d
        assert np.ptp(dists) <= 1e-4 * dists.mean()

    def test_planted_2d_recovery(self, rng):
        for _ in range(5):
            f, _ = planted_2d(rng)
            _, report = wmds_solve(f, WeightVector.uniform(8))
            assert report.final_objective <= 1e-4
            assert report.iterations <= 300

    def test_trace_non_increasing_random(self, rng):
        for _ in range(10):
            n = int(rng.integers(4, 20))
            d = int(rng.integers(2, 10))
            f = random_features(rng, n, d)
            w = random_weights(rng, d)
            _, report = wmds_solve(f, w)
            trace = report.objective_trace
            assert all(b <= a + 1e-12 * max(1.0, a) for a, b in zip(trace, trace[1:]))

    def test_deterministic(self, rng):
        f = random_features(rng, 12, 5)
        w = random_weights(rng, 5)
        layout1, _ = wmds_solve(f, w)
        layout2, _ = wmds_solve(f, w)
        np.testing.assert_array_equal(layout1.positions, layout2.positions)

    def test_init_alignment(self, rng):
        # solving from an init stays in the init's frame of reference
        f = random_features(rng, 10, 4)
        w = random_weights(rng, 4)
        base, _ = wmds_solve(f, w)
        w2 = random_weights(rng, 4)
        aligned, _ = wmds_solve(f, w2, init=base)
        shifted = Layout(positions=base.positions + np.array([100.0, -50.0]))
        aligned2, _ = wmds_solve(f, w2, init=shifted)
        # same solve expressed in the two frames: difference is the frame shift
        delta = aligned2.positions - aligned.positions
        assert np.allclose(delta, np.array([100.0, -50.0]), atol=1e-6)

    def test_init_size_mismatch(self, rng):
        f = random_features(rng, 6, 3)
        with pytest.raises(ContractViolation):
            wmds_solve(f, WeightVector.uniform(3), init=Layout(positions=np.zeros((4, 2))))

    def test_cancellation_returns_best_so_far(self, rng):
        f = random_features(rng, 15, 6)
        w = random_weights(rng, 6)
        cancel = threading.Event()
        cancel.set()
        layout, report = wmds_solve(f, w, cancel=cancel)
        assert not report.converged
        assert report.iterations == 0
        assert layout.n_items == 15

    def test_weighted_targets_respected(self, rng):
        # crank one feature's weight: its structure dominates the layout
        n = 12
        values = rng.random((n, 3))
        values[: n // 2, 0] = 0.02
        values[n // 2 :, 0] = 0.98
        f = FeatureMatrix(values=values, item_ids=[f"i{k}" for k in range(n)])
        w = WeightVector(np.array([2.9, 0.05, 0.05]))
        layout, _ = wmds_solve(f, w)
        a = layout.positions[: n // 2].mean(axis=0)
        b = layout.positions[n // 2 :].mean(axis=0)
        between = np.linalg.norm(a - b)
        within = max(
            np.linalg.norm(layout.positions[: n // 2] - a, axis=1).mean(),
            np.linalg.norm(layout.positions[n // 2 :] - b, axis=1).mean(),
        )
        assert between > 2 * within
