import numpy as np
import pytest

from olisteer.core import (
    FeatureMatrix,
    WeightVector,
    layout_distances,
    normalize_features,
    pairwise_distances,
    weighted_distance,
    weighted_distance_matrix,
)
from olisteer.errors import ContractViolation, InsufficientPairsError

from conftest import random_features, random_weights


class TestWeightedDistance:
    def test_identity_is_zero(self):
        assert weighted_distance([0.3, 0.7], [0.3, 0.7], np.array([1.0, 1.0])) == 0.0

    def test_unit_weights_unit_diffs(self):
        d = weighted_distance([0.0, 0.0], [1.0, 1.0], np.array([1.0, 1.0]))
        assert d == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_weight_two_single_dim(self):
        # only the first dimension contributes, with weight 2
        d = weighted_distance([0.0, 0.0], [1.0, 1.0], np.array([2.0, 0.0]))
        assert d == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ContractViolation):
            weighted_distance([0.0, 0.0], [1.0], np.array([1.0, 1.0]))

    def test_metric_axioms_on_random_triples(self, rng):
        # symmetry, nonnegativity, triangle inequality
        for _ in range(200):
            d = rng.integers(1, 8)
            w = random_weights(rng, d).values
            a, b, c = rng.random((3, d))
            dab = weighted_distance(a, b, w)
            dba = weighted_distance(b, a, w)
            dac = weighted_distance(a, c, w)
            dcb = weighted_distance(c, b, w)
            assert dab >= 0
            assert dab == pytest.approx(dba, abs=1e-12)
            assert dab <= dac + dcb + 1e-12

    def test_monotone_in_weights(self, rng):
        # raising one weight never shrinks any pair distance
        for _ in range(100):
            d = rng.integers(1, 8)
            w = rng.random(d) + 0.1
            a, b = rng.random((2, d))
            before = weighted_distance(a, b, w)
            k = rng.integers(0, d)
            w2 = w.copy()
            w2[k] += rng.random() + 0.1
            assert weighted_distance(a, b, w2) >= before - 1e-15


class TestPairwiseDistances:
    def test_three_items_three_pairs(self, rng):
        f = random_features(rng, 5, 3)
        dv = pairwise_distances(f, WeightVector.uniform(3), subset=[0, 2, 4])
        assert dv.n_pairs == 3

    def test_all_items_all_pairs(self, rng):
        f = random_features(rng, 10, 3)
        dv = pairwise_distances(f, WeightVector.uniform(3))
        assert dv.n_pairs == 45

    def test_duplicate_rows_distance_zero(self):
        values = np.array([[0.1, 0.9], [0.1, 0.9], [0.5, 0.5]])
        f = FeatureMatrix(values=values, item_ids=["a", "b", "c"])
        dv = pairwise_distances(f, WeightVector.uniform(2))
        by_pair = {(int(i), int(j)): v for i, j, v in zip(dv.i, dv.j, dv.d)}
        assert by_pair[(0, 1)] == 0.0

    def test_insufficient_subset(self, rng):
        f = random_features(rng, 5, 3)
        with pytest.raises(InsufficientPairsError):
            pairwise_distances(f, WeightVector.uniform(3), subset=[1])

    def test_matches_distance_matrix(self, rng):
        f = random_features(rng, 8, 5)
        w = random_weights(rng, 5)
        dv = pairwise_distances(f, w)
        mat = weighted_distance_matrix(f, w)
        for i, j, d in zip(dv.i, dv.j, dv.d):
            assert d == pytest.approx(mat[i, j], abs=1e-12)


class TestNormalizeFeatures:
    def test_minmax_scaling(self):
        f = normalize_features(np.array([[0.0], [5.0], [10.0]]))
        assert f.values[:, 0].tolist() == [0.0, 0.5, 1.0]

    def test_constant_column_maps_to_half(self):
        f = normalize_features(np.array([[7.0, 1.0], [7.0, 2.0], [7.0, 3.0]]))
        assert set(f.values[:, 0].tolist()) == {0.5}

    def test_idempotent_on_normalized(self, rng):
        raw = rng.random((6, 4))
        once = normalize_features(raw)
        twice = normalize_features(once.values, item_ids=once.item_ids)
        np.testing.assert_array_equal(once.values, twice.values)

    def test_rejects_non_finite_with_coordinates(self):
        bad = np.array([[0.0, 1.0], [np.nan, 2.0]])
        with pytest.raises(ContractViolation, match=r"row 1, col 0"):
            normalize_features(bad)


class TestLayoutDistances:
    def test_matches_manual(self, rng):
        from olisteer.core import Layout

        pos = rng.normal(size=(4, 2))
        dv = layout_distances(Layout(positions=pos))
        assert dv.d[0] == pytest.approx(np.linalg.norm(pos[0] - pos[1]), abs=1e-12)
