import numpy as np
import pytest
from scipy.stats import spearmanr

from olisteer.core import FeatureMatrix, WeightVector, normalize_features
from olisteer.errors import (
    ContractViolation,
    InsufficientPairsError,
    UnknownItemError,
)
from olisteer.ingest import SyntheticRegimeSpec, generate_synthetic
from olisteer.session import (
    DragEvent,
    Session,
    WeightEdit,
    create_session,
    replay,
)
from olisteer.simulate import nearest_centroid_accuracy

from conftest import random_features
from oracles import best_rigid_residual


@pytest.fixture
def small_session(rng):
    return create_session(random_features(rng, 12, 5), dataset_ref="small")


def planted_single_feature(rng, n=100, d=16):
    return generate_synthetic(
        SyntheticRegimeSpec("aligned", n, d, noise_sigma=0.05, seed=int(rng.integers(1 << 30)))
    )


class TestCreateSession:
    def test_initial_state(self, rng):
        f, _ = generate_synthetic(SyntheticRegimeSpec("aligned", 100, 8, seed=4))
        s = create_session(f, dataset_ref="demo")
        assert s.revision == 0
        assert s.layout.n_items == 100
        np.testing.assert_array_equal(s.weights.values, np.ones(8))

    def test_single_item_dataset_rejected(self):
        with pytest.raises(ContractViolation):
            FeatureMatrix(values=np.array([[0.5]]), item_ids=["only"])

    def test_two_sessions_identical_initial_layout(self, rng):
        f = random_features(rng, 10, 4)
        a = create_session(f)
        b = create_session(f)
        assert a.session_id != b.session_id
        np.testing.assert_array_equal(a.layout.positions, b.layout.positions)


class TestStaging:
    def test_stage_same_item_twice_last_wins(self, small_session):
        s = small_session
        s.stage_drag(DragEvent("item-3", 1.0, 1.0))
        s.stage_drag(DragEvent("item-3", 2.0, -1.0))
        assert len(s.staged) == 1
        assert s.staged["item-3"].x == 2.0

    def test_staging_is_passive(self, small_session):
        s = small_session
        before = s.layout.positions.copy()
        rev = s.revision
        s.stage_drag(DragEvent("item-0", 5.0, 5.0))
        np.testing.assert_array_equal(s.layout.positions, before)
        assert s.revision == rev

    def test_unknown_item(self, small_session):
        with pytest.raises(UnknownItemError):
            small_session.stage_drag(DragEvent("nope", 0.0, 0.0))

    def test_low_information_warning_below_three_drags(self, small_session):
        s = small_session
        assert s.snapshot().warning is None
        s.stage_drag(DragEvent("item-0", 0.0, 0.0))
        assert "staged drag" in s.snapshot().warning
        s.stage_drag(DragEvent("item-1", 1.0, 0.0))
        assert s.snapshot().warning is not None
        s.stage_drag(DragEvent("item-2", 2.0, 0.0))
        assert s.snapshot().warning is None


class TestCommitOli:
    def test_commit_without_enough_drags(self, small_session):
        with pytest.raises(InsufficientPairsError):
            small_session.commit_oli()
        small_session.stage_drag(DragEvent("item-0", 0.0, 0.0))
        with pytest.raises(InsufficientPairsError):
            small_session.commit_oli()

    def test_planted_cluster_drags_separate_classes(self, rng):
        f, labels = planted_single_feature(rng)
        s = create_session(f)
        cls0 = np.flatnonzero(labels == 0)[:3]
        cls1 = np.flatnonzero(labels == 1)[:3]
        for rank, idx in enumerate(cls0):
            s.stage_drag(DragEvent(f.item_ids[idx], -1.5, 0.3 * rank))
        for rank, idx in enumerate(cls1):
            s.stage_drag(DragEvent(f.item_ids[idx], 1.5, 0.3 * rank))
        s.commit_oli()
        assert nearest_centroid_accuracy(s.layout, labels) >= 0.95

    def test_noop_commit_does_not_worsen_fit(self, rng):
        from test_inverse import moved_pair_stress

        f = random_features(rng, 10, 4)
        s = create_session(f)
        picks = [1, 4, 7]
        moved = {k: tuple(s.layout.positions[k]) for k in picks}
        before = moved_pair_stress(f, s.weights, moved)
        for k in picks:
            s.stage_drag(DragEvent(f.item_ids[k], *s.layout.positions[k]))
        s.commit_oli()
        after = moved_pair_stress(f, s.weights, moved)
        assert after <= before + 1e-9

    def test_commit_clears_staging_and_increments_revision(self, small_session):
        s = small_session
        s.stage_drag(DragEvent("item-1", -1.0, 0.0))
        s.stage_drag(DragEvent("item-2", 1.0, 0.0))
        s.commit_oli()
        assert s.staged == {}
        assert s.revision == 1
        assert s.log[-1].kind == "oli_commit"

    def test_anchoring_is_procrustes_optimal(self, rng):
        # unmoved items end up no more displaced than under any rigid motion
        f = random_features(rng, 10, 4)
        s = create_session(f)
        prev = s.layout.positions.copy()
        s.stage_drag(DragEvent("item-0", -2.0, 0.0))
        s.stage_drag(DragEvent("item-1", 2.0, 0.0))
        s.stage_drag(DragEvent("item-2", 0.0, 2.0))
        s.commit_oli()
        unmoved = [k for k in range(10) if k > 2]
        ours = float(np.sum((s.layout.positions[unmoved] - prev[unmoved]) ** 2))
        oracle = best_rigid_residual(s.layout.positions[unmoved], prev[unmoved])
        assert ours <= oracle + max(1e-9, 1e-6 * oracle)


class TestWeightOps:
    def test_edit_to_current_value_keeps_layout(self, small_session):
        # unchanged up to solver tolerance: one majorization step at a
        # stress-converged point moves positions ~sqrt(stress tol) at most
        s = small_session
        before = s.layout.positions.copy()
        s.apply_weight_edit(WeightEdit(2, float(s.weights.values[2])))
        np.testing.assert_allclose(s.layout.positions, before, atol=1e-3)
        assert s.revision == 1

    def test_negative_weight_rejected(self, small_session):
        with pytest.raises(ContractViolation):
            small_session.apply_weight_edit(WeightEdit(0, -1.0))

    def test_invalid_index_rejected(self, small_session):
        with pytest.raises(ContractViolation):
            small_session.apply_weight_edit(WeightEdit(99, 1.0))

    def test_mass_preserved_after_edit(self, small_session):
        s = small_session
        s.apply_weight_edit(WeightEdit(1, 3.5))
        assert s.weights.values[1] == pytest.approx(3.5)
        assert float(s.weights.values.sum()) == pytest.approx(5.0, abs=1e-9)

    def test_monotone_feature_orders_layout(self, rng):
        # maximize a feature that encodes a gradient: the layout's principal
        # axis orders items by that feature value
        n, d = 60, 6
        values = rng.random((n, d))
        values[:, 3] = np.linspace(0.0, 1.0, n)
        f = normalize_features(values)
        s = create_session(f)
        s.maximize_weight(3)
        pos = s.layout.positions - s.layout.positions.mean(axis=0)
        _, _, vt = np.linalg.svd(pos, full_matrices=False)
        axis = pos @ vt[0]
        rho, _ = spearmanr(f.values[:, 3], axis)
        assert abs(rho) >= 0.9

    def test_maximize_convention(self, small_session):
        s = small_session
        s.maximize_weight(2)
        d = 5
        assert s.weights.values[2] == pytest.approx(0.9 * d)
        others = np.delete(s.weights.values, 2)
        np.testing.assert_allclose(others, np.full(d - 1, 0.1 * d / (d - 1)))

    def test_maximize_transfers_dominance(self, small_session):
        s = small_session
        s.maximize_weight(0)
        s.maximize_weight(4)
        assert int(np.argmax(s.weights.values)) == 4
        assert s.weights.values[4] == pytest.approx(0.9 * 5)

    def test_maximize_single_feature_dataset(self, rng):
        values = np.vstack([np.linspace(0, 1, 6)]).T
        f = FeatureMatrix(values=values, item_ids=[f"i{k}" for k in range(6)])
        s = create_session(f)
        s.maximize_weight(0)
        np.testing.assert_array_equal(s.weights.values, [1.0])
        assert s.revision == 1


class TestReadsAndCost:
    def test_feature_values_roundtrip(self, small_session):
        s = small_session
        values = s.get_item_feature_values("item-4")
        assert values.shape == (5,)
        assert values.min() >= 0 and values.max() <= 1

    def test_unknown_item_features(self, small_session):
        with pytest.raises(UnknownItemError):
            small_session.get_item_feature_values("ghost")

    def test_features_immutable_across_commits(self, small_session):
        s = small_session
        before = s.get_item_feature_values("item-0")
        s.stage_drag(DragEvent("item-0", -1.0, 0.0))
        s.stage_drag(DragEvent("item-1", 1.0, 0.0))
        s.commit_oli()
        np.testing.assert_array_equal(before, s.get_item_feature_values("item-0"))

    def test_cost_counting(self, small_session):
        s = small_session
        assert s.interaction_cost() == 0
        for k in range(6):
            s.stage_drag(DragEvent(f"item-{k}", (-1.5 if k < 3 else 1.5), 0.2 * k))
        s.commit_oli()
        assert s.interaction_cost() == 6
        s.apply_weight_edit(WeightEdit(0, 2.0))
        assert s.interaction_cost() == 7
        s.maximize_weight(1)
        assert s.interaction_cost() == 8

    def test_reset_not_counted(self, small_session):
        s = small_session
        s.apply_weight_edit(WeightEdit(0, 2.0))
        cost = s.interaction_cost()
        s.reset()
        assert s.interaction_cost() == cost


class TestResetAndReplay:
    def test_reset_restores_initial_layout_bit_identical(self, small_session):
        s = small_session
        initial = s.layout.positions.copy()
        s.apply_weight_edit(WeightEdit(0, 4.0))
        s.maximize_weight(2)
        rev = s.revision
        s.reset()
        np.testing.assert_array_equal(s.layout.positions, initial)
        np.testing.assert_array_equal(s.weights.values, np.ones(5))
        assert s.revision == rev + 1

    def test_reset_twice_idempotent_state(self, small_session):
        s = small_session
        s.reset()
        w1, l1 = s.weights.values.copy(), s.layout.positions.copy()
        s.reset()
        np.testing.assert_array_equal(s.weights.values, w1)
        np.testing.assert_array_equal(s.layout.positions, l1)
        assert s.revision == 2

    def test_revision_increments_by_one_per_mutation(self, small_session):
        s = small_session
        revs = [s.revision]
        s.apply_weight_edit(WeightEdit(0, 2.0))
        revs.append(s.revision)
        s.stage_drag(DragEvent("item-0", -1.0, 0.0))
        revs.append(s.revision)  # staging: unchanged
        s.stage_drag(DragEvent("item-1", 1.0, 0.0))
        s.commit_oli()
        revs.append(s.revision)
        s.reset()
        revs.append(s.revision)
        assert revs == [0, 1, 1, 2, 3]

    def test_replay_reproduces_final_state(self, rng):
        f = random_features(rng, 15, 6)
        s = create_session(f, dataset_ref="r")
        for k in range(6):
            s.stage_drag(DragEvent(f"item-{k}", (-1.0 if k < 3 else 1.0), 0.3 * k))
        s.commit_oli()
        s.apply_weight_edit(WeightEdit(2, 2.5))
        s.maximize_weight(4)
        s.reset()
        s.stage_drag(DragEvent("item-2", -1.0, 0.0))
        s.stage_drag(DragEvent("item-9", 1.0, 0.5))
        s.commit_oli()

        twin = replay(f, s.get_log(), dataset_ref="r")
        assert twin.revision == s.revision
        np.testing.assert_allclose(twin.weights.values, s.weights.values, atol=1e-9)
        np.testing.assert_allclose(twin.layout.positions, s.layout.positions, atol=1e-7)
        assert twin.interaction_cost() == s.interaction_cost()


class TestSupersession:
    def test_inflight_solve_cancelled_commits_best_so_far(self, rng):
        import threading
        import time

        f, _ = generate_synthetic(SyntheticRegimeSpec("distributed", 100, 32, seed=8))
        s = create_session(f)
        for k in range(6):
            s.stage_drag(DragEvent(f.item_ids[k], (-1.5 if k < 3 else 1.5), 0.3 * k))

        done = threading.Event()

        def committer():
            s.commit_oli()
            done.set()

        worker = threading.Thread(target=committer)
        worker.start()
        time.sleep(0.01)  # let the solve start
        s.request_supersede()
        worker.join(timeout=30)
        assert done.is_set()
        assert s.revision == 1
