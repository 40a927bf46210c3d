import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from olisteer.core import FeatureMatrix, WeightVector, project_weights


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_features(rng, n, d) -> FeatureMatrix:
    return FeatureMatrix(values=rng.random((n, d)), item_ids=[f"item-{k}" for k in range(n)])


def random_weights(rng, d) -> WeightVector:
    return WeightVector(project_weights(rng.random(d) + 0.2))
