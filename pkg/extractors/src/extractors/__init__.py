"""Offline image feature extraction for the steering engine.

Three abstraction levels of features, all emitted in the engine's
feature-file format: color histograms + PCA (low), SIFT bag-of-visual-words
(mid), and pretrained-CNN penultimate activations (high).
"""

from extractors.job import ExtractionJob
from extractors.formats import write_feature_file

__all__ = ["ExtractionJob", "write_feature_file"]
