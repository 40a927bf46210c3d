"""High-level features: penultimate-layer activations of a pretrained
ResNet-18 used as a fixed feature extractor (the final fully-connected
layer is removed; its role is played downstream by the engine's learned
weights). 512 dims for this architecture, so no further compression.

Inputs of any size are accepted; preprocessing resizes to 224x224 and
applies the ImageNet channel statistics.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from extractors.formats import write_feature_file
from extractors.job import ExtractionJob, SkipReport

CHECKPOINT_NAME = "resnet18-f37072fd.pth"
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


def _expected_checkpoint() -> Path:
    import torch

    return Path(torch.hub.get_dir()) / "checkpoints" / CHECKPOINT_NAME


def load_backbone():
    """Pretrained ResNet-18 minus the classifier head, in eval mode.

    Raises a RuntimeError naming the expected checkpoint file when the
    weights are neither cached nor fetchable.
    """
    import torch
    import torchvision

    try:
        model = torchvision.models.resnet18(
            weights=torchvision.models.ResNet18_Weights.IMAGENET1K_V1
        )
    except Exception as exc:
        raise RuntimeError(
            "pretrained ResNet-18 weights unavailable: place the checkpoint at "
            f"{_expected_checkpoint()} (download {CHECKPOINT_NAME} from the "
            "torchvision model zoo on a connected machine)"
        ) from exc
    backbone = torch.nn.Sequential(*list(model.children())[:-1])
    backbone.eval()
    return backbone


def weights_available() -> bool:
    try:
        load_backbone()
        return True
    except RuntimeError:
        return False


def _preprocess(image: Image.Image) -> "object":
    import torch

    rgb = image.convert("RGB").resize((224, 224), Image.BILINEAR)
    data = np.asarray(rgb, dtype=np.float32) / 255.0
    data = (data - np.asarray(IMAGENET_MEAN, dtype=np.float32)) / np.asarray(
        IMAGENET_STD, dtype=np.float32
    )
    return torch.from_numpy(data.transpose(2, 0, 1)).unsqueeze(0)


def extract_cnn(job: ExtractionJob) -> tuple[Path, SkipReport]:
    """Fixed-extractor CNN features for every decodable image."""
    import torch

    backbone = load_backbone()
    report = SkipReport()
    rows: list[np.ndarray] = []
    ids: list[str] = []
    with torch.no_grad():
        for path in job.images():
            try:
                with Image.open(path) as img:
                    batch = _preprocess(img)
            except (UnidentifiedImageError, OSError) as exc:
                report.skip(path, f"undecodable: {exc}")
                continue
            activations = backbone(batch).squeeze().numpy().astype(np.float64)
            rows.append(activations)
            ids.append(path.stem)
    if len(rows) < 2:
        raise ValueError("need at least 2 decodable images")
    features = np.vstack(rows)
    if features.shape[1] > job.target_dims:
        from extractors.hist import pca_reduce

        features = pca_reduce(features, job.target_dims)
        report.warn(f"compressed {rows[0].shape[0]} dims to {features.shape[1]} via PCA")
    manifest = write_feature_file(
        features, ids, job.image_dir.name or "cnn", job.output_dir, "high"
    )
    return manifest, report
