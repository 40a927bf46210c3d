import json

import numpy as np
import pytest
from PIL import Image

from extractors.job import ExtractionJob
from extractors.sift import extract_sift


def load_matrix(manifest_path):
    manifest = json.loads(manifest_path.read_text())
    values = np.fromfile(
        manifest_path.parent / manifest["matrix_path"], dtype="<f4"
    ).reshape(manifest["n_items"], manifest["n_features"])
    return manifest, values.astype(np.float64)


def test_seeded_determinism(desk_set, tmp_path):
    extract_sift(ExtractionJob(desk_set, tmp_path / "a", "sift", target_dims=32, seed=9))
    extract_sift(ExtractionJob(desk_set, tmp_path / "b", "sift", target_dims=32, seed=9))
    assert (tmp_path / "a" / "matrix.f32").read_bytes() == (tmp_path / "b" / "matrix.f32").read_bytes()


def test_rotated_copy_closer_than_random_image(desk_set, out_dir):
    manifest_path, _ = extract_sift(ExtractionJob(desk_set, out_dir, "sift", target_dims=32, seed=3))
    manifest, values = load_matrix(manifest_path)
    ids = manifest["item_ids"]
    original = values[ids.index("ground0")]
    rotated = values[ids.index("rot_ground0")]
    other = values[ids.index("sky3")]
    d_rot = np.linalg.norm(rotated - original)
    d_other = np.linalg.norm(rotated - other)
    assert d_rot < d_other


def test_blank_image_zero_vector_with_warning(tmp_path, desk_set, out_dir):
    src = tmp_path / "withblank"
    src.mkdir()
    for name in ("ground0.png", "sky0.png"):
        with Image.open(desk_set / name) as img:
            img.save(src / name)
    Image.new("RGB", (96, 96), (128, 128, 128)).save(src / "blank.png")
    manifest_path, report = extract_sift(ExtractionJob(src, out_dir, "sift", target_dims=16, seed=1))
    manifest, values = load_matrix(manifest_path)
    blank_row = values[manifest["item_ids"].index("blank")]
    assert np.all(blank_row == 0.0)
    assert any("blank" in w for w in report.warnings)


def test_rows_are_l1_normalized(desk_set, out_dir):
    manifest_path, _ = extract_sift(ExtractionJob(desk_set, out_dir, "sift", target_dims=24, seed=2))
    _, values = load_matrix(manifest_path)
    sums = values.sum(axis=1)
    np.testing.assert_allclose(sums[sums > 0], 1.0, atol=1e-6)
