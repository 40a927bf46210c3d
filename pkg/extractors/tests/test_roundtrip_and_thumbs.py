import json

import numpy as np
import pytest
from PIL import Image

from olisteer.ingest import load_dataset

from extractors.hist import extract_hist
from extractors.job import ExtractionJob
from extractors.sift import extract_sift
from extractors.thumbs import attach_thumbnails, make_thumbnails


@pytest.mark.parametrize("runner,level", [(extract_hist, "low"), (extract_sift, "mid")])
def test_manifest_loads_through_engine(desk_set, out_dir, runner, level):
    manifest_path, _ = runner(ExtractionJob(desk_set, out_dir, "hist", target_dims=16, seed=5))
    features, manifest = load_dataset(manifest_path)
    assert manifest.abstraction_level == level
    assert features.n_items == 11
    assert features.values.min() >= 0.0 and features.values.max() <= 1.0


def test_thumbnails_written_and_idempotent(desk_set, out_dir):
    job = ExtractionJob(desk_set, out_dir, "hist")
    paths, report = make_thumbnails(job)
    assert len(paths) == 11
    assert not report.skipped
    again, _ = make_thumbnails(job)
    assert again == paths
    with Image.open(out_dir / paths[0]) as thumb:
        assert max(thumb.size) <= 64


def test_corrupt_image_skipped_in_thumbs(tmp_path, desk_set):
    src = tmp_path / "imgs"
    src.mkdir()
    for name in ("ground0.png", "sky0.png"):
        with Image.open(desk_set / name) as img:
            img.save(src / name)
    (src / "corrupt.png").write_bytes(b"zzz")
    paths, report = make_thumbnails(ExtractionJob(src, tmp_path / "o", "hist"))
    assert len(paths) == 2
    assert any("corrupt.png" in p for p, _ in report.skipped)


def test_thumbnails_attached_to_manifest(desk_set, out_dir):
    job = ExtractionJob(desk_set, out_dir, "hist", target_dims=8)
    manifest_path, _ = extract_hist(job)
    paths, _ = make_thumbnails(job)
    attach_thumbnails(manifest_path, paths)
    manifest = json.loads(manifest_path.read_text())
    assert len(manifest["thumbnail_paths"]) == manifest["n_items"]
    for item, thumb in zip(manifest["item_ids"], manifest["thumbnail_paths"]):
        assert thumb == f"thumbs/{item}.png"
    # still loads through the engine with thumbnails attached
    features, loaded = load_dataset(manifest_path)
    assert loaded.thumbnail_paths is not None


def test_cli_end_to_end(desk_set, tmp_path):
    from click.testing import CliRunner

    from extractors.cli import main

    out = tmp_path / "cli_out"
    result = CliRunner().invoke(main, [
        "--method", "hist", "--images", str(desk_set), "--out", str(out),
        "--dims", "8", "--seed", "1",
    ])
    assert result.exit_code == 0, result.output
    features, manifest = load_dataset(out / "manifest.json")
    assert manifest.thumbnail_paths is not None
    assert (out / manifest.thumbnail_paths[0]).is_file()
