"""Fixed-size thumbnails for the workspace scatterplot."""

from __future__ import annotations

import json
from pathlib import Path

from PIL import Image, UnidentifiedImageError

from extractors.job import ExtractionJob, SkipReport

THUMB_SIZE = (64, 64)


def make_thumbnails(job: ExtractionJob) -> tuple[list[str], SkipReport]:
    """Write thumbnails under <output_dir>/thumbs; returns relative paths.

    Idempotent: re-running overwrites the same files. Corrupt images are
    skipped and reported.
    """
    report = SkipReport()
    out = job.output_dir / "thumbs"
    out.mkdir(parents=True, exist_ok=True)
    written: list[str] = []
    for path in job.images():
        target = out / f"{path.stem}.png"
        try:
            with Image.open(path) as img:
                thumb = img.convert("RGB")
                thumb.thumbnail(THUMB_SIZE)
                thumb.save(target, format="PNG")
        except (UnidentifiedImageError, OSError) as exc:
            report.skip(path, f"undecodable: {exc}")
            continue
        written.append(f"thumbs/{target.name}")
    return written, report


def attach_thumbnails(manifest_path: Path, thumb_paths: list[str]) -> None:
    """Record thumbnail paths in an already-written manifest, by item id."""
    raw = json.loads(manifest_path.read_text())
    by_stem = {Path(p).stem: p for p in thumb_paths}
    raw["thumbnail_paths"] = [by_stem.get(item) for item in raw["item_ids"]]
    if any(p is None for p in raw["thumbnail_paths"]):
        raw["thumbnail_paths"] = None
    manifest_path.write_text(json.dumps(raw, indent=2) + "\n")
