"""Extraction job description and image-folder scanning."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".gif", ".webp"}

METHODS = ("hist", "sift", "cnn")


@dataclass(frozen=True)
class ExtractionJob:
    image_dir: Path
    output_dir: Path
    method: str
    target_dims: int = 512
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "image_dir", Path(self.image_dir))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.target_dims < 2:
            raise ValueError("target_dims must be >= 2")

    def images(self) -> list[Path]:
        if not self.image_dir.is_dir():
            raise FileNotFoundError(f"image directory {self.image_dir} not found")
        found = sorted(
            p for p in self.image_dir.iterdir()
            if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
        )
        if not found:
            raise FileNotFoundError(f"no images found under {self.image_dir}")
        return found


@dataclass
class SkipReport:
    """Undecodable or degenerate images encountered during a run."""

    skipped: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def skip(self, path: Path, reason: str) -> None:
        self.skipped.append((str(path), reason))

    def warn(self, message: str) -> None:
        self.warnings.append(message)
