"""`extract` command: image folder in, engine feature file out."""

from __future__ import annotations

import sys

import click

from extractors.job import METHODS, ExtractionJob
from extractors.thumbs import attach_thumbnails, make_thumbnails


@click.command()
@click.option("--method", type=click.Choice(METHODS), required=True)
@click.option("--images", "image_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", "output_dir", type=click.Path(file_okay=False), required=True)
@click.option("--dims", "target_dims", default=512, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--thumbs/--no-thumbs", default=True, show_default=True,
              help="Also write thumbnails for the workspace view.")
def main(method: str, image_dir: str, output_dir: str, target_dims: int, seed: int, thumbs: bool) -> None:
    """Extract image features into the engine's feature-file format."""
    job = ExtractionJob(
        image_dir=image_dir, output_dir=output_dir, method=method,
        target_dims=target_dims, seed=seed,
    )
    if method == "hist":
        from extractors.hist import extract_hist as runner
    elif method == "sift":
        from extractors.sift import extract_sift as runner
    else:
        from extractors.cnn import extract_cnn as runner

    try:
        manifest_path, report = runner(job)
    except RuntimeError as exc:  # e.g. missing pretrained weights
        raise click.ClickException(str(exc)) from exc

    if thumbs:
        thumb_paths, thumb_report = make_thumbnails(job)
        attach_thumbnails(manifest_path, thumb_paths)
        report.skipped.extend(thumb_report.skipped)
        report.warnings.extend(thumb_report.warnings)

    click.echo(f"wrote {manifest_path}")
    for message in report.warnings:
        click.echo(f"warning: {message}", err=True)
    for path, reason in report.skipped:
        click.echo(f"skipped {path}: {reason}", err=True)
    if report.skipped:
        sys.exit(2)


if __name__ == "__main__":
    main()
