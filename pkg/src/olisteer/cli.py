"""Command-line entry points: serve the HTTP API, run one-off solves,
run the simulated-analyst benchmark, and manage datasets."""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from olisteer.core import WeightVector, project_weights, wmds_solve
from olisteer.ingest import (
    REGIMES,
    SyntheticRegimeSpec,
    export_dataset,
    generate_synthetic,
    load_dataset,
)
from olisteer.simulate import (
    ExperimentSpec,
    GridCell,
    default_grid_specs,
    run_grid,
    write_reports,
)

DATA_DIR_ENVVAR = "OLI_DATA_DIR"


@click.group()
def main() -> None:
    """Interactive weighted-MDS steering engine."""


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--data-dir",
    envvar=DATA_DIR_ENVVAR,
    type=click.Path(file_okay=False),
    required=True,
    help=f"Dataset directory (or ${DATA_DIR_ENVVAR}).",
)
@click.option("--solve-deadline", default=10.0, show_default=True,
              help="Seconds before a mutation returns 202 and finishes in background.")
def serve(port: int, host: str, data_dir: str, solve_deadline: float) -> None:
    """Run the HTTP API server."""
    import uvicorn

    from olisteer.server import create_app

    uvicorn.run(create_app(data_dir=data_dir, solve_deadline=solve_deadline), host=host, port=port)


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--weights", "weights_src", default="uniform", show_default=True,
              help="'uniform' or a file of per-feature weights (one per line).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default="layout.csv", show_default=True)
def solve(manifest_path: str, weights_src: str, out_path: str) -> None:
    """Project a dataset to 2D and write item_id,x,y rows."""
    features, _ = load_dataset(manifest_path)
    if weights_src == "uniform":
        weights = WeightVector.uniform(features.n_features)
    else:
        raw = np.loadtxt(weights_src, ndmin=1)
        if raw.shape[0] != features.n_features:
            raise click.ClickException(
                f"{weights_src} has {raw.shape[0]} weights, dataset has {features.n_features} features"
            )
        weights = WeightVector(project_weights(raw))
    layout, report = wmds_solve(features, weights)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["item_id", "x", "y"])
        for item, (x, y) in zip(features.item_ids, layout.positions):
            writer.writerow([item, f"{x:.10g}", f"{y:.10g}"])
    click.echo(
        f"wrote {out_path}: {features.n_items} items, stress={report.final_objective:.3e}, "
        f"{'converged' if report.converged else 'not converged'} in {report.iterations} iterations"
    )


def _cells_from_spec_file(path: str) -> list[GridCell]:
    raw = json.loads(Path(path).read_text())
    defaults = raw.get("defaults", {})
    if "cells" not in raw:
        return default_grid_specs(**defaults)
    cells = []
    for cell in raw["cells"]:
        merged = {**defaults, **cell}
        dataset = SyntheticRegimeSpec(
            regime=merged["construction"],
            n_items=int(merged.get("n_items", 100)),
            n_features=int(merged.get("n_features", 16)),
            noise_sigma=float(merged.get("noise_sigma", 0.05)),
            seed=int(merged.get("dataset_seed", merged.get("seed", 0))),
        )
        cells.append(
            GridCell(
                regime=merged["regime"],
                task=merged["task"],
                experiment=ExperimentSpec(
                    dataset=dataset,
                    drags_per_round=int(merged.get("drags_per_round", 6)),
                    interaction_cap=int(merged.get("interaction_cap", 50)),
                    success_metric=merged.get("success_metric", "nearest_centroid_accuracy"),
                    success_threshold=float(merged.get("success_threshold", 0.95)),
                    seed=int(merged.get("seed", 0)),
                ),
            )
        )
    return cells


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON experiment spec; omit for the default 3x3 grid.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def simulate(spec_path: str | None, out_dir: str) -> None:
    """Run the simulated-analyst benchmark grid."""
    cells = _cells_from_spec_file(spec_path) if spec_path else default_grid_specs()
    report = run_grid(cells)
    csv_path, txt_path = write_reports(report, out_dir)
    click.echo(txt_path.read_text())
    click.echo(f"wrote {csv_path} and {txt_path}")
    if any(row.error for row in report.rows):
        for row in report.rows:
            if row.error:
                click.echo(f"cell ({row.regime}, {row.task}) errored: {row.error}", err=True)
        sys.exit(1)


@main.group()
def datasets() -> None:
    """Inspect and create datasets in the data directory."""


@datasets.command("list")
@click.option("--data-dir", envvar=DATA_DIR_ENVVAR, type=click.Path(file_okay=False), required=True)
def datasets_list(data_dir: str) -> None:
    """List datasets registered under the data directory."""
    from olisteer.server.app import DatasetRegistry

    manifests = DatasetRegistry(data_dir).list()
    if not manifests:
        click.echo("no datasets found")
        return
    for ref, m in manifests:
        click.echo(f"{ref}\t{m.n_items} items\t{m.n_features} features\t{m.abstraction_level}")


@datasets.command("generate")
@click.option("--data-dir", envvar=DATA_DIR_ENVVAR, type=click.Path(file_okay=False), required=True)
@click.option("--name", required=True)
@click.option("--regime", type=click.Choice(REGIMES), default="aligned", show_default=True)
@click.option("--n-items", default=100, show_default=True)
@click.option("--n-features", default=16, show_default=True)
@click.option("--noise-sigma", default=0.05, show_default=True)
@click.option("--seed", default=0, show_default=True)
def datasets_generate(data_dir: str, name: str, regime: str, n_items: int,
                      n_features: int, noise_sigma: float, seed: int) -> None:
    """Generate a synthetic dataset and register it."""
    spec = SyntheticRegimeSpec(
        regime=regime, n_items=n_items, n_features=n_features,
        noise_sigma=noise_sigma, seed=seed,
    )
    features, labels = generate_synthetic(spec)
    out_dir = Path(data_dir) / name
    manifest_path = export_dataset(features, name, out_dir)
    labels_path = out_dir / "labels.json"
    labels_path.write_text(json.dumps([int(v) for v in labels]))
    click.echo(f"wrote {manifest_path} ({n_items} items x {n_features} features, labels in {labels_path})")


if __name__ == "__main__":
    main()
