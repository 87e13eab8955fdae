'''
Module for the annotate command.

Created on 19-10-2026
@author: Harry New

'''
import click

from app.cli.deps import DATASET_FILE, HISTOGRAM_FILE, MANIFEST_FILE, handle_errors, load_config, read_channels
from app.dataset_builder import (
    annotate, binarize_channels, build_dataset, label_histogram, weekday_histogram, write_dataset, write_manifest,
)

# - - - - - - - - - - - - - - - - - - -

@click.command("annotate")
@click.pass_context
@handle_errors
def annotate_command(ctx: click.Context) -> None:
    """
    Label every window as absent or present and write the dataset, manifest and weekday histogram.
    """
    config = load_config(ctx)
    channels = read_channels(config)
    grid = binarize_channels(channels, config.ingest.threshold_watts)
    annotation = annotate(grid, config.annotation, config.derive_seed("annotate"))
    dataset = build_dataset(
        channels, annotation.intervals,
        threshold_watts=config.ingest.threshold_watts, provenance=annotation.provenance,
    )

    config.out_dir.mkdir(parents=True, exist_ok=True)
    write_dataset(dataset, config.out_dir / DATASET_FILE)
    write_manifest(annotation, config.out_dir / MANIFEST_FILE)
    weekday_histogram(dataset).to_csv(config.out_dir / HISTOGRAM_FILE, index=False, lineterminator="\n")

    counts = label_histogram(dataset)
    click.echo(
        f"Wrote {len(dataset)} rows ({counts['absent']} absent, {counts['present']} present) "
        f"and {len(annotation.intervals)} intervals to {config.out_dir}"
    )
