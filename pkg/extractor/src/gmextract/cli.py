"""CLI: extract features from an image folder into a GMFEAT01 file."""

from __future__ import annotations

import json
import sys

import click

from .errors import ExtractError
from .extract import extract_features
from .models import EXTRACTORS


@click.command()
@click.option(
    "--extractor",
    type=click.Choice(sorted(EXTRACTORS)),
    required=True,
    help="Feature extractor to run.",
)
@click.option("--input-dir", required=True, help="Folder of images.")
@click.option("--out", required=True, help="Output feature file.")
@click.option("--batch-size", type=int, default=16, show_default=True)
@click.option("--device", default="cpu", show_default=True)
@click.option(
    "--weights",
    type=click.Choice(["pretrained", "random"]),
    default="pretrained",
    show_default=True,
    help="Published weights, or a seeded random init for pipeline validation.",
)
@click.option("--weights-path", default=None, help="Local state-dict file.")
def main(extractor, input_dir, out, batch_size, device, weights, weights_path):
    try:
        summary = extract_features(
            input_dir,
            extractor,
            out,
            batch_size=batch_size,
            device=device,
            weights=weights,
            weights_path=weights_path,
        )
    except ExtractError as exc:
        click.echo(json.dumps({"error": exc.code, "message": str(exc)}), err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(json.dumps({"error": "io-error", "message": str(exc)}), err=True)
        sys.exit(2)
    click.echo(json.dumps(summary))


if __name__ == "__main__":
    main()
