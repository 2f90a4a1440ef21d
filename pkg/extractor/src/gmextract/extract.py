"""Image folder -> GMFEAT01 feature file.

Images are taken in lexicographic filename order (stable pairing with image
lists), decoded to RGB, resized to 256 x 256 with bicubic interpolation, then
put through the extractor's own resize/normalization before batched inference.
One feature row per image; the file label describes extractor, tap,
preprocessing, and weight provenance.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from .errors import EmptyImageDirError, ExtractError, UndecodableImageError
from .models import EXTRACTORS, ExtractorSpec, build_model
from .writer import write_feature_file

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".webp", ".tiff"}
PRE_RESIZE = 256


def list_images(image_dir) -> list[Path]:
    root = Path(image_dir)
    if not root.is_dir():
        raise ExtractError(f"{image_dir}: not a directory")
    files = sorted(
        (p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES),
        key=lambda p: p.name,
    )
    if not files:
        raise EmptyImageDirError(f"{image_dir}: no decodable image files found")
    return files


def load_image_tensor(path: Path, spec: ExtractorSpec) -> torch.Tensor:
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
    except (UnidentifiedImageError, OSError) as exc:
        raise UndecodableImageError(f"cannot decode {path.name}: {exc}") from exc
    rgb = rgb.resize((PRE_RESIZE, PRE_RESIZE), Image.BICUBIC)
    rgb = rgb.resize((spec.input_size, spec.input_size), Image.BICUBIC)
    pixels = np.asarray(rgb, dtype=np.float32) / 255.0
    pixels = (pixels - np.asarray(spec.mean, dtype=np.float32)) / np.asarray(
        spec.std, dtype=np.float32
    )
    return torch.from_numpy(pixels.transpose(2, 0, 1))


def make_label(spec: ExtractorSpec, weights_desc: str) -> str:
    return (
        f"{spec.name}({spec.tap}, bicubic{PRE_RESIZE}->{spec.input_size}, "
        f"{spec.norm_name}, weights={weights_desc})"
    )


def extract_features(
    image_dir,
    extractor: str,
    out_path,
    *,
    batch_size: int = 16,
    device: str = "cpu",
    weights: str = "pretrained",
    weights_path=None,
) -> dict:
    """Run one extractor over a folder and write the feature file.

    Returns a summary dict (count, dim, label, out path).
    """
    if extractor not in EXTRACTORS:
        raise ExtractError(
            f"unknown extractor {extractor!r}; choose from {sorted(EXTRACTORS)}"
        )
    if batch_size < 1:
        raise ExtractError(f"batch size must be >= 1, got {batch_size}")
    spec = EXTRACTORS[extractor]
    files = list_images(image_dir)
    model, weights_desc = build_model(spec, weights=weights, weights_path=weights_path)
    model.to(device)

    chunks: list[np.ndarray] = []
    with torch.inference_mode():
        for start in range(0, len(files), batch_size):
            batch_files = files[start : start + batch_size]
            batch = torch.stack(
                [load_image_tensor(p, spec) for p in batch_files]
            ).to(device)
            features = spec.forward(model, batch)
            chunks.append(features.cpu().to(torch.float32).numpy())
    rows = np.concatenate(chunks, axis=0)
    if rows.shape != (len(files), spec.dim):
        raise ExtractError(
            f"extractor produced shape {rows.shape}, "
            f"expected ({len(files)}, {spec.dim})"
        )
    write_feature_file(rows, out_path)
    return {
        "count": len(files),
        "dim": spec.dim,
        "label": make_label(spec, weights_desc),
        "out": str(out_path),
    }
