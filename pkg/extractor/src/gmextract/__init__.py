"""Feature extraction from image folders into GMFEAT01 files."""

from .errors import (
    EmptyImageDirError,
    ExtractError,
    UndecodableImageError,
    WeightLoadError,
)
from .extract import extract_features, list_images
from .models import EXTRACTORS
from .writer import write_feature_file

__version__ = "0.1.0"

__all__ = [
    "EXTRACTORS",
    "EmptyImageDirError",
    "ExtractError",
    "UndecodableImageError",
    "WeightLoadError",
    "extract_features",
    "list_images",
    "write_feature_file",
]
