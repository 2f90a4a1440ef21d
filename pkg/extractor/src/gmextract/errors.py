class ExtractError(Exception):
    """Base class for extraction failures."""

    code = "extract-error"


class UndecodableImageError(ExtractError):
    code = "undecodable-image"


class WeightLoadError(ExtractError):
    code = "weight-load-failure"


class EmptyImageDirError(ExtractError):
    code = "empty-image-dir"
