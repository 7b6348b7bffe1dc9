class ExportError(Exception):
    """Base class for export failures."""


class WeightsUnavailableError(ExportError):
    """Pretrained weights could not be obtained (no network, bad cache)."""


class DimMismatchError(ExportError):
    """Model head produced an unexpected feature dimension or parameter count."""


class ManifestError(ExportError):
    """Manifest CSV could not be parsed."""
