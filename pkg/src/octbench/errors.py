"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: any OctbenchError is a data error
(exit 2), plain OSError/FileNotFoundError are I/O errors (exit 3).
"""


class OctbenchError(Exception):
    """Base class for all toolkit errors."""


# --- imaging ---

class DecodeError(OctbenchError):
    """File exists but is not a decodable PNG/JPEG."""


class InvalidDimensionError(OctbenchError):
    """Zero-sized or otherwise unusable image geometry."""


# --- dataset / manifest ---

class ManifestError(OctbenchError):
    pass


class ParseError(ManifestError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateRecordIdError(ManifestError):
    pass


class InsufficientRecordsError(OctbenchError):
    """A class has fewer train records than the resample spec requests."""


class EmptyDatasetError(OctbenchError):
    pass


# --- feature extraction ---

class GeometryError(OctbenchError):
    """Image size incompatible with the cell/block tiling."""


class OutOfBoundsError(OctbenchError):
    """Requested pixel lies outside the image."""


# --- feature store ---

class StoreError(OctbenchError):
    pass


class MagicMismatchError(StoreError):
    pass


class VersionUnsupportedError(StoreError):
    pass


class TruncatedFileError(StoreError):
    pass


class DimMismatchError(StoreError):
    """Row length (or feature/model dimension) inconsistent with the header."""


# --- classifier ---

class EmptyTrainingSetError(OctbenchError):
    pass


# --- metrics ---

class LabelOutOfRangeError(OctbenchError):
    pass


class LengthMismatchError(OctbenchError):
    pass


class EmptyMatrixError(OctbenchError):
    pass


# --- cli ---

class ExternalNotExtractableError(OctbenchError):
    """External stores are produced elsewhere and only ingested here."""
