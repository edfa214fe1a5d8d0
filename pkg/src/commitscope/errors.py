"""Shared exception and warning types."""


class DataError(Exception):
    """Malformed or inconsistent input data (CLI exit code 2)."""


class ParseError(DataError):
    """Unparseable input; carries the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class IngestWarning(UserWarning):
    """Recoverable ingestion issue (lossy decoding, skipped record)."""


class DetectWarning(UserWarning):
    """Detector skipped an entity or produced a degraded result."""


class ConvergenceWarning(UserWarning):
    """Iterative computation hit its iteration cap before the tolerance."""
