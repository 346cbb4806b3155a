"""Exception types shared across the toolkit.

Plain OSError is used for genuine file-system failures; everything the
library itself detects gets a typed error below so callers can tell a bad
file from a bad argument from a bad stream.
"""

from __future__ import annotations


class EvcError(Exception):
    """Base class for all toolkit errors."""


class FormatError(EvcError):
    """A file does not parse under its declared format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GeometryViolation(EvcError):
    """An event lies outside the declared sensor geometry."""

    def __init__(self, message: str, index: int | None = None):
        self.index = index
        if index is not None:
            message = f"event {index}: {message}"
        super().__init__(message)


class TimestampRegression(EvcError):
    """Timestamps in a stream go backwards."""

    def __init__(self, message: str, index: int | None = None):
        self.index = index
        if index is not None:
            message = f"event {index}: {message}"
        super().__init__(message)


class InvalidParameter(EvcError):
    """A configuration value is out of its legal range."""


class ImageTooSmall(EvcError):
    """An image is smaller than the kernel footprint it must support."""


class StreamTooShort(EvcError):
    """A stream is too short for a meaningful measurement."""


class CountMismatch(EvcError):
    """A ground-truth file does not align with its event stream."""


class Misalignment(EvcError):
    """Detector output and ground truth have different lengths."""


class RecallNotSpanned(EvcError):
    """A precision-recall curve does not bracket the requested recall."""


class InstrumentationUnavailable(EvcError):
    """The detector does not expose the counters needed for cost fitting."""
