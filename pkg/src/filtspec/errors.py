"""Exception hierarchy shared by all filtspec modules.

Every error raised on a bad-input path derives from ToolError so callers
(and the CLI) can distinguish rejected inputs from genuine bugs.
"""


class ToolError(Exception):
    """Base class for all structured filtspec errors."""


class InvalidInputError(ToolError):
    """Numeric argument outside its documented domain (non-finite value,
    filter too short, bad window, ...)."""


class SegmentationError(ToolError):
    """Welch segmentation impossible: segment longer than the signal,
    zero hop, or an empty segment set."""


class InvalidKindError(ToolError):
    """Spectrum of the wrong kind passed where another kind is required."""


class GridError(ToolError):
    """Frequency-grid problem: resample target outside the source range,
    empty band mask, or band coverage gap."""


class ConsistencyError(ToolError):
    """Internal-consistency violation, e.g. a scale-based frequency missing
    from the unified grid, or a malformed filter bank."""


class InsufficientDataError(ToolError):
    """Too few epochs, classes, or channels for the requested statistic."""


class DegenerateDataError(ToolError):
    """Zero-variance input where a spread or correlation is required."""


class FormatError(ToolError):
    """File failed parsing or validation.

    `location` names the offending field/position when known.
    """

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location
