"""Exception types shared across the package."""


class PropagationError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PropagationError):
    """Structural misuse: mismatched shapes, invalid schemes, wrong body kinds."""


class DataError(PropagationError):
    """Well-formed request over bad data (value off grid, non-integral cut, ...)."""


class ResourceLimitError(PropagationError):
    """An enumeration or iteration cap was exceeded."""


class ProbeRejectionError(ConfigError):
    """A registered function failed a randomized inflation/monotonicity probe."""

    def __init__(self, fid: str, message: str):
        super().__init__(f"function {fid!r} rejected: {message}")
        self.fid = fid
