"""Exception types shared across the package."""


class ModmiError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(ModmiError):
    """A file or manifest does not conform to its declared format."""


class DataError(ModmiError):
    """Values violate a type invariant (non-finite, out of range, bad shape)."""


class AlignmentError(ModmiError):
    """Streams that must share length/rate do not."""


class InfeasibleError(ModmiError):
    """A requested configuration cannot be satisfied (e.g. k > distinct rows)."""
