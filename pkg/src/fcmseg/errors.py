"""Exception types raised by the library."""


class FcmError(Exception):
    """Base class for all library errors."""


class InvalidConfigError(FcmError, ValueError):
    """A configuration value or operation precondition is invalid."""


class DimensionMismatchError(FcmError, ValueError):
    """Two operands have incompatible shapes."""


class DegenerateClusterError(FcmError, ArithmeticError):
    """A cluster received zero total membership weight.

    Cannot happen after a valid membership update; signals that the
    caller fed a hand-built membership matrix with an empty column.
    """

    def __init__(self, cluster: int):
        self.cluster = cluster
        super().__init__(f"cluster {cluster} has zero total membership weight")


class InvalidGridError(FcmError, ValueError):
    """A block grid is inconsistent with the input it is applied to."""


class PgmError(FcmError, ValueError):
    """Base class for PGM parsing errors."""


class UnsupportedMagicError(PgmError):
    """The file is a netpbm variant this reader does not handle."""


class MalformedHeaderError(PgmError):
    """The PGM header could not be parsed or contains invalid values."""


class TruncatedRasterError(PgmError):
    """The file ends before the declared raster is complete."""


class PgmValueError(PgmError):
    """A raster sample is out of range for the declared maxval."""


class MissingClassError(FcmError, FileNotFoundError):
    """A ground-truth directory lacks a required class mask."""
