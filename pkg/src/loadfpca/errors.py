"""Exception hierarchy shared across the package.

Three broad families matter to the CLI exit-code contract: configuration
misuse, bad input data, and numerical failure.
"""


class LoadFpcaError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(LoadFpcaError):
    """Invalid run configuration or command usage."""


class DataError(LoadFpcaError):
    """Input data violates a contract (missing, malformed, misaligned)."""


class NumericalError(LoadFpcaError):
    """A numerical procedure cannot produce a well-defined result."""


# -- curves ------------------------------------------------------------

class EmptySetError(DataError):
    """Operation requires a non-empty curve set."""


class ZeroScaleError(DataError):
    """Normalization impossible: global maximum is not positive."""


class NotNormalizedError(DataError):
    """Denormalization requested on a set without a recorded scale factor."""


class GridMismatchError(DataError):
    """Curves or sets do not share the expected sampling grid."""


# -- fpca / regression -------------------------------------------------

class InsufficientDataError(DataError):
    """Too few observations for the requested estimation."""


class TruncationTooLargeError(ConfigError):
    """Requested expansion length exceeds the fitted component count."""


class DegenerateVarianceError(NumericalError):
    """All eigenvalues are zero; explained variability is undefined."""


class RankDeficientDesignError(NumericalError):
    """Design matrix is numerically singular; the fit was rejected."""


# -- metrics -----------------------------------------------------------

class DivisionByZeroActualError(DataError):
    """Percentage error undefined: actual series contains exact zeros."""

    def __init__(self, indices):
        self.indices = tuple(indices)
        super().__init__(f"actual values are zero at indices {list(self.indices)}")


class ZeroTotalEnergyError(DataError):
    """Energy percentage error undefined: actual series sums to zero."""


class ZeroVarianceActualError(DataError):
    """NMSE undefined: actual series has zero variance."""


class ZeroActualNormError(DataError):
    """REP undefined: actual series has zero norm."""


class ZeroVarianceError(DataError):
    """Correlation undefined: at least one series is constant."""


# -- pipeline / io -----------------------------------------------------

class ZeroAverageError(DataError):
    """Stability criterion undefined: series average is zero."""


class ParseError(DataError):
    """A record in an input file could not be parsed."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class MisalignedSeriesError(DataError):
    """Forecast and actual files do not cover the same dates/grid."""


class ModelVersionError(DataError):
    """Model file carries an unsupported format version."""
