"""Exception hierarchy shared by the package."""


class DomError(ValueError):
    """Base class for invalid-input errors raised by dommove."""


class DimensionMismatchError(DomError):
    """Two points or sets do not have the same number of objectives."""


class EmptySetError(DomError):
    """A set that must be non-empty is empty."""


class NegativeCoordinateError(DomError):
    """The MIP builder received a negative coordinate."""


class DegenerateInstanceError(DomError):
    """The instance has no meaningful answer (e.g. a lone point has no neighbor)."""


class InstanceTooLargeError(DomError):
    """Exhaustive enumeration would exceed the configured cap."""


class LPParseError(DomError):
    """Malformed LP text.

    :ivar int line: 1-based line number where parsing failed (0 if unknown).
    """

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class CsvFormatError(DomError):
    """Malformed point-set CSV.

    :ivar int row: 1-based row number of the offending row (0 if unknown).
    """

    def __init__(self, message: str, row: int = 0):
        self.row = row
        super().__init__(f"row {row}: {message}" if row else message)
