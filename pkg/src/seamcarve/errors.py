"""Exception types raised by the carving engine."""


class CarveError(Exception):
    """Base class for all library errors."""


class UnsupportedFormat(CarveError, ValueError):
    pass


class CorruptImage(CarveError, ValueError):
    pass


class DimensionMismatch(CarveError, ValueError):
    pass


class EmptyImage(CarveError, ValueError):
    pass


class InvalidSeam(CarveError, ValueError):
    pass


class ImageTooLarge(CarveError, ValueError):
    """Brute-force search refused: height above the configured cap."""


class WidthTooSmall(CarveError, ValueError):
    pass


class InvalidTarget(CarveError, ValueError):
    pass


class TargetTooLarge(InvalidTarget):
    pass


class EmptyMask(CarveError, ValueError):
    pass


class UnremovableMask(CarveError, ValueError):
    """The mask fills a whole row and a whole column, so no seam direction can clear it."""


class InvalidConfig(CarveError, ValueError):
    pass


class InsufficientData(CarveError, ValueError):
    pass


class SolverCapViolated(CarveError, ValueError):
    pass


class SizeExceedsSource(CarveError, ValueError):
    pass


class EmptyInput(CarveError, ValueError):
    pass
