"""Exception hierarchy."""


class PsmetroError(Exception):
    pass


class NonHermitianError(PsmetroError, ValueError):
    pass


class NoConvergenceError(PsmetroError, ArithmeticError):
    pass


class DimensionMismatchError(PsmetroError, ValueError):
    pass


class NotNormalizedError(PsmetroError, ValueError):
    pass


class VanishingPostselectionError(PsmetroError, ArithmeticError):
    """Postselection probability is too small for the requested quantity."""


class ZeroCostDenominatorError(PsmetroError, ZeroDivisionError):
    pass


class OrthogonalPrePostError(PsmetroError, ArithmeticError):
    """Pre- and postselected states are (numerically) orthogonal."""


class NullVectorError(PsmetroError, ArithmeticError):
    pass


class ZeroMeanError(PsmetroError, ArithmeticError):
    """Mean of the observable vanishes; the optimal weak value diverges."""


class DimensionCapExceededError(PsmetroError, ValueError):
    pass


class DegenerateSpectrumError(PsmetroError, ValueError):
    pass


class AlphaSingularError(PsmetroError, ArithmeticError):
    pass
