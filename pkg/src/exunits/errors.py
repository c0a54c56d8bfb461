"""Exception hierarchy shared by every module of the package."""


class ExunitsError(Exception):
    """Base class for all errors raised by exunits."""


class FactorTimeout(ExunitsError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NotSquarefree(ExunitsError):
    pass


class EllIsThree(ExunitsError):
    pass


class UnsupportedDegree(ExunitsError):
    pass


class PTooLarge(ExunitsError):
    pass


class TooManyPrimes(ExunitsError):
    pass


class ConductorNotExact(ExunitsError):
    pass


class NonConstantSymmetricFunction(ExunitsError):
    pass


class DivisionByZero(ExunitsError, ZeroDivisionError):
    pass


class RamificationAssumptionFailed(ExunitsError):
    pass


class NonMaximalPowerBasis(ExunitsError):
    pass


class RankDeficient(ExunitsError):
    pass


class PrecisionExhausted(ExunitsError):
    pass


class NoProgress(ExunitsError):
    pass


class BudgetExceeded(ExunitsError):
    pass


class NotClosed(ExunitsError):
    pass


class CacheCorrupt(ExunitsError):
    pass
