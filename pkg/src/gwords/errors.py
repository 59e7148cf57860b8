"""Exception types shared across the package."""


class GWordsError(Exception):
    pass


# linear algebra

class AsymmetricInput(GWordsError, ValueError):
    pass


class NotPositiveDefinite(GWordsError, ValueError):
    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class ConvergenceFailure(GWordsError, ArithmeticError):
    pass


class SplitOutOfRange(GWordsError, IndexError):
    pass


class SingularMatrix(GWordsError, ZeroDivisionError):
    pass


class DimensionMismatch(GWordsError, ValueError):
    pass


# words

class WordSyntaxError(GWordsError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ZeroExponent(GWordsError, ValueError):
    pass


class ExactModeUnsupported(GWordsError, ValueError):
    pass


# constructions / projections / certify

class NotTwoEigenvalues(GWordsError, ValueError):
    pass


class MoreThanTwoEigenvalues(NotTwoEigenvalues):
    def __init__(self, message, diameters=()):
        super().__init__(message)
        self.diameters = tuple(diameters)


class NotNormalized(GWordsError, ValueError):
    pass


class MultiplicityTooLow(GWordsError, ValueError):
    pass


class NegativeEntry(GWordsError, ValueError):
    pass


class NonIntegerExponent(GWordsError, ValueError):
    pass


# search

class PreconditionViolation(GWordsError, ValueError):
    pass


class SweepExhausted(GWordsError, RuntimeError):
    pass
