"""Exception hierarchy shared by every module."""


class SLWordsError(Exception):
    """Base class for all library errors."""


class InvalidGroupSpec(SLWordsError, ValueError):
    pass


class NotAUnit(SLWordsError, ArithmeticError):
    pass


class Singular(SLWordsError, ArithmeticError):
    pass


class WrongDimension(SLWordsError, ValueError):
    pass


class NotCongruent(SLWordsError, ValueError):
    """Raised by the logarithm on elements outside the first congruence subgroup."""


class NotNilpotentEnough(SLWordsError, ValueError):
    """Raised by the exponential on Lie elements that are not divisible by p."""


class PrecisionExhausted(SLWordsError, ArithmeticError):
    pass


class BadIndex(SLWordsError, IndexError):
    pass


class NotGenerating(SLWordsError):
    """The generating set failed to cover a group or quotient during search."""


class TooLarge(SLWordsError):
    pass


class VerificationError(SLWordsError, AssertionError):
    """A produced word did not evaluate to its target. Always a bug."""


class ParseError(SLWordsError, ValueError):
    pass
