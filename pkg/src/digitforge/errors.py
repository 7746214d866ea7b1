"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 1); exhausted
refinement or search budgets derive from :class:`BudgetError` (exit code 2).
"""


class DigitforgeError(Exception):
    pass


class InputError(DigitforgeError, ValueError):
    pass


class BudgetError(DigitforgeError, RuntimeError):
    pass


# algnum
class InvalidInterval(InputError):
    pass


class NotSquareFree(InputError):
    pass


class RootCountNotOne(InputError):
    pass


class EndpointIsRoot(InputError):
    pass


class RationalRoot(InputError):
    pass


class IrrationalRequired(InputError):
    pass


class RefinementBudgetExceeded(BudgetError):
    pass


# words
class EmptyWord(InputError):
    pass


class BlockTooLong(InputError):
    pass


class InsufficientDigits(InputError):
    pass


class BaseMismatch(InputError):
    pass


class ShapeBudgetExceeded(BudgetError):
    pass


# constructors
class WordTooShort(InputError):
    pass


class ZeroMultiplier(InputError):
    pass


class LedgerMismatch(InputError):
    pass


# detectors
class RangeError(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class BudgetExceeded(BudgetError):
    pass


# gcdlab
class EmptyArray(InputError):
    pass


class ShapeMismatch(InputError):
    pass


# cli
class ParseError(InputError):
    pass
