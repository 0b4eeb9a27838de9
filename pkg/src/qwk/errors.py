"""Exception hierarchy shared by all qwk modules."""


class QwkError(Exception):
    """Base class for all errors raised by qwk."""


class MalformedInputError(QwkError, ValueError):
    """Structurally invalid input (bad indices, non-square forms, bad rationals)."""


class RingMismatchError(QwkError, TypeError):
    """Operands live in different algebras (dimension, metric or kind differ)."""


class CapExceededError(QwkError, ArithmeticError):
    """A truncation cap is too small to produce an exact answer."""


class SkewnessError(QwkError, ValueError):
    """A matrix expected to be skew with respect to B is not."""


class UnknownNameError(QwkError, KeyError):
    """Unknown builtin, series or check name."""
