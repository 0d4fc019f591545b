"""Exception hierarchy for creditnet."""


class CreditNetError(Exception):
    """Base class for every error raised by this package."""


class InsufficientResidual(CreditNetError, ValueError):
    pass


class NetworkMismatch(CreditNetError, ValueError):
    pass


class UnknownVertex(CreditNetError, KeyError):
    pass


class InvalidBounds(CreditNetError, ValueError):
    pass


class InvalidGroup(CreditNetError, ValueError):
    pass


class CapExceeded(CreditNetError, ValueError):
    pass


class BudgetExceeded(CreditNetError, RuntimeError):
    """An exhaustive computation would exceed its configured budget."""


class NotATree(CreditNetError, ValueError):
    pass


class InvalidDecomposition(CreditNetError, ValueError):
    pass


class InfeasibleScore(CreditNetError, ValueError):
    pass


class ExpansionViolated(CreditNetError, ValueError):
    pass


class OddTotal(CreditNetError, ValueError):
    pass


class InvalidParams(CreditNetError, ValueError):
    pass


class PairNotSimulated(CreditNetError, KeyError):
    pass


class ParseError(CreditNetError, ValueError):
    def __init__(self, line, message):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")
