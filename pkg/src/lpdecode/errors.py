class LpDecodeError(Exception):
    """Base class; the CLI maps these to exit code 2 unless noted."""


class NotPrime(LpDecodeError, ValueError):
    def __init__(self, q):
        super().__init__(f"modulus {q} is not prime")
        self.q = q


class DivideByZero(LpDecodeError, ZeroDivisionError):
    pass


class FieldMismatch(LpDecodeError, ValueError):
    pass


class DegreeTooLarge(LpDecodeError, ValueError):
    pass


class LengthTooLarge(LpDecodeError, ValueError):
    pass


class InvalidDimension(LpDecodeError, ValueError):
    pass


class ToleranceUnreachable(LpDecodeError, ArithmeticError):
    pass


class OutOfDomain(LpDecodeError, ValueError):
    pass


class UnsupportedExponent(LpDecodeError, ValueError):
    pass


class ZeroWeightVector(LpDecodeError, ValueError):
    pass


class EmptySubset(LpDecodeError, ValueError):
    pass


class AllZero(LpDecodeError, ValueError):
    pass


class NullspaceEmpty(LpDecodeError, ArithmeticError):
    pass


class BudgetExceeded(LpDecodeError, RuntimeError):
    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


class RateTooHigh(LpDecodeError, ValueError):
    pass


class MarginNonpositive(LpDecodeError, ValueError):
    pass


class BudgetInfeasible(LpDecodeError, ValueError):
    pass
