"""Exception hierarchy shared by every module."""


class StrongCouplingError(Exception):
    """Base class for all errors raised by this package."""


class NonUnitLeadingCoefficient(StrongCouplingError, ValueError):
    pass


class ZeroBase(StrongCouplingError, ValueError):
    pass


class FormatError(StrongCouplingError, ValueError):
    """Malformed coefficient-table or data file.

    ``line`` and ``field`` locate the offending entry when known.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class DegenerateCoefficient(StrongCouplingError, ArithmeticError):
    pass


class NonPositiveK0(StrongCouplingError, ValueError):
    pass


class NoRoot(StrongCouplingError, ArithmeticError):
    pass


class SingularFormula(StrongCouplingError, ZeroDivisionError):
    pass


class NegativeRadicand(StrongCouplingError, ValueError):
    pass


class InsufficientData(StrongCouplingError, ValueError):
    pass


class ZeroCoefficient(StrongCouplingError, ArithmeticError):
    pass


class AmbiguousPhase(StrongCouplingError, ValueError):
    pass


class NonPositiveB1(StrongCouplingError, ValueError):
    pass


class NonPositiveEpsilon(StrongCouplingError, ValueError):
    pass


class NoConvergence(StrongCouplingError, ArithmeticError):
    pass


class DomainTooShort(StrongCouplingError, ValueError):
    pass
