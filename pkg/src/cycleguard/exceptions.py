"""Exception hierarchy shared by all modules."""


class CycleguardError(Exception):
    """Base class for all library errors."""


class ParseError(CycleguardError, ValueError):
    """Syntax error in an expression, carrying the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class EvaluationDomainError(CycleguardError, ArithmeticError):
    """Expression evaluated outside the domain of one of its sub-expressions."""


class NotPolynomialError(CycleguardError, ValueError):
    pass


class KappaNotPositiveError(CycleguardError, ValueError):
    pass


class OutOfDomainError(CycleguardError, ValueError):
    pass


class AngularSpeedZeroError(CycleguardError, ArithmeticError):
    pass


class DecompositionRequiredError(CycleguardError, ValueError):
    pass


class InvalidSystemError(CycleguardError, ValueError):
    pass


class GNotAdmissibleError(CycleguardError, ValueError):
    """g violates x*g(x) > 0 off the origin or g'(0) > 0."""


class OutOfRangeError(CycleguardError, ValueError):
    pass


class ConstructionFailsError(CycleguardError):
    def __init__(self, message, point=None, value=None):
        super().__init__(message)
        self.point = point
        self.value = value


class IntegrationError(CycleguardError):
    """Integration stopped early; ``orbit`` holds what was computed so far."""

    def __init__(self, message, state=None, orbit=None):
        super().__init__(message)
        self.state = state
        self.orbit = orbit


class BlowUpError(IntegrationError):
    pass


class DomainExitError(IntegrationError):
    pass


class NoReturnError(CycleguardError):
    pass


class AngularSpeedZeroOnCycleError(AngularSpeedZeroError):
    pass


class CyclesNotNestedError(CycleguardError, ValueError):
    pass
