"""Exception hierarchy shared by every layer of the engine."""


class MFError(Exception):
    """Base class for all engine errors."""


# scalars
class NotDivisible(MFError):
    pass


class PrecisionExhausted(MFError):
    pass


class FactorialNotInvertible(MFError):
    pass


# rings
class PolySyntaxError(MFError):
    """Malformed polynomial text; ``pos`` is the 0-based offset of the problem."""

    def __init__(self, message, pos=None, text=None):
        self.pos = pos
        self.text = text
        if pos is not None:
            message = f"{message} (at column {pos + 1})"
        super().__init__(message)


class NegativeExponentOnUninverted(MFError):
    pass


class NonInvertibleImage(MFError):
    pass


class ZeroElement(MFError):
    pass


class NotAUnit(MFError):
    pass


class DenominatorCapExceeded(MFError):
    pass


class IncompatibleRings(MFError):
    pass


# filtered de Rham data
class InvalidInput(MFError):
    pass


class InvalidLifting(MFError):
    pass


class WeightOverflow(MFError):
    pass


class PrecisionTooLow(MFError):
    pass


# submodules
class AmbientMismatch(MFError):
    pass


class UnsupportedDimension(MFError):
    pass


# association
class StrongDivisibilityFailure(MFError):
    pass


class ThetaUnstable(MFError):
    pass


class HorizontalityViolation(MFError):
    pass


class GluingMismatch(MFError):
    def __init__(self, message, forms=None):
        super().__init__(message)
        self.forms = forms


# descent
class NotPCurvatureZero(MFError):
    pass


class DegreeBoundExceeded(MFError):
    pass


class NotHorizontal(MFError):
    pass


class DescentFailure(MFError):
    pass


class NilpotencyTooDeep(MFError):
    pass


class MissingLifting(MFError):
    pass
