"""Exception hierarchy shared by all rfr_kit modules.

Two families matter to callers (and to the CLI exit codes): `InputError`
covers anything wrong with user-supplied values or files, `NumericalError`
covers failures that arise during computation on inputs that passed
validation.
"""


class RfrKitError(Exception):
    """Base class for all rfr_kit errors."""


class InputError(RfrKitError, ValueError):
    """Invalid user input: bad values, malformed files, broken invariants."""


class NumericalError(RfrKitError, ArithmeticError):
    """Computation failed on otherwise valid input."""


# rate composition
class AllZeroWeights(InputError):
    pass


class NegativeWeight(InputError):
    pass


class MissingSource(InputError):
    pass


class DuplicateSource(InputError):
    pass


class InvalidCategoryMap(InputError):
    pass


class EmptyInput(InputError):
    pass


# source estimators
class InvalidBond(InputError):
    pass


class NoConvergence(NumericalError):
    pass


class InvalidQuote(InputError):
    pass


class LengthMismatch(InputError):
    pass


class ZeroMarketVariance(InputError):
    pass


class InvalidLeg(InputError):
    pass


# pricing
class InvalidOption(InputError):
    pass


# portfolio engine
class InvalidModel(InputError):
    pass


class SingularCovariance(InputError):
    pass


class DegenerateTangency(NumericalError):
    pass


# simulator
class InvalidConfig(InputError):
    pass


# ingestion / reporting
class ParseError(InputError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateRow(ParseError):
    pass


class NonPositivePrice(ParseError):
    pass


class EmptyCountry(ParseError):
    pass


class IoError(RfrKitError, OSError):
    pass
