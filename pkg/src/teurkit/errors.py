"""Exception hierarchy.

Everything raised deliberately by teurkit derives from :class:`TeurkitError`.
:class:`ConfigError` covers bad user input; :class:`NumericalError` covers
inputs that are well formed but numerically invalid (the CLI maps these to
different exit codes).
"""


class TeurkitError(Exception):
    pass


class ConfigError(TeurkitError, ValueError):
    pass


class UnknownModel(ConfigError):
    pass


class NumericalError(TeurkitError, ArithmeticError):
    pass


class NonHermitianInput(NumericalError):
    pass


class NotPSD(NumericalError):
    pass


class SingularMatrix(NumericalError):
    pass


class ModelEvaluationError(NumericalError):
    pass


class TruncationError(NumericalError):
    pass


class SupportMismatch(NumericalError):
    pass


class SingularQfim(NumericalError):
    pass


class ZeroProbabilityDerivative(NumericalError):
    pass


class NegativeDeterminant(NumericalError):
    pass


class NonDiagonalQfim(NumericalError):
    pass


class RegretDomainError(NumericalError):
    pass


class NonConcentric(NumericalError):
    pass
