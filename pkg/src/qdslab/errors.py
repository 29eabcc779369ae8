"""Exception types shared across the package."""


class AlgebraMismatch(ValueError):
    """Operands live on different algebras."""


class CapExceeded(ValueError):
    """A dense object would exceed the configured dimension cap."""


class HypothesisViolation(ValueError):
    """A standing hypothesis of a check does not hold (e.g. delta(1) != 0).

    ``report`` optionally carries whatever partial results were computed.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotUnitalError(HypothesisViolation):
    pass


class ResolventError(ArithmeticError):
    """(I - alpha*delta) is singular or too ill-conditioned to invert."""


class UnsupportedStructure(ValueError):
    pass


class RankAmbiguityError(ValueError):
    """Gram eigenvalues sit too close to the rank threshold to decide the rank."""


class NotImplementableError(ValueError):
    """No implementing operator of the requested form reproduces the generator.

    This is a finding about the generator rather than a numerical failure; the
    best least-squares fit is kept on ``operator``.
    """

    def __init__(self, message, operator=None):
        super().__init__(message)
        self.operator = operator


class ScenarioError(ValueError):
    """Invalid scenario input. ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
