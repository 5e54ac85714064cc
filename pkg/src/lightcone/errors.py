"""Exception hierarchy shared by all modules."""


class LightconeError(Exception):
    """Base class for every error raised by this package."""


class NonConvergent(LightconeError):
    pass


class SingularSample(LightconeError):
    pass


class SingularPath(LightconeError):
    pass


class ZeroParameter(LightconeError):
    pass


class ZeroGenerator(LightconeError):
    pass


class DegenerateFrame(LightconeError):
    pass


class DegeneratePoint(LightconeError):
    pass


class InvalidGram(LightconeError):
    """A geodesic spec violates one of its required pairings."""

    def __init__(self, violations):
        self.violations = dict(violations)
        detail = ", ".join(f"<{k}>={v:.3e}" for k, v in self.violations.items())
        super().__init__(f"Gram relations violated: {detail}")


class NotUnitSpeed(LightconeError):
    pass


class EmptyIntersection(LightconeError):
    pass


class UndefinedData(LightconeError):
    pass


class ZeroLambda(LightconeError):
    pass


class BadParameter(LightconeError):
    pass


class PoleAtMinusHalf(LightconeError):
    pass


class NonUnimodular(LightconeError):
    pass


class FitResidualExceeded(LightconeError):
    pass


class AmbiguousBranch(LightconeError):
    pass


class UnknownSuite(LightconeError):
    pass


class ParseError(LightconeError):
    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class DegenerateCell(LightconeError):
    pass
