"""Exception hierarchy shared by all hornfall modules."""


class HornfallError(Exception):
    """Base class for every error raised by this package."""


class HornError(HornfallError, ValueError):
    """Invalid clause or formula."""


class DuplicateVariable(HornError):
    pass


class HornViolation(HornError):
    """More than one positive literal requested in a clause."""


class OutOfRange(HornError):
    pass


class DensityTooHigh(HornError):
    """round(d1 * n) exceeds the n - 1 variables available for positive units."""


class NTooSmall(HornError):
    pass


class ParseError(HornfallError, ValueError):
    """Malformed input text.  Carries a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NonHornClause(ParseError):
    pass


class DomainError(HornfallError, ValueError):
    pass


class NoRootFound(HornfallError, ArithmeticError):
    pass


class ToleranceTooSmall(HornfallError, ValueError):
    pass


class StepFailure(HornfallError, ArithmeticError):
    """The ODE integrator could not advance (typically near the t -> 1 pole)."""


class ConfigError(HornfallError, ValueError):
    pass
