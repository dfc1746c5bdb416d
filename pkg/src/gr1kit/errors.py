"""Exception types shared across the toolkit."""


class SpecError(Exception):
    """Base class for everything raised while reading or checking a spec."""


class SpecSyntaxError(SpecError):
    """Malformed spec text.  Carries the 1-based line and column."""

    def __init__(self, line, col, message):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"line {line}, col {col}: {message}")


class ScopeError(SpecError):
    """A variable reference or next-marker appears where it is not allowed."""


class DuplicateVarError(SpecError):
    """The same variable name is declared twice."""


class MissingNextValuation(SpecError):
    """A next-marked reference was evaluated without a next-step valuation."""


class StateSpaceLimitExceeded(SpecError):
    """Reachable-state enumeration went past the configured cap."""


class NotEnvironmentWinning(SpecError):
    """Counter-strategy extraction was asked for on a realizable game."""
