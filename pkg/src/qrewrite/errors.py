"""Exception hierarchy shared across the package."""


class QrewriteError(Exception):
    """Base class for all domain errors raised by this package."""


class CircuitError(QrewriteError):
    """A circuit or gate violates a structural invariant."""


class ParseError(QrewriteError):
    """CQC source text is malformed. Carries 1-based line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SimulationError(QrewriteError):
    """A simulation backend rejected the circuit (size, gate set, ...)."""


class RewriteError(QrewriteError):
    """A rewrite could not be applied."""


class StaleMatchError(RewriteError):
    """The circuit no longer contains the matched pattern."""


class BarrierViolationError(RewriteError):
    """The match crosses a barrier while the policy is opaque."""


class SeverPreconditionError(RewriteError):
    """Ancilla severing refused: the wire is not provably in a control-basis
    eigenstate for every gate it participates in."""


class RewriteBudgetError(RewriteError):
    """Normalization exceeded its application budget (likely a
    non-terminating rule configuration)."""
