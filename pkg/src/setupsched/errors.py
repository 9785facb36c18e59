"""Exceptions shared across solvers."""


class Infeasible(Exception):
    """No schedule with finite makespan exists (or none within the probed bound)."""


class BudgetExceeded(Exception):
    """The instance is larger than the configured enumeration budget."""


class InternalInvariantViolation(Exception):
    """A guaranteed structural property failed; indicates a bug, not bad input."""


class NotClassUniform(Exception):
    """Instance lacks the class-uniform structure the algorithm requires."""


class NotExtreme(Exception):
    """LP solution is not a vertex; the rounding graph would not be a pseudo-forest."""


class DegenerateLp(Exception):
    """LP solution violates a structural property feasible solutions guarantee."""


class CertificationFailed(Exception):
    """Exhaustive search contradicts a claimed cover size; the fixture is mislabeled."""



class ParseError(Exception):
    """An instance file could not be read.

    ``line`` is set for malformed JSON, ``field`` (a dotted path like
    ``jobs[3].size``) for well-formed documents with bad content.
    """

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if field is not None:
            parts.append(field)
        parts.append(message)
        super().__init__(": ".join(parts))


class ValidationError(Exception):
    """A parsed instance failed structural validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))
