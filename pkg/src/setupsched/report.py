"""Result row shared by the solver drivers and the command-line harness."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


@dataclass(frozen=True)
class SolveReport:
    """One solver run: what ran, what it produced, how it compares.

    ``bound`` is the solver's own reference value (the binary-search bound T*
    for the LP-based solvers, the proven-ratio denominator otherwise) and
    ``bound_ratio`` the makespan divided by it.  ``oracle_ratio`` is filled in
    by the harness when an exact value is available and must then be >= 1.
    """

    solver: str
    makespan: Fraction
    instance_id: str = ""
    bound: Fraction | None = None
    bound_ratio: Fraction | None = None
    oracle_ratio: Fraction | None = None
    ms: float = 0.0
    seed: int | None = None
    params: dict[str, str] = field(default_factory=dict)
