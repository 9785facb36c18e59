"""Accuracy and guess parameters shared by the approximation-scheme stages."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from setupsched.model import frac


@dataclass(frozen=True)
class PtasParams:
    """Accuracy ``eps`` together with the makespan guess ``t``.

    ``eps`` must be the reciprocal of an integer at least 2 so that the
    rounding grids built from it land on exact binary fractions.  ``delta``
    and ``gamma`` are the derived coarser thresholds used to separate core
    from fringe jobs and to band machine speeds.
    """

    eps: Fraction
    t: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", frac(self.eps))
        object.__setattr__(self, "t", frac(self.t))
        if self.eps.numerator != 1 or self.eps.denominator < 2:
            raise ValueError(f"eps must be 1/q for an integer q >= 2, got {self.eps}")
        if self.t <= 0:
            raise ValueError(f"guess t must be positive, got {self.t}")

    @property
    def delta(self) -> Fraction:
        return self.eps * self.eps

    @property
    def gamma(self) -> Fraction:
        return self.eps ** 3

    @property
    def t1(self) -> Fraction:
        """Bound for the simplified instance: five rounding losses on ``t``."""
        return (1 + self.eps) ** 5 * self.t


def floor_log2(x: Fraction) -> int:
    """Largest integer e with 2**e <= x, computed exactly."""
    if x <= 0:
        raise ValueError(f"floor_log2 needs a positive argument, got {x}")
    a, b = x.numerator, x.denominator
    e = a.bit_length() - b.bit_length()
    if e >= 0:
        return e if a >= (b << e) else e - 1
    return e if (a << -e) >= b else e - 1


def pow2(e: int) -> Fraction:
    return Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)
