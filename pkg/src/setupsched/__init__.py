"""Scheduling with setup classes: exact solving, approximation, and rounding."""

from setupsched.model import (
    INF,
    Cost,
    Instance,
    Job,
    Kind,
    Loads,
    Schedule,
    SetupClass,
    Violation,
    compute_loads,
    frac,
    is_finite,
    trivial_bounds,
    validate,
)

__all__ = [
    "INF",
    "Cost",
    "Instance",
    "Job",
    "Kind",
    "Loads",
    "Schedule",
    "SetupClass",
    "Violation",
    "compute_loads",
    "frac",
    "is_finite",
    "trivial_bounds",
    "validate",
]

__version__ = "0.1.0"
