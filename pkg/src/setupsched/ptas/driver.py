"""Binary search wrapping the simplify / band-dp / realize pipeline.

The search walks multiples of a grid unit fine enough that one step costs
less than a factor (1 + eps**2 / (n+K)).  The lower anchor sits strictly
below the trivial lower bound, so a probe that fails is never above the
optimum; the first surviving guess is therefore within one grid step of it,
and the schedule found there is within (1+eps)**10 of optimal overall.
"""

from __future__ import annotations

import math
from fractions import Fraction

from setupsched.errors import Infeasible, InternalInvariantViolation
from setupsched.lpt import lpt_uniform
from setupsched.model import Instance, Kind, Schedule, compute_loads, frac, trivial_bounds
from setupsched.ptas.classify import classify
from setupsched.ptas.dp import DEFAULT_MAX_STATES, dp_relaxed
from setupsched.ptas.params import PtasParams, floor_log2, pow2
from setupsched.ptas.realize import realize
from setupsched.ptas.simplify import simplify, undo_schedule
from setupsched.report import SolveReport


def decide(instance: Instance, eps: Fraction, t: Fraction, max_states: int = DEFAULT_MAX_STATES) -> Schedule:
    """Schedule within (1+eps)**9 of guess ``t``, or raise `Infeasible`.

    Never raises when t is at least the optimal makespan; an `Infeasible`
    outcome is a certificate that the optimum exceeds t.
    """
    params = PtasParams(eps, t)
    i3, record = simplify(instance, params)
    inner = PtasParams(eps, record.t1)
    cls = classify(i3, inner)
    relaxed = dp_relaxed(i3, inner, cls, max_states)
    placed = realize(relaxed, i3, inner)
    return undo_schedule(record, placed)


def ptas_uniform(
    instance: Instance,
    eps,
    max_states: int = DEFAULT_MAX_STATES,
) -> tuple[Schedule, SolveReport]:
    """Makespan within (1+eps)**10 of optimal on identical or uniform machines."""
    assert instance.kind in (Kind.IDENTICAL, Kind.UNIFORM)
    eps = frac(eps)
    PtasParams(eps, Fraction(1))

    if instance.n == 0:
        return Schedule(()), SolveReport(
            solver="ptas-uniform",
            makespan=Fraction(0),
            bound=Fraction(0),
            params={"eps": str(eps)},
        )

    lower, _ = trivial_bounds(instance)
    fallback = lpt_uniform(instance)
    upper = compute_loads(instance, fallback).makespan
    if upper == lower:
        return fallback, SolveReport(
            solver="ptas-uniform",
            makespan=upper,
            bound=lower,
            bound_ratio=Fraction(1),
            params={"eps": str(eps)},
        )

    unit = eps * pow2(floor_log2(eps * lower / (instance.n + instance.num_classes)))
    lo = math.ceil(lower / unit) - 1
    hi = math.ceil(upper / unit)
    best: tuple[int, Schedule] | None = None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        try:
            best = (mid, decide(instance, eps, mid * unit, max_states))
            hi = mid
        except Infeasible:
            lo = mid
    if best is None or best[0] != hi:
        try:
            best = (hi, decide(instance, eps, hi * unit, max_states))
        except Infeasible:
            raise InternalInvariantViolation(
                f"guess {hi * unit} refused although a schedule of makespan {upper} exists"
            )

    schedule = best[1]
    makespan = compute_loads(instance, schedule).makespan
    tstar = hi * unit
    return schedule, SolveReport(
        solver="ptas-uniform",
        makespan=makespan,
        bound=tstar,
        bound_ratio=makespan / tstar,
        params={"eps": str(eps)},
    )
