"""Randomized rounding of the job-level relaxation for unrelated machines.

Each iteration opens setups y_ik with probability y*, then assigns the
class's jobs with conditional probability x*/y*; a job keeps its first
successful assignment.  After all iterations the leftover jobs fall back to
their cheapest machine.  Everything is driven by one explicit seed: draws
are made in a fixed (iteration, machine, class, job) order whether or not
they can still change the outcome, so the random stream never depends on
earlier outcomes and identical seeds give identical schedules.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log2

from setupsched.errors import DegenerateLp, Infeasible
from setupsched.lp import (
    LpSolution,
    LpStatus,
    build_lp_um,
    dual_search,
    search_grid,
    solve_lp,
)
from setupsched.model import Instance, Schedule, compute_loads, is_finite, trivial_bounds
from setupsched.report import SolveReport

_TWO64 = 1 << 64


def iteration_count(n: int, c: int) -> int:
    """ceil(c * log2 n); zero when a single job (or none) makes log2 n <= 0."""
    if n <= 1:
        return 0
    return ceil(c * log2(n))


def _bernoulli(rng: random.Random, q: Fraction) -> bool:
    # compare a uniform 64-bit draw against floor(q * 2^64); the draw is
    # consumed even for q = 0 so the stream shape is outcome-independent
    return rng.getrandbits(64) < (q.numerator * _TWO64) // q.denominator


@dataclass(frozen=True)
class RoundingStats:
    """Trace of one rounding run.

    ``newly_assigned`` has one entry per iteration; ``assigned_iteration``
    holds, per job, the 1-based iteration of its first assignment (0 for the
    fallback).  Duplicate counts are raw: every success that was discarded
    because the job (or the machine's setup) was already taken.
    """

    iterations: int
    newly_assigned: tuple[int, ...]
    fallback_used: bool
    seed: int
    loads: tuple[Fraction, ...]
    duplicate_assignments: int
    duplicate_setups: int
    assigned_iteration: tuple[int, ...]


def randomized_round(
    solution: LpSolution, instance: Instance, T: Fraction, c: int, seed: int
) -> tuple[Schedule, RoundingStats]:
    """Round a feasible fractional point at bound T into a full schedule."""
    lp = build_lp_um(instance, T)
    xstar = solution.by_key(lp, "assign")
    ystar = solution.by_key(lp, "setup")
    for (i, j), value in xstar.items():
        if value > 0 and not ystar.get((i, instance.jobs[j].cls)):
            raise DegenerateLp(
                f"x[{i},{j}] = {value} with no setup mass on machine {i}"
            )

    m, n = instance.m, instance.n
    jobs_of = [
        [job.id for job in instance.jobs if job.cls == k]
        for k in range(instance.num_classes)
    ]
    rng = random.Random(seed)
    iterations = iteration_count(n, c)
    assigned = [-1] * n
    assigned_iteration = [0] * n
    newly = []
    duplicate_assignments = 0
    duplicate_setups = 0
    setups_opened: set[tuple[int, int]] = set()
    for h in range(1, iterations + 1):
        count = 0
        for i in range(m):
            for k in range(instance.num_classes):
                y = ystar.get((i, k), Fraction(0))
                if not _bernoulli(rng, y):
                    continue
                if (i, k) in setups_opened:
                    duplicate_setups += 1
                else:
                    setups_opened.add((i, k))
                for j in jobs_of[k]:
                    x = xstar.get((i, j), Fraction(0))
                    if not _bernoulli(rng, x / y):
                        continue
                    if assigned[j] == -1:
                        assigned[j] = i
                        assigned_iteration[j] = h
                        count += 1
                    else:
                        duplicate_assignments += 1
        newly.append(count)

    fallback_used = any(a == -1 for a in assigned)
    for j in range(n):
        if assigned[j] != -1:
            continue
        k = instance.jobs[j].cls
        hosts = [
            i
            for i in range(m)
            if is_finite(instance.proc(i, j)) and is_finite(instance.setup(i, k))
        ]
        assigned[j] = min(hosts, key=lambda i: (instance.proc(i, j), i))

    schedule = Schedule(tuple(assigned))
    loads = compute_loads(instance, schedule)
    stats = RoundingStats(
        iterations=iterations,
        newly_assigned=tuple(newly),
        fallback_used=fallback_used,
        seed=seed,
        loads=loads.per_machine,
        duplicate_assignments=duplicate_assignments,
        duplicate_setups=duplicate_setups,
        assigned_iteration=tuple(assigned_iteration),
    )
    return schedule, stats


def approx_unrelated(
    instance: Instance, c: int = 3, seed: int = 0
) -> tuple[Schedule, SolveReport]:
    """Binary search for the smallest LP-feasible bound, then round there."""
    start = time.perf_counter()
    lower, upper = trivial_bounds(instance)

    def decider(T: Fraction):
        lp = build_lp_um(instance, T)
        sol = solve_lp(lp)
        if sol.status is LpStatus.INFEASIBLE:
            raise Infeasible(f"no fractional schedule at bound {T}")
        return T, randomized_round(sol, instance, T, c, seed)

    tstar, (schedule, stats) = dual_search(
        decider, lower, upper, search_grid(instance)
    )
    makespan = compute_loads(instance, schedule).makespan
    report = SolveReport(
        solver="round-unrelated",
        makespan=makespan,
        bound=tstar,
        bound_ratio=makespan / tstar if tstar else Fraction(1),
        ms=(time.perf_counter() - start) * 1000.0,
        seed=seed,
        params={"c": str(c)},
    )
    return schedule, report
