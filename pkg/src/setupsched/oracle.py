"""Exact optimal makespan by branch-and-bound, for desk-scale instances.

Every ratio claim in the test suite bottoms out here, so the search is kept
deliberately simple: scale all costs to a common integer grid, depth-first
enumerate assignments in nonincreasing size order with incumbent pruning,
then recover the lexicographically smallest optimal assignment by fixing one
job at a time in id order.

The inner loops live in `setupsched._kernel` (compiled) when the extension
built, with `setupsched._kernel_py` as an exact big-int fallback; both share
one calling convention.  `reference_makespan` is the unpruned cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from setupsched import _kernel_py
from setupsched.errors import BudgetExceeded, Infeasible, InternalInvariantViolation
from setupsched.model import INF, Instance, Schedule, compute_loads, is_finite, trivial_bounds

try:
    from setupsched import _kernel as _compiled
except ImportError:  # extension not built; pure Python only
    _compiled = None

# compiled kernel works in int64; leave generous headroom for summed loads
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class OracleLimits:
    """Enumeration budget; m^n grows fast, so the defaults are deliberate."""

    max_jobs: int = 10
    max_machines: int = 4


def kernel_name() -> str:
    """Which search backend imports resolve to: "compiled" or "python"."""
    return "python" if _compiled is None else "compiled"


def integer_costs(instance: Instance) -> tuple[list[list[int]], list[list[int]], list[int], int]:
    """Rescale all processing and setup times onto one integer time grid.

    Returns (costs, setups, cls, scale): ``costs[j][i]`` and ``setups[k][i]``
    are integers with -1 for infinity, and true time = integer / scale.
    """
    n, m = instance.n, instance.m
    proc = [[instance.proc(i, j) for i in range(m)] for j in range(n)]
    setup = [[instance.setup(i, k) for i in range(m)] for k in range(instance.num_classes)]
    denoms = [x.denominator for row in proc + setup for x in row if is_finite(x)]
    scale = lcm(*denoms) if denoms else 1
    costs = [[int(x * scale) if is_finite(x) else -1 for x in row] for row in proc]
    setups = [[int(x * scale) if is_finite(x) else -1 for x in row] for row in setup]
    cls = [job.cls for job in instance.jobs]
    return costs, setups, cls, scale


def _search_order(instance: Instance, costs) -> list[int]:
    # big jobs first makes the incumbent prune bite early
    def key(j):
        finite = [c for c in costs[j] if c >= 0]
        return (-max(finite, default=0), j)

    return sorted(range(instance.n), key=key)


def _backend(costs, setups):
    if _compiled is None:
        return _kernel_py
    reach = sum(max(row) for row in costs if max(row) > 0)
    reach += sum(max(row) for row in setups if row and max(row) > 0)
    return _compiled if reach < _INT64_SAFE else _kernel_py


def exact_makespan(
    instance: Instance, limits: OracleLimits = OracleLimits()
) -> tuple[Fraction, Schedule]:
    """Optimal makespan and the lexicographically smallest optimal schedule."""
    n, m = instance.n, instance.m
    if n > limits.max_jobs or m > limits.max_machines:
        raise BudgetExceeded(f"{n} jobs on {m} machines exceeds {limits}")
    if n == 0:
        return Fraction(0), Schedule(())

    _, upper = trivial_bounds(instance)  # raises Infeasible when hopeless
    costs, setups, cls, scale = integer_costs(instance)
    order = _search_order(instance, costs)
    kern = _backend(costs, setups)

    upper_int = int(upper * scale)
    opt = kern.best_value(costs, setups, cls, order, m, upper_int + 1)
    if opt < 0:
        raise InternalInvariantViolation("seeded search found no schedule at its own upper bound")

    # fix jobs in id order onto the first machine that still allows value opt
    loads = [0] * m
    counts = [[0] * instance.num_classes for _ in range(m)]
    assignment: list[int] = []
    for j in range(n):
        remaining = [x for x in order if x > j]
        k = cls[j]
        placed = False
        for i in range(m):
            c = costs[j][i]
            if c < 0:
                continue
            extra = 0
            if counts[i][k] == 0:
                extra = setups[k][i]
                if extra < 0:
                    continue
            if loads[i] + c + extra > opt:
                continue
            loads[i] += c + extra
            counts[i][k] += 1
            if kern.can_complete(costs, setups, cls, remaining, m, loads, counts, opt):
                assignment.append(i)
                placed = True
                break
            counts[i][k] -= 1
            loads[i] -= c + extra
        if not placed:
            raise InternalInvariantViolation(f"no completion for job {j} at the optimal value")

    return Fraction(opt, scale), Schedule(tuple(assignment))


def reference_makespan(
    instance: Instance, limits: OracleLimits = OracleLimits(max_jobs=8)
) -> tuple[Fraction, Schedule]:
    """Unpruned lexicographic sweep over all m^n assignments.

    Strict-improvement tracking returns the lexicographically smallest
    optimum directly; exists to cross-check `exact_makespan`, so it shares
    none of its machinery.
    """
    n, m = instance.n, instance.m
    if n > limits.max_jobs or m > limits.max_machines:
        raise BudgetExceeded(f"{n} jobs on {m} machines exceeds {limits}")
    best: tuple[Fraction, Schedule] | None = None
    for combo in itertools.product(range(m), repeat=n):
        sched = Schedule(combo)
        span = compute_loads(instance, sched).makespan
        if span is INF:
            continue
        if best is None or span < best[0]:
            best = (span, sched)
    if best is None:
        raise Infeasible("no assignment has finite makespan")
    return best
