"""Pure-Python assignment search over integer cost matrices.

The compiled module `setupsched._kernel` implements the same two functions
with int64 arithmetic; this twin works with unbounded Python ints and is the
import-time fallback.  Both operate on pre-scaled integer costs where -1
means "infinite" and loads across machines share one time unit.

A machine pays ``setups[k][i]`` the first time a job of class k lands on it;
per-machine class counts make the setup charge reversible on backtrack.
"""

from __future__ import annotations


def best_value(costs, setups, cls, order, m, seed):
    """Smallest achievable maximum load strictly below ``seed``.

    ``order`` lists job ids, largest first; ``costs[j][i]`` / ``setups[k][i]``
    are scaled integers or -1 for infinity.  Returns -1 when no assignment
    beats ``seed``.
    """
    n = len(order)
    loads = [0] * m
    counts = [[0] * len(setups) for _ in range(m)]
    best = seed

    def dfs(d, running_max):
        nonlocal best
        if d == n:
            best = running_max
            return
        j = order[d]
        row = costs[j]
        k = cls[j]
        srow = setups[k]
        for i in range(m):
            c = row[i]
            if c < 0:
                continue
            extra = 0
            if counts[i][k] == 0:
                s = srow[i]
                if s < 0:
                    continue
                extra = s
            new_load = loads[i] + c + extra
            if new_load >= best:
                continue
            loads[i] = new_load
            counts[i][k] += 1
            dfs(d + 1, new_load if new_load > running_max else running_max)
            counts[i][k] -= 1
            loads[i] = new_load - c - extra

    dfs(0, 0)
    return -1 if best == seed else best


def can_complete(costs, setups, cls, order, m, loads, counts, bound):
    """True when the remaining jobs fit with every machine load ≤ bound.

    ``loads`` and ``counts`` describe an already-fixed prefix and are left
    unchanged.
    """
    n = len(order)
    loads = list(loads)
    counts = [list(row) for row in counts]

    def dfs(d):
        if d == n:
            return True
        j = order[d]
        row = costs[j]
        k = cls[j]
        srow = setups[k]
        for i in range(m):
            c = row[i]
            if c < 0:
                continue
            extra = 0
            if counts[i][k] == 0:
                s = srow[i]
                if s < 0:
                    continue
                extra = s
            new_load = loads[i] + c + extra
            if new_load > bound:
                continue
            loads[i] = new_load
            counts[i][k] += 1
            if dfs(d + 1):
                return True
            counts[i][k] -= 1
            loads[i] = new_load - c - extra
        return False

    return dfs(0)
