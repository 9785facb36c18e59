"""Pseudo-forest rounding of the class-level relaxation.

The strictly fractional entries of an extreme point span a bipartite
(machine, class) graph whose components are pseudotrees: at most one cycle
each.  Pruning that graph leaves every machine with at most one kept edge
and every class with at most one dropped machine; the dropped machine's
mass moves to a designated receiver, and the class's jobs are then packed
greedily into the reserved slots, receiver last.  This yields makespan
<= 2T under class-uniform eligibility (unit speeds) and <= 3T for
unrelated machines whose classes have machine-uniform job times.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction

from setupsched.errors import Infeasible, InternalInvariantViolation, NotExtreme
from setupsched.lp import (
    LpSolution,
    LpStatus,
    build_lp_ra,
    class_workloads,
    dual_search,
    search_grid,
    solve_lp,
)
from setupsched.model import Instance, Schedule, compute_loads, trivial_bounds
from setupsched.report import SolveReport

ZERO = Fraction(0)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class SolutionGraph:
    """Support graph of a class-level solution.

    ``fractional`` holds entries with 0 < value < 1 keyed (machine, class);
    a class sitting entirely on one machine is recorded in ``integral`` and
    stays outside the graph.  prune_edges fills the kept edge set
    ``pruned``, the receiver ``i_plus`` and dropped machine ``i_minus`` per
    class, and the host ordering ``hosts`` (machine ids ascending, receiver
    moved last).
    """

    fractional: dict[tuple[int, int], Fraction]
    integral: dict[int, int]
    pruned: frozenset[tuple[int, int]] | None = None
    i_plus: dict[int, int] | None = None
    i_minus: dict[int, int] | None = None
    hosts: dict[int, tuple[int, ...]] | None = None


def solution_graph(xbar: dict[tuple[int, int], Fraction]) -> SolutionGraph:
    fractional = {key: value for key, value in xbar.items() if 0 < value < 1}
    integral = {k: i for (i, k), value in xbar.items() if value == 1}
    return SolutionGraph(fractional, integral)


def _component(adj, start):
    comp = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for other in adj[node]:
            if other not in comp:
                comp.add(other)
                frontier.append(other)
    return comp


def _cycle_nodes(adj, comp):
    # peel leaves until only the cycle remains
    degree = {v: len(adj[v]) for v in comp}
    alive = set(comp)
    leaves = [v for v in comp if degree[v] <= 1]
    while leaves:
        v = leaves.pop()
        alive.discard(v)
        for other in adj[v]:
            if other in alive:
                degree[other] -= 1
                if degree[other] == 1:
                    leaves.append(other)
    return alive


def _alternate_cycle_edges(adj, cycle):
    """Every second cycle edge, starting with the one leaving the lowest
    class id toward its lowest-id machine neighbor."""
    lowest = min(k for side, k in cycle if side == "c")
    v = ("c", lowest)
    first = ("m", min(i for side, i in adj[v] & cycle))
    order = [(v, first)]
    prev, cur = v, first
    while cur != v:
        nxt = next(w for w in adj[cur] & cycle if w != prev)
        order.append((cur, nxt))
        prev, cur = cur, nxt
    removed = set()
    for a, b in order[::2]:
        (_, i), (_, k) = (a, b) if a[0] == "m" else (b, a)
        removed.add((i, k))
    return removed


def prune_edges(graph: SolutionGraph) -> SolutionGraph:
    """Keep the edges that survive cycle-breaking and rooting.

    Each component must be a pseudotree (edge count at most node count),
    otherwise the solution was not an extreme point and NotExtreme is
    raised.  Afterwards every machine carries at most one kept edge and
    every class lost at most one positive machine (both asserted).
    """
    edges = sorted(graph.fractional)
    adj: dict[tuple[str, int], set] = {}
    for i, k in edges:
        adj.setdefault(("m", i), set()).add(("c", k))
        adj.setdefault(("c", k), set()).add(("m", i))

    kept: set[tuple[int, int]] = set()
    seen: set[tuple[str, int]] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        comp = _component(adj, start)
        seen |= comp
        comp_edges = [(i, k) for i, k in edges if ("m", i) in comp]
        if len(comp_edges) > len(comp):
            raise NotExtreme(
                f"{len(comp_edges)} fractional entries across {len(comp)} nodes"
            )
        if len(comp_edges) == len(comp):
            cycle = _cycle_nodes(adj, comp)
            removed = _alternate_cycle_edges(adj, cycle)
            roots = sorted(k for side, k in cycle if side == "c")
        else:
            removed = set()
            roots = [min(k for side, k in comp if side == "c")]
        # orient the leftover forest away from the roots; an edge survives
        # when the class end is the parent
        parent: dict[tuple[str, int], tuple[str, int]] = {}
        visited: set[tuple[str, int]] = set()
        for root in roots:
            node = ("c", root)
            if node in visited:
                raise InternalInvariantViolation("two roots share a tree")
            visited.add(node)
            frontier = [node]
            while frontier:
                cur = frontier.pop()
                for other in adj[cur]:
                    edge = (other[1], cur[1]) if cur[0] == "c" else (cur[1], other[1])
                    if edge in removed or other in visited:
                        continue
                    visited.add(other)
                    parent[other] = cur
                    frontier.append(other)
        if visited != comp:
            raise InternalInvariantViolation("forest not covered by its roots")
        for i, k in comp_edges:
            if (i, k) not in removed and parent.get(("m", i)) == ("c", k):
                kept.add((i, k))

    classes = sorted({k for _, k in graph.fractional})
    per_machine: dict[int, int] = {}
    for i, _ in kept:
        per_machine[i] = per_machine.get(i, 0) + 1
    assert all(count <= 1 for count in per_machine.values())
    i_plus: dict[int, int] = {}
    i_minus: dict[int, int] = {}
    hosts: dict[int, tuple[int, ...]] = {}
    for k in classes:
        mine = sorted(i for i, k2 in graph.fractional if k2 == k)
        kept_mine = [i for i in mine if (i, k) in kept]
        dropped = [i for i in mine if (i, k) not in kept]
        assert len(dropped) <= 1 and kept_mine
        i_plus[k] = kept_mine[0]
        if dropped:
            i_minus[k] = dropped[0]
        hosts[k] = tuple(kept_mine[1:] + kept_mine[:1])
    return replace(
        graph,
        pruned=frozenset(kept),
        i_plus=i_plus,
        i_minus=i_minus,
        hosts=hosts,
    )


def _greedy_fill(assignment, job_ids, machines, slots, proc):
    # place jobs in id order; advance when the current slot is full, but the
    # last machine absorbs whatever remains
    at = 0
    filled = ZERO
    for j in job_ids:
        while at < len(machines) - 1 and filled >= slots[at]:
            at += 1
            filled = ZERO
        assignment[j] = machines[at]
        filled += proc(machines[at], j)


def ra_round(solution: LpSolution, instance: Instance, T: Fraction) -> Schedule:
    """Integral schedule from a class-level extreme point, class-uniform
    eligibility: the dropped machine's mass joins the receiver, then jobs
    fill the reserved slots."""
    lp = build_lp_ra(instance, T)
    graph = prune_edges(solution_graph(solution.by_key(lp, "classfrac")))
    assignment = [-1] * instance.n
    for k in sorted({job.cls for job in instance.jobs}):
        job_ids = [job.id for job in instance.jobs if job.cls == k]
        if k in graph.integral:
            for j in job_ids:
                assignment[j] = graph.integral[k]
            continue
        machines = graph.hosts[k]
        mass = {i: graph.fractional[(i, k)] for i in machines}
        if k in graph.i_minus:
            mass[graph.i_plus[k]] += graph.fractional[(graph.i_minus[k], k)]
        workloads = class_workloads(instance, k)
        slots = [mass[i] * workloads[i] for i in machines]
        _greedy_fill(assignment, job_ids, machines, slots, instance.proc)
    return Schedule(tuple(assignment))


def cupt_round(solution: LpSolution, instance: Instance, T: Fraction) -> Schedule:
    """Integral schedule for machine-uniform class job times: a dropped
    machine keeping more than half its class takes the whole class, smaller
    remainders spread proportionally over the kept machines."""
    lp = build_lp_ra(instance, T, variant="class-uniform-pt")
    graph = prune_edges(solution_graph(solution.by_key(lp, "classfrac")))
    assignment = [-1] * instance.n
    for k in sorted({job.cls for job in instance.jobs}):
        job_ids = [job.id for job in instance.jobs if job.cls == k]
        if k in graph.integral:
            for j in job_ids:
                assignment[j] = graph.integral[k]
            continue
        machines = graph.hosts[k]
        mass = {i: graph.fractional[(i, k)] for i in machines}
        if k in graph.i_minus:
            loose = graph.fractional[(graph.i_minus[k], k)]
            if loose > HALF:
                for j in job_ids:
                    assignment[j] = graph.i_minus[k]
                continue
            scale = 1 / (1 - loose)
            mass = {i: value * scale for i, value in mass.items()}
        workloads = class_workloads(instance, k)
        slots = [mass[i] * workloads[i] for i in machines]
        _greedy_fill(assignment, job_ids, machines, slots, instance.proc)
    return Schedule(tuple(assignment))


# -- binary-search drivers --------------------------------------------------


def _largest_job_cut(instance: Instance, T: Fraction) -> None:
    # some machine pays the class setup plus its largest job, so rejecting
    # T below that never rejects a reachable makespan; it guarantees
    # s + p <= T* for the greedy fill bound
    for k in sorted({job.cls for job in instance.jobs}):
        s = instance.classes[k].setup
        p = max(job.size for job in instance.jobs if job.cls == k)
        if s + p > T:
            raise Infeasible(f"class {k} needs {s + p} on some machine")


def _drive(instance, name, variant, factor, rounder, pre_cut):
    start = time.perf_counter()
    lower, upper = trivial_bounds(instance)

    def decider(T: Fraction):
        if pre_cut is not None:
            pre_cut(instance, T)
        sol = solve_lp(build_lp_ra(instance, T, variant=variant))
        if sol.status is LpStatus.INFEASIBLE:
            raise Infeasible(f"no fractional class placement at bound {T}")
        return T, sol

    tstar, sol = dual_search(decider, lower, upper, search_grid(instance))
    schedule = rounder(sol, instance, tstar)
    makespan = compute_loads(instance, schedule).makespan
    if makespan > factor * tstar:
        raise InternalInvariantViolation(
            f"rounded makespan {makespan} exceeds {factor}x bound {tstar}"
        )
    report = SolveReport(
        solver=name,
        makespan=makespan,
        bound=tstar,
        bound_ratio=makespan / tstar if tstar else Fraction(1),
        ms=(time.perf_counter() - start) * 1000.0,
    )
    return schedule, report


def approx_ra(instance: Instance) -> tuple[Schedule, SolveReport]:
    """2-approximation for class-uniform eligibility on unit speeds."""
    return _drive(instance, "round-ra", "", 2, ra_round, _largest_job_cut)


def approx_cupt(instance: Instance) -> tuple[Schedule, SolveReport]:
    """3-approximation for machine-uniform class job times."""
    return _drive(instance, "round-cupt", "class-uniform-pt", 3, cupt_round, None)
