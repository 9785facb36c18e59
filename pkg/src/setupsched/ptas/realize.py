"""Turn a relaxed schedule into a real one with bounded extra load.

Fractional work labeled g is materialized two bands up, where every such
job is small: band g+2's machines are at least 1/gamma**2 times faster than
the speeds job sizes of band g were calibrated against.  Three routes
exist.  A class whose fractional cores ride with a fringe job goes to that
fringe job's machine at the very end.  A class with little core work is
wrapped in a single container carrying one setup.  Everything else (lone
fringe jobs, core runs of setup-heavy classes) joins a sequence that a
greedy pass pours over the band's departing machines, overfilling each by
at most one small item.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from setupsched.errors import InternalInvariantViolation
from setupsched.model import Instance, Schedule, compute_loads
from setupsched.ptas.classify import classify, group_lo
from setupsched.ptas.dp import RelaxedSchedule
from setupsched.ptas.params import PtasParams


def realize(relaxed: RelaxedSchedule, instance: Instance, params: PtasParams) -> Schedule:
    """Schedule every fractional job integrally; loads grow by (1+eps)**3
    for the poured items plus (1+eps**2) for the deferred fringe setups."""
    if relaxed.t != params.t:
        raise InternalInvariantViolation("realization bound differs from the relaxed one")
    cls = classify(instance, params)
    t = params.t
    eps = params.eps

    frac_by_label: dict[int, list[int]] = {}
    for j, g in relaxed.fractional.items():
        if g > cls.top - 2:
            raise InternalInvariantViolation(f"fractional work labeled {g} has no band to land in")
        frac_by_label.setdefault(g, []).append(j)

    assignment = dict(relaxed.sigma)
    loads = list(relaxed.loads)
    sequence: deque = deque()
    ride_along: list[tuple[int, list[int]]] = []

    for g in range(cls.top + 1):
        if g == 0:
            labels = sorted(label for label in frac_by_label if label <= -2)
        else:
            labels = [g - 2] if g - 2 in frac_by_label else []
        pool = [j for label in labels for j in frac_by_label[label]]
        by_class: dict[int, list[int]] = {}
        fringe_items = []
        for j in sorted(pool):
            if cls.fringe[j]:
                fringe_items.append(j)
            else:
                by_class.setdefault(instance.jobs[j].cls, []).append(j)
        containers = []
        tail_cores: list[int] = []
        for k in sorted(by_class):
            ids = by_class[k]
            work = sum((instance.jobs[j].size for j in ids), Fraction(0))
            if cls.has_fringe[k]:
                ride_along.append((k, ids))
            elif work > instance.classes[k].setup / eps:
                tail_cores.extend(ids)
            else:
                containers.append(("container", k, tuple(ids), work + instance.classes[k].setup))
        for item in containers:
            sequence.append(item)
        for j in fringe_items:
            sequence.append(("job", j, instance.jobs[j].size))
        for j in tail_cores:
            sequence.append(("job", j, instance.jobs[j].size))

        cut = group_lo(g + 1, cls.vmin, params.gamma)
        for i in cls.groups[g].machines:
            if instance.speeds[i] >= cut:
                continue
            room = instance.speeds[i] * t
            if loads[i] >= room:
                continue
            while sequence and loads[i] <= room:
                item = sequence.popleft()
                if item[0] == "job":
                    _tag, j, size = item
                    assignment[j] = i
                    loads[i] += size
                else:
                    _tag, _k, ids, size = item
                    for j in ids:
                        assignment[j] = i
                    loads[i] += size

    if sequence:
        raise InternalInvariantViolation("fractional work left over after the last band")

    for k, ids in sorted(ride_along):
        anchors = [j for j in range(instance.n) if cls.fringe[j] and instance.jobs[j].cls == k]
        host = assignment[min(anchors)]
        for j in ids:
            assignment[j] = host
            loads[host] += instance.jobs[j].size

    if len(assignment) != instance.n:
        raise InternalInvariantViolation("some jobs were never scheduled")
    schedule = Schedule(tuple(assignment[j] for j in range(instance.n)))

    cap_factor = (1 + eps) ** 3 * (1 + eps * eps)
    achieved = compute_loads(instance, schedule)
    for i in range(instance.m):
        if achieved.per_machine[i] > cap_factor * instance.speeds[i] * t:
            raise InternalInvariantViolation(
                f"machine {i} exceeds the realization bound at guess {t}"
            )
    return schedule
