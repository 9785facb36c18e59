"""Dynamic program over machine configurations, one speed band at a time.

States walk group by group and, inside a group, class by class.  A state
remembers only multiplicities: how many machines of each (capacity, load,
setup-paid) profile exist, which pending sizes remain, and three lagged
accumulators of fractional work.  Fractional work raised in band g must be
absorbed as free space on machines no more than two bands up, so two
accumulators lag behind the current band and the third collects what older
bands could not absorb.  The reachable state space is explored lazily in
breadth-first order with deterministic edge order; full tables are never
allocated.

The result is a relaxed schedule: an integral assignment for most jobs,
plus per-job band labels for the fractionally placed rest.  `realize` turns
it into a true schedule with bounded extra load.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import NamedTuple

from setupsched.errors import BudgetExceeded, Infeasible, InternalInvariantViolation
from setupsched.model import Instance, Kind
from setupsched.ptas.classify import Classification, group_hi, group_lo
from setupsched.ptas.params import PtasParams, pow2

DEFAULT_MAX_STATES = 500_000


class DpState(NamedTuple):
    """One configuration of the band walk, everything in integer units.

    ``iota`` holds the sizes still pending in the current (band, class) as
    (size, count) pairs, largest first; ``mu`` counts machines by (capacity,
    load, setup-paid) profile; ``lam`` is the fractional-work window (current
    band, one behind, older).  ``xi`` flags that the current class already
    sent a core job fractional and thereby paid its setup into ``lam``.
    """

    g: int
    k: int
    iota: tuple
    xi: int
    mu: tuple
    lam: tuple[int, int, int]


@dataclass(frozen=True)
class RelaxedSchedule:
    """Integral assignment ``sigma`` plus band labels for fractional jobs.

    ``loads[i]`` counts integral sizes on machine i and one setup per class
    with a core job there; fringe setups are deferred to realization.
    ``free[i]`` is the room left below capacity at the guess bound ``t``.
    ``w[g]`` totals fractional work labeled g (sizes, plus the setup of each
    class with core group g, no fringe job, and a fractional core job);
    ``r[g]`` is the part of older fractional work the bands up to g could
    not absorb.  A valid relaxed schedule has r and w vanish at the top.
    """

    sigma: dict[int, int]
    fractional: dict[int, int]
    loads: tuple[Fraction, ...]
    free: tuple[Fraction, ...]
    w: dict[int, Fraction]
    r: dict[int, Fraction]
    t: Fraction


def relaxed_summary(
    instance: Instance,
    params: PtasParams,
    cls: Classification,
    sigma: dict[int, int],
    fractional: dict[int, int],
) -> RelaxedSchedule:
    """Derive loads, free space, and the absorption ledgers from assignments."""
    loads = [Fraction(0)] * instance.m
    core_classes_on: list[set[int]] = [set() for _ in range(instance.m)]
    for j, i in sigma.items():
        loads[i] += instance.jobs[j].size
        if not cls.fringe[j]:
            core_classes_on[i].add(instance.jobs[j].cls)
    for i in range(instance.m):
        for k in core_classes_on[i]:
            loads[i] += instance.classes[k].setup
    free = tuple(instance.speeds[i] * params.t - loads[i] for i in range(instance.m))

    w: dict[int, Fraction] = {}
    w_setup_classes: dict[int, set[int]] = {}
    for j, g in fractional.items():
        w[g] = w.get(g, Fraction(0)) + instance.jobs[j].size
        k = instance.jobs[j].cls
        if not cls.fringe[j] and not cls.has_fringe[k]:
            w_setup_classes.setdefault(g, set()).add(k)
    for g, ks in w_setup_classes.items():
        for k in ks:
            w[g] += instance.classes[k].setup

    r: dict[int, Fraction] = {}
    bottom = min(min(w, default=0), 0)
    prev = Fraction(0)
    for g in range(bottom, cls.top + 1):
        departing_free = Fraction(0)
        if 0 <= g:
            for i in cls.groups[g].machines:
                if instance.speeds[i] < group_lo(g + 1, cls.vmin, params.gamma):
                    departing_free += free[i]
        prev = max(
            Fraction(0),
            prev + w.get(g - 2, Fraction(0)) - departing_free,
        )
        r[g] = prev
    return RelaxedSchedule(
        sigma=sigma,
        fractional=fractional,
        loads=tuple(loads),
        free=free,
        w=w,
        r=r,
        t=params.t,
    )


def check_relaxed(
    instance: Instance,
    params: PtasParams,
    cls: Classification,
    rs: RelaxedSchedule,
) -> None:
    """Raise unless ``rs`` is a valid relaxed schedule at its bound."""
    seen = set(rs.sigma) | set(rs.fractional)
    if len(seen) != instance.n or set(rs.sigma) & set(rs.fractional):
        raise InternalInvariantViolation("sigma and fractional must partition the jobs")
    for j, i in rs.sigma.items():
        g = cls.native[j] if cls.fringe[j] else cls.core_group[instance.jobs[j].cls]
        if not 0 <= g <= cls.top or i not in cls.groups[g].machines:
            raise InternalInvariantViolation(
                f"job {j} sits on machine {i} outside its band {g}"
            )
    for j, g in rs.fractional.items():
        expect = cls.native[j] if cls.fringe[j] else cls.core_group[instance.jobs[j].cls]
        if g != expect:
            raise InternalInvariantViolation(f"job {j} labeled {g}, expected {expect}")
    fresh = relaxed_summary(instance, params, cls, rs.sigma, rs.fractional)
    if fresh.loads != rs.loads or fresh.w != rs.w or fresh.r != rs.r:
        raise InternalInvariantViolation("stored ledgers disagree with assignments")
    for i in range(instance.m):
        if rs.loads[i] > instance.speeds[i] * params.t:
            raise InternalInvariantViolation(f"machine {i} overfull in the relaxed schedule")
    top = cls.top
    if any(total for g, total in rs.w.items() if g >= top - 1) or rs.r.get(top):
        raise InternalInvariantViolation("fractional work survives past the top band")


def _canon_iota(d: dict[int, int]) -> tuple:
    return tuple(sorted(((p, c) for p, c in d.items() if c), key=lambda pc: -pc[0]))


def _canon_mu(d: dict[tuple[int, int, int], int]) -> tuple:
    return tuple(sorted((key, c) for key, c in d.items() if c))


def dp_relaxed(
    instance: Instance,
    params: PtasParams,
    cls: Classification,
    max_states: int = DEFAULT_MAX_STATES,
) -> RelaxedSchedule:
    """Find a relaxed schedule at bound ``params.t`` or prove there is none.

    Raises `Infeasible` when the search space is exhausted, `BudgetExceeded`
    when more than ``max_states`` distinct states would be explored.
    """
    assert instance.kind in (Kind.IDENTICAL, Kind.UNIFORM)
    assert params.t == cls.t
    t = params.t
    top = cls.top
    num_classes = instance.num_classes

    denoms = [j.size.denominator for j in instance.jobs]
    denoms += [c.setup.denominator for c in instance.classes]
    denoms += [(v * t).denominator for v in instance.speeds]
    d = lcm(*denoms) if denoms else 1
    size_int = tuple(int(j.size * d) for j in instance.jobs)
    setup_int = tuple(int(c.setup * d) for c in instance.classes)
    cap_int = tuple(int(v * t * d) for v in instance.speeds)

    class_has_jobs = [False] * num_classes
    for j in instance.jobs:
        class_has_jobs[j.cls] = True

    for g in cls.fringe_by_native:
        if g > top:
            raise Infeasible(f"a fringe job outgrows every machine band at bound {t}")
    for k in range(num_classes):
        if cls.core_by_class[k] and cls.core_group[k] > top:
            raise Infeasible(f"class {k} needs a machine band above the fastest at bound {t}")
    volume = sum(size_int)
    for k in range(num_classes):
        if class_has_jobs[k] and not cls.has_fringe[k]:
            volume += setup_int[k]
    if volume > sum(cap_int):
        raise Infeasible(f"total work exceeds total capacity at bound {t}")

    def sizes_of(ids: tuple[int, ...]) -> tuple:
        acc: dict[int, int] = {}
        for j in ids:
            acc[size_int[j]] = acc.get(size_int[j], 0) + 1
        return _canon_iota(acc)

    iota_group = {g: sizes_of(ids) for g, ids in cls.fringe_by_native.items()}
    iota_class = [sizes_of(cls.core_by_class[k]) for k in range(num_classes)]

    # suffix volumes for the dead-state prune: work not yet introduced at
    # (band g, class k), and capacity of machines not yet arrived
    fringe_suffix = [0] * (top + 2)
    for g in range(top - 1, -1, -1):
        later = sum(size_int[j] for j in cls.fringe_by_native.get(g + 1, ()))
        fringe_suffix[g] = fringe_suffix[g + 1] + later
    core_total = [sum(size_int[j] for j in cls.core_by_class[k]) for k in range(num_classes)]
    band_core_suffix = {}
    for g in range(top + 1):
        suffix = [0] * (num_classes + 1)
        for k in range(num_classes - 1, -1, -1):
            suffix[k] = suffix[k + 1] + (core_total[k] if cls.core_group[k] == g else 0)
        band_core_suffix[g] = suffix
    core_above = [0] * (top + 2)
    for g in range(top - 1, -1, -1):
        later = sum(
            core_total[k] for k in range(num_classes) if cls.core_group[k] == g + 1
        )
        core_above[g] = core_above[g + 1] + later
    fresh_total = [0] * (top + 2)
    for g in range(top, 0, -1):
        arriving = sum(
            cap_int[i]
            for i in cls.groups[g].machines
            if instance.speeds[i] >= group_hi(g - 1, cls.vmin, params.gamma)
        )
        fresh_total[g - 1] = fresh_total[g] + arriving

    def dead(state: DpState) -> bool:
        g, k, iota, _xi, mu, lam = state
        remaining = sum(p * c for p, c in iota) + lam[0] + lam[1] + lam[2]
        remaining += fringe_suffix[g] + band_core_suffix[g][k] + core_above[g]
        avail = sum((cap - load) * c for (cap, load, _z), c in mu) + fresh_total[g]
        return remaining > avail

    lam2 = lam3 = 0
    for g, ids in cls.fringe_by_native.items():
        if g == -1:
            lam2 += sum(size_int[j] for j in ids)
        elif g <= -2:
            lam3 += sum(size_int[j] for j in ids)
    for k in range(num_classes):
        ids = cls.core_by_class[k]
        if ids and cls.core_group[k] <= -1:
            tot = sum(size_int[j] for j in ids)
            if not cls.has_fringe[k]:
                tot += setup_int[k]
            if cls.core_group[k] == -1:
                lam2 += tot
            else:
                lam3 += tot

    start_mu: dict[tuple[int, int, int], int] = {}
    for i in cls.groups[0].machines:
        key = (cap_int[i], 0, 0)
        start_mu[key] = start_mu.get(key, 0) + 1
    start = DpState(0, 0, iota_group.get(0, ()), 0, _canon_mu(start_mu), (0, lam2, lam3))

    depart_cut = [group_lo(g + 1, cls.vmin, params.gamma) * t * d for g in range(top + 1)]
    fresh_cut = [group_hi(g - 1, cls.vmin, params.gamma) for g in range(top + 1)]

    def successors(state: DpState):
        g, k, iota, xi, mu, lam = state
        out = []
        if iota:
            p, cnt = iota[0]
            iota_d = dict(iota)
            iota_d[p] -= 1
            iota2 = _canon_iota(iota_d)
            mu_d = dict(mu)
            if k >= 1:
                s = setup_int[k - 1]
                for (cap, load, z), _ in mu:
                    if z == 0 and load + p + s <= cap:
                        nd = dict(mu_d)
                        nd[(cap, load, 0)] -= 1
                        if not nd[(cap, load, 0)]:
                            del nd[(cap, load, 0)]
                        nd[(cap, load + p + s, 1)] = nd.get((cap, load + p + s, 1), 0) + 1
                        out.append((("new", cap, load), DpState(g, k, iota2, xi, _canon_mu(nd), lam)))
            want_z = 1 if k >= 1 else 0
            for (cap, load, z), _ in mu:
                if z == want_z and load + p <= cap:
                    nd = dict(mu_d)
                    nd[(cap, load, z)] -= 1
                    if not nd[(cap, load, z)]:
                        del nd[(cap, load, z)]
                    nd[(cap, load + p, z)] = nd.get((cap, load + p, z), 0) + 1
                    out.append((("old", cap, load), DpState(g, k, iota2, xi, _canon_mu(nd), lam)))
            if k >= 1 and not cls.has_fringe[k - 1] and xi == 0:
                lam1 = lam[0] + p + setup_int[k - 1]
                out.append((("frac",), DpState(g, k, iota2, 1, mu, (lam1, lam[1], lam[2]))))
            else:
                out.append((("frac",), DpState(g, k, iota2, xi, mu, (lam[0] + p, lam[1], lam[2]))))
            return out
        if k < num_classes:
            merged: dict[tuple[int, int, int], int] = {}
            for (cap, load, _z), c in mu:
                merged[(cap, load, 0)] = merged.get((cap, load, 0), 0) + c
            nxt_iota = iota_class[k] if cls.core_group[k] == g else ()
            out.append((("class",), DpState(g, k + 1, nxt_iota, 0, _canon_mu(merged), lam)))
            return out
        if g < top:
            absorb = 0
            merged = {}
            for (cap, load, _z), c in mu:
                if cap < depart_cut[g]:
                    absorb += (cap - load) * c
                else:
                    merged[(cap, load, 0)] = merged.get((cap, load, 0), 0) + c
            for i in cls.groups[g + 1].machines:
                if instance.speeds[i] >= fresh_cut[g + 1]:
                    key = (cap_int[i], 0, 0)
                    merged[key] = merged.get(key, 0) + 1
            lam_new = (0, lam[0], lam[1] + max(0, lam[2] - absorb))
            out.append((("group",), DpState(g + 1, 0, iota_group.get(g + 1, ()), 0, _canon_mu(merged), lam_new)))
        return out

    def is_end(state: DpState) -> bool:
        g, k, iota, _xi, mu, lam = state
        if g != top or k != num_classes or iota:
            return False
        if lam[0] or lam[1]:
            return False
        room = sum((cap - load) * c for (cap, load, _z), c in mu)
        return lam[2] <= room

    parent: dict[DpState, tuple | None] = {}
    queue = deque()
    if not dead(start):
        parent[start] = None
        queue.append(start)
    end_state = None
    while queue:
        state = queue.popleft()
        if is_end(state):
            end_state = state
            break
        for edge, nxt in successors(state):
            if nxt not in parent and not dead(nxt):
                if len(parent) >= max_states:
                    raise BudgetExceeded(f"relaxed dp grew past {max_states} states")
                parent[nxt] = (state, edge)
                queue.append(nxt)
    if end_state is None:
        raise Infeasible(f"no relaxed schedule exists at bound {t}")

    path = []
    at = end_state
    while parent[at] is not None:
        prev, edge = parent[at]
        path.append(edge)
        at = prev
    path.reverse()

    rs = _replay(instance, params, cls, size_int, setup_int, cap_int, path)
    _check_load_grid(instance, params, cls, rs)
    return rs


def _check_load_grid(
    instance: Instance,
    params: PtasParams,
    cls: Classification,
    rs: RelaxedSchedule,
) -> None:
    """Every load must sit on the grid of the machine's lower band.

    Grid sizes and setups placed in band g are multiples of eps*2**(e(g)-1),
    the -1 covering core jobs whose rounded size dipped just under eps*s_k.
    Holds only for grid-aligned instances, hence checked here and not in
    `check_relaxed`.
    """
    for i in range(instance.m):
        unit = params.eps * pow2(cls.groups[cls.lower_band(i)].e - 1)
        if (rs.loads[i] / unit).denominator != 1:
            raise InternalInvariantViolation(
                f"load {rs.loads[i]} of machine {i} is off the band grid {unit}"
            )


def _pending(instance: Instance, ids: tuple[int, ...]) -> list[int]:
    return sorted(ids, key=lambda j: (-instance.jobs[j].size, j))


def _replay(
    instance: Instance,
    params: PtasParams,
    cls: Classification,
    size_int: tuple[int, ...],
    setup_int: tuple[int, ...],
    cap_int: tuple[int, ...],
    path: list,
) -> RelaxedSchedule:
    """Walk the edge sequence again with named machines and jobs.

    Multiplicity states never say which machine or job an edge touched; the
    replay resolves each edge to the lowest-id machine matching its profile
    and the lowest-id pending job of the popped size, which is exactly the
    tie order the edge enumeration used.
    """
    sigma: dict[int, int] = {}
    fractional: dict[int, int] = {}
    for g, ids in cls.fringe_by_native.items():
        if g < 0:
            for j in ids:
                fractional[j] = g
    for k in range(instance.num_classes):
        if cls.core_by_class[k] and cls.core_group[k] < 0:
            for j in cls.core_by_class[k]:
                fractional[j] = cls.core_group[k]

    g = 0
    k = 0
    active = list(cls.groups[0].machines)
    load = {i: 0 for i in active}
    paid = {i: 0 for i in active}
    pending = _pending(instance, cls.fringe_by_native.get(0, ()))

    def match(cap: int, want_load: int, want_z: int) -> int:
        for i in sorted(active):
            if cap_int[i] == cap and load[i] == want_load and paid[i] == want_z:
                return i
        raise InternalInvariantViolation("replay lost track of a machine profile")

    for edge in path:
        if edge[0] == "new":
            _tag, cap, want = edge
            j = pending.pop(0)
            i = match(cap, want, 0)
            sigma[j] = i
            load[i] += size_int[j] + setup_int[k - 1]
            paid[i] = 1
        elif edge[0] == "old":
            _tag, cap, want = edge
            j = pending.pop(0)
            i = match(cap, want, 1 if k >= 1 else 0)
            sigma[j] = i
            load[i] += size_int[j]
        elif edge[0] == "frac":
            j = pending.pop(0)
            fractional[j] = g
        elif edge[0] == "class":
            if pending:
                raise InternalInvariantViolation("class advanced with jobs pending")
            for i in active:
                paid[i] = 0
            if cls.core_group[k] == g:
                pending = _pending(instance, cls.core_by_class[k])
            k += 1
        elif edge[0] == "group":
            if pending:
                raise InternalInvariantViolation("band advanced with jobs pending")
            cut = group_lo(g + 1, cls.vmin, params.gamma)
            active = [i for i in active if instance.speeds[i] >= cut]
            fresh_cut = group_hi(g, cls.vmin, params.gamma)
            for i in cls.groups[g + 1].machines:
                if instance.speeds[i] >= fresh_cut:
                    active.append(i)
                    load[i] = 0
            for i in active:
                paid[i] = 0
            g += 1
            k = 0
            pending = _pending(instance, cls.fringe_by_native.get(g, ()))
        else:
            raise InternalInvariantViolation(f"unknown edge {edge!r}")
    if pending:
        raise InternalInvariantViolation("path ended with jobs pending")

    rs = relaxed_summary(instance, params, cls, sigma, fractional)
    check_relaxed(instance, params, cls, rs)
    return rs
