"""Speed bands and the job roles the dynamic program works with.

Machines are banded into overlapping groups: group g spans speeds in
[vmin/gamma**(g-1), vmin/gamma**(g+1)), so every speed lies in exactly two
consecutive groups and loads of machines shared between groups stay on the
finer of the two load grids.  A job is fringe for its class when its size
reaches s_k/delta, core otherwise; fringe jobs belong to the smallest group
whose machines still see them as small, core jobs travel with their class,
placed where a single setup plus job is neither negligible nor oversized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from setupsched.errors import InternalInvariantViolation
from setupsched.model import Instance, Kind
from setupsched.ptas.params import PtasParams, floor_log2


@dataclass(frozen=True)
class Group:
    """One speed band: its machines, distinct speeds, and load-grid exponent."""

    index: int
    v_lo: Fraction
    v_hi: Fraction
    machines: tuple[int, ...]
    speeds: tuple[Fraction, ...]
    e: int


@dataclass(frozen=True)
class Classification:
    """Bands, job roles, and the grid exponents derived from them.

    ``groups[g].e`` is the load-grid exponent of band g (loads there are
    multiples of eps*2**e); ``e_star`` plays the same role for the global
    fractional-work accumulators.  The big-size and load grids themselves
    are derived, never materialized: band g admits at most 2/(eps*gamma)**2
    big sizes and 2/(eps**2 * gamma**3) + 1 grid loads.
    """

    t: Fraction
    vmin: Fraction
    groups: tuple[Group, ...]
    native: tuple[int, ...]
    fringe: tuple[bool, ...]
    core_group: tuple[int, ...]
    has_fringe: tuple[bool, ...]
    fringe_by_native: dict[int, tuple[int, ...]]
    core_by_class: tuple[tuple[int, ...], ...]
    e_star: int

    @property
    def top(self) -> int:
        return len(self.groups) - 1

    def lower_band(self, machine: int) -> int:
        """The smaller of the two bands holding this machine's speed."""
        for group in self.groups:
            if machine in group.machines:
                return group.index
        raise ValueError(f"machine {machine} is in no band")

    def big_sizes(
        self, instance: Instance, params: PtasParams, g: int
    ) -> tuple[Fraction, ...]:
        """Distinct sizes big for at least one speed in band g's interval."""
        lo = group_lo(g, self.vmin, params.gamma)
        hi = group_hi(g, self.vmin, params.gamma)
        out = {
            j.size
            for j in instance.jobs
            if params.eps * lo * self.t <= j.size < hi * self.t
        }
        return tuple(sorted(out))


def group_lo(g: int, vmin: Fraction, gamma: Fraction) -> Fraction:
    return vmin * gamma ** (1 - g)


def group_hi(g: int, vmin: Fraction, gamma: Fraction) -> Fraction:
    return vmin * gamma ** (-1 - g)


def is_small(p: Fraction, v: Fraction, params: PtasParams) -> bool:
    return p < params.eps * v * params.t


def is_huge(p: Fraction, v: Fraction, params: PtasParams) -> bool:
    return p > v * params.t


def is_big(p: Fraction, v: Fraction, params: PtasParams) -> bool:
    return not is_small(p, v, params) and not is_huge(p, v, params)


def native_group(p: Fraction, instance_vmin: Fraction, params: PtasParams) -> int:
    """Smallest g whose fastest conceivable machines see p as small."""
    gamma = params.gamma

    def small(g: int) -> bool:
        return p < params.eps * group_hi(g, instance_vmin, gamma) * params.t

    g = 0
    if small(0):
        while small(g - 1):
            g -= 1
    else:
        while not small(g):
            g += 1
    if p < group_lo(g, instance_vmin, gamma) * params.t:
        raise InternalInvariantViolation(
            f"size {p} is small for every speed of its native group {g}"
        )
    return g


def core_group_of(s: Fraction, instance_vmin: Fraction, params: PtasParams) -> int:
    """Unique g with group_lo(g)*t <= s < group_lo(g+1)*t."""
    gamma = params.gamma

    def lo(g: int) -> Fraction:
        return group_lo(g, instance_vmin, gamma) * params.t

    g = 0
    while s >= lo(g + 1):
        g += 1
    while s < lo(g):
        g -= 1
    return g


def classify(instance: Instance, params: PtasParams) -> Classification:
    """Band the machines of a simplified instance and type its jobs."""
    assert instance.kind in (Kind.IDENTICAL, Kind.UNIFORM)
    vmin = min(instance.speeds)
    gamma = params.gamma

    def upper_group(v: Fraction) -> int:
        g = 0
        while v >= group_lo(g + 1, vmin, gamma):
            g += 1
        return g

    top = max(upper_group(v) for v in instance.speeds)
    groups = []
    for g in range(top + 1):
        lo = group_lo(g, vmin, gamma)
        hi = group_hi(g, vmin, gamma)
        members = tuple(
            sorted(
                (i for i in range(instance.m) if lo <= instance.speeds[i] < hi),
                key=lambda i: (instance.speeds[i], i),
            )
        )
        speeds = tuple(sorted({instance.speeds[i] for i in members}))
        groups.append(Group(g, lo, hi, members, speeds, floor_log2(params.eps * lo * params.t)))

    fringe = []
    native = []
    for job in instance.jobs:
        setup = instance.classes[job.cls].setup
        fringe.append(job.size >= setup / params.delta)
        native.append(native_group(job.size, vmin, params))

    core_group = tuple(
        core_group_of(c.setup, vmin, params) for c in instance.classes
    )
    has_fringe = tuple(
        any(fringe[j.id] for j in instance.class_jobs(k))
        for k in range(instance.num_classes)
    )
    fringe_by_native: dict[int, tuple[int, ...]] = {}
    for j in range(instance.n):
        if fringe[j]:
            fringe_by_native.setdefault(native[j], ())
            fringe_by_native[native[j]] += (j,)
    core_by_class = tuple(
        tuple(j.id for j in instance.class_jobs(k) if not fringe[j.id])
        for k in range(instance.num_classes)
    )
    slots = instance.n + instance.num_classes
    e_star = floor_log2(params.eps * vmin * params.t / slots) if slots else 0
    return Classification(
        t=params.t,
        vmin=vmin,
        groups=tuple(groups),
        native=tuple(native),
        fringe=tuple(fringe),
        core_group=core_group,
        has_fringe=has_fringe,
        fringe_by_native=fringe_by_native,
        core_by_class=core_by_class,
        e_star=e_star,
    )
