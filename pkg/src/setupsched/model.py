"""Core data model for scheduling with setup classes.

Jobs are partitioned into classes. A machine that processes at least one job
of a class pays that class's setup time once, regardless of how the jobs are
ordered, so a schedule is fully described by the job -> machine assignment.

Machine environments
--------------------
identical
    Every machine runs at speed 1; a job j takes ``p_j`` everywhere.
uniform
    Machine i has speed ``v_i``; job j takes ``p_j / v_i`` and a setup of
    class k takes ``s_k / v_i``.
restricted
    Unit speeds, but job j may only run on its eligible machines; elsewhere
    its processing time is infinite.  Setups are infinite on machines that
    are eligible for no job of the class.
unrelated
    Processing and setup times are arbitrary per machine, including infinite.

All finite quantities are exact rationals (`fractions.Fraction`).  Infinity is
the distinct sentinel `INF`, never a large number; it supports comparisons but
deliberately no arithmetic, so accidental use in a sum raises immediately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union


class _Infinity:
    """Comparison-only infinity sentinel; larger than every Fraction."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "inf"

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is INF

    def __gt__(self, other) -> bool:
        return other is not INF

    def __ge__(self, other) -> bool:
        return True


INF = _Infinity()

#: A processing or setup time: exact rational, or the infinity sentinel.
Cost = Union[Fraction, _Infinity]


def is_finite(x: Cost) -> bool:
    return x is not INF


def frac(x) -> Fraction:
    """Coerce ints, strings like "3/4", and Fractions to an exact rational."""
    return x if isinstance(x, Fraction) else Fraction(x)


class Kind(str, Enum):
    IDENTICAL = "identical"
    UNIFORM = "uniform"
    RESTRICTED = "restricted"
    UNRELATED = "unrelated"


@dataclass(frozen=True)
class Job:
    """One job: its class, and either a single size or per-machine sizes.

    ``size`` is set for identical/uniform/restricted kinds; ``sizes`` (one
    entry per machine, INF allowed) for unrelated; ``eligible`` only for
    restricted.
    """

    id: int
    cls: int
    size: Fraction | None = None
    sizes: tuple[Cost, ...] | None = None
    eligible: frozenset[int] | None = None


@dataclass(frozen=True)
class SetupClass:
    """One setup class: a single setup time, or per-machine setup times."""

    id: int
    setup: Fraction | None = None
    setups: tuple[Cost, ...] | None = None


@dataclass(frozen=True)
class Instance:
    """An immutable scheduling instance.

    ``speeds`` always has one entry per machine; identical and restricted
    instances carry all-ones.  Use the kind-specific constructors below
    rather than filling the fields by hand.
    """

    kind: Kind
    speeds: tuple[Fraction, ...]
    classes: tuple[SetupClass, ...]
    jobs: tuple[Job, ...]

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identical(m: int, setups: Sequence, jobs: Sequence[tuple[int, object]]) -> "Instance":
        """``jobs`` is a sequence of (class id, size)."""
        return Instance(
            kind=Kind.IDENTICAL,
            speeds=tuple(Fraction(1) for _ in range(m)),
            classes=tuple(SetupClass(k, frac(s)) for k, s in enumerate(setups)),
            jobs=tuple(Job(j, k, frac(p)) for j, (k, p) in enumerate(jobs)),
        )

    @staticmethod
    def uniform(speeds: Sequence, setups: Sequence, jobs: Sequence[tuple[int, object]]) -> "Instance":
        return Instance(
            kind=Kind.UNIFORM,
            speeds=tuple(frac(v) for v in speeds),
            classes=tuple(SetupClass(k, frac(s)) for k, s in enumerate(setups)),
            jobs=tuple(Job(j, k, frac(p)) for j, (k, p) in enumerate(jobs)),
        )

    @staticmethod
    def restricted(m: int, setups: Sequence, jobs: Sequence[tuple[int, object, Iterable[int]]]) -> "Instance":
        """``jobs`` is a sequence of (class id, size, eligible machine ids)."""
        return Instance(
            kind=Kind.RESTRICTED,
            speeds=tuple(Fraction(1) for _ in range(m)),
            classes=tuple(SetupClass(k, frac(s)) for k, s in enumerate(setups)),
            jobs=tuple(
                Job(j, k, frac(p), eligible=frozenset(el))
                for j, (k, p, el) in enumerate(jobs)
            ),
        )

    @staticmethod
    def unrelated(setup_rows: Sequence[Sequence], job_rows: Sequence[tuple[int, Sequence]]) -> "Instance":
        """``setup_rows[k]`` and each job's row hold one cost per machine.

        Costs are ints/strings/Fractions, or INF (the sentinel or the string
        "inf").
        """

        def cost(x) -> Cost:
            if x is INF or x == "inf":
                return INF
            return frac(x)

        classes = tuple(
            SetupClass(k, setups=tuple(cost(x) for x in row))
            for k, row in enumerate(setup_rows)
        )
        jobs = tuple(
            Job(j, k, sizes=tuple(cost(x) for x in row))
            for j, (k, row) in enumerate(job_rows)
        )
        m = len(classes[0].setups) if classes else (len(jobs[0].sizes) if jobs else 0)
        return Instance(
            kind=Kind.UNRELATED,
            speeds=tuple(Fraction(1) for _ in range(m)),
            classes=classes,
            jobs=jobs,
        )

    # -- basic accessors ---------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.speeds)

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def class_jobs(self, k: int) -> tuple[Job, ...]:
        return tuple(j for j in self.jobs if j.cls == k)

    def class_eligible(self, k: int) -> frozenset[int]:
        """Machines eligible for at least one job of class k (restricted)."""
        out: set[int] = set()
        for j in self.jobs:
            if j.cls == k and j.eligible is not None:
                out |= j.eligible
        return frozenset(out)

    def proc(self, i: int, j: int) -> Cost:
        """Processing time of job j on machine i."""
        job = self.jobs[j]
        if self.kind is Kind.UNRELATED:
            return job.sizes[i]
        if self.kind is Kind.RESTRICTED:
            return job.size if i in job.eligible else INF
        if self.kind is Kind.UNIFORM:
            return job.size / self.speeds[i]
        return job.size

    def setup(self, i: int, k: int) -> Cost:
        """Setup time of class k on machine i."""
        cls = self.classes[k]
        if self.kind is Kind.UNRELATED:
            return cls.setups[i]
        if self.kind is Kind.RESTRICTED:
            return cls.setup if i in self.class_eligible(k) else INF
        if self.kind is Kind.UNIFORM:
            return cls.setup / self.speeds[i]
        return cls.setup


@dataclass(frozen=True)
class Schedule:
    """A complete assignment: ``assignment[j]`` is job j's machine."""

    assignment: tuple[int, ...]


@dataclass(frozen=True)
class Loads:
    """Per-machine completion times and their maximum."""

    per_machine: tuple[Cost, ...]
    makespan: Cost
    classes_on: tuple[frozenset[int], ...] = field(compare=False, default=())


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.detail}"


def compute_loads(instance: Instance, schedule: Schedule) -> Loads:
    """Evaluate a schedule: processing plus one setup per class present.

    A job or setup that is infinite on its machine makes that machine's load
    (and the makespan) INF; the schedule is then simply infeasible, not an
    error.
    """
    m = instance.m
    work: list[Cost] = [Fraction(0)] * m
    present: list[set[int]] = [set() for _ in range(m)]
    for j, i in enumerate(schedule.assignment):
        p = instance.proc(i, j)
        if p is INF or work[i] is INF:
            work[i] = INF
        else:
            work[i] = work[i] + p
        present[i].add(instance.jobs[j].cls)
    for i in range(m):
        for k in sorted(present[i]):
            s = instance.setup(i, k)
            if s is INF or work[i] is INF:
                work[i] = INF
            else:
                work[i] = work[i] + s
    per = tuple(work)
    makespan: Cost = Fraction(0)
    for w in per:
        if w > makespan:
            makespan = w
    return Loads(per, makespan, tuple(frozenset(c) for c in present))


def validate(instance: Instance, schedule: Schedule | None = None) -> list[Violation]:
    """Structural checks; returns an empty list when everything is sound."""
    out: list[Violation] = []
    m = instance.m
    if m == 0:
        out.append(Violation("NoMachines", "instance has zero machines"))
    for idx, v in enumerate(instance.speeds):
        if v <= 0:
            out.append(Violation("NonPositiveSpeed", f"machine {idx} has speed {v}"))
    if instance.kind is not Kind.UNIFORM and any(v != 1 for v in instance.speeds):
        out.append(Violation("UnexpectedSpeed", f"{instance.kind.value} kind requires unit speeds"))
    for k, cls in enumerate(instance.classes):
        if cls.id != k:
            out.append(Violation("NonContiguousIds", f"class at position {k} has id {cls.id}"))
        if instance.kind is Kind.UNRELATED:
            if cls.setups is None or len(cls.setups) != m:
                out.append(Violation("LengthMismatch", f"class {k} needs {m} setup entries"))
            elif any(is_finite(s) and s < 0 for s in cls.setups):
                out.append(Violation("NegativeSetup", f"class {k} has a negative setup"))
        else:
            if cls.setup is None:
                out.append(Violation("MissingField", f"class {k} has no setup time"))
            elif cls.setup < 0:
                out.append(Violation("NegativeSetup", f"class {k} has setup {cls.setup}"))
    for j, job in enumerate(instance.jobs):
        if job.id != j:
            out.append(Violation("NonContiguousIds", f"job at position {j} has id {job.id}"))
        if not (0 <= job.cls < instance.num_classes):
            out.append(Violation("UnknownClass", f"job {j} references class {job.cls}"))
        if instance.kind is Kind.UNRELATED:
            if job.sizes is None or len(job.sizes) != m:
                out.append(Violation("LengthMismatch", f"job {j} needs {m} size entries"))
            elif any(is_finite(p) and p < 0 for p in job.sizes):
                out.append(Violation("NegativeSize", f"job {j} has a negative size"))
        else:
            if job.size is None:
                out.append(Violation("MissingField", f"job {j} has no size"))
            elif job.size < 0:
                out.append(Violation("NegativeSize", f"job {j} has size {job.size}"))
        if instance.kind is Kind.RESTRICTED:
            if job.eligible is None:
                out.append(Violation("MissingField", f"job {j} has no eligible set"))
            elif any(not (0 <= i < m) for i in job.eligible):
                out.append(Violation("UnknownMachine", f"job {j} eligible set exceeds machine range"))
    if schedule is not None:
        if len(schedule.assignment) != instance.n:
            out.append(
                Violation(
                    "LengthMismatch",
                    f"schedule assigns {len(schedule.assignment)} of {instance.n} jobs",
                )
            )
        for j, i in enumerate(schedule.assignment):
            if not (0 <= i < m):
                out.append(Violation("UnknownMachine", f"job {j} assigned to machine {i}"))
    return out


def trivial_bounds(instance: Instance) -> tuple[Fraction, Fraction]:
    """Cheap makespan bounds: (lower, upper).

    Lower: the larger of the best single-job cost max_j min_i (p_ij + s_ik)
    and the volume bound (every job, plus one setup per nonempty class, must
    run somewhere).  Upper: the makespan of assigning every job to its
    cheapest machine.  Raises Infeasible when some job fits nowhere.
    """
    from setupsched.errors import Infeasible

    n, m = instance.n, instance.m
    if n == 0:
        return Fraction(0), Fraction(0)

    best_machine: list[int] = []
    lower: Cost = Fraction(0)
    for j in range(n):
        k = instance.jobs[j].cls
        best: Cost = INF
        arg = -1
        for i in range(m):
            p, s = instance.proc(i, j), instance.setup(i, k)
            if p is INF or s is INF:
                continue
            if best is INF or p + s < best:
                best, arg = p + s, i
        if arg < 0:
            raise Infeasible(f"job {j} has no machine with finite cost")
        best_machine.append(arg)
        if best > lower:
            lower = best

    # volume: all work plus one setup per nonempty class must run somewhere;
    # unrelated kinds have no machine-independent size, so charge the cheapest
    total = Fraction(0)
    nonempty = {job.cls for job in instance.jobs}
    if instance.kind is Kind.UNRELATED:
        for j in range(n):
            total += min(p for p in (instance.proc(i, j) for i in range(m)) if is_finite(p))
        for k in sorted(nonempty):
            finite = [s for s in (instance.setup(i, k) for i in range(m)) if is_finite(s)]
            if not finite:
                raise Infeasible(f"class {k} has no machine with finite setup")
            total += min(finite)
    else:
        total += sum((job.size for job in instance.jobs), Fraction(0))
        total += sum((instance.classes[k].setup for k in sorted(nonempty)), Fraction(0))
    volume = total / sum(instance.speeds)
    if volume > lower:
        lower = volume

    upper = compute_loads(instance, Schedule(tuple(best_machine))).makespan
    return lower, upper
