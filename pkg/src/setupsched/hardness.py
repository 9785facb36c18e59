"""Set-cover reduction that manufactures hard unrelated-machine instances.

A SetCoverGap question (does a cover of size t exist, or do all covers need
alpha*t sets?) turns into a scheduling instance with K classes of zero-length
jobs and unit setups.  Machines are matched to sets by one fresh random
permutation per class, and a job can only run where its element is covered.
Any finite schedule must therefore buy, per class, a family of sets covering
the universe, so cover size separates achievable makespans: YES instances
admit light schedules, NO instances force heavy ones.

Certification of the YES/NO labels is done here by exhaustive search, which
keeps the generator honest at desk scale (N <= 20, m <= 12) without leaning
on the hardness result itself.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil, e, log2, sqrt

from setupsched.errors import CertificationFailed, InternalInvariantViolation
from setupsched.model import INF, Instance, Loads, Schedule, compute_loads
from setupsched.round_unrelated import approx_unrelated


@dataclass(frozen=True)
class SetCoverInstance:
    """Universe {1..n_elements}, candidate sets, and the claimed gap."""

    n_elements: int
    sets: tuple[frozenset[int], ...]
    target: int
    alpha: int

    def validate(self) -> None:
        if self.target < 1:
            raise ValueError(f"target must be >= 1, got {self.target}")
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        universe = set(range(1, self.n_elements + 1))
        stray = set().union(*self.sets) - universe if self.sets else set()
        if stray:
            raise ValueError(f"elements {sorted(stray)} outside the universe")
        missing = universe - (set().union(*self.sets) if self.sets else set())
        if missing:
            raise ValueError(f"elements {sorted(missing)} belong to no set")


@dataclass(frozen=True)
class ReductionRecord:
    """How a scheduling instance was carved out of a set-cover question.

    ``permutations[k][i]`` is the set index machine i plays during class k,
    and ``job_ids`` maps (class, element) to the job created for it.
    """

    permutations: tuple[tuple[int, ...], ...]
    num_classes: int
    job_ids: dict[tuple[int, int], int]


def class_count(m: int, t: int) -> int:
    """Smallest integer K with 2**(K*t) >= m**m, i.e. ceil((m/t)*log2(m))."""
    target = m**m
    k = 0
    while 2 ** (k * t) < target:
        k += 1
    return k


def _rand_below(rng: random.Random, n: int) -> int:
    # Rejection sampling on raw bits; immune to getrandbits-width quirks.
    bits = n.bit_length()
    while True:
        v = rng.getrandbits(bits)
        if v < n:
            return v


def _permutation(rng: random.Random, m: int) -> tuple[int, ...]:
    order = list(range(m))
    for i in range(m - 1, 0, -1):
        j = _rand_below(rng, i + 1)
        order[i], order[j] = order[j], order[i]
    return tuple(order)


def reduce(sc: SetCoverInstance, seed: int) -> tuple[Instance, ReductionRecord]:
    """Build the K-class scheduling instance for one draw of permutations.

    Jobs are laid out class-major, elements ascending within a class, so the
    instance (and everything downstream) is a pure function of the seed.
    """
    sc.validate()
    m = len(sc.sets)
    if m < 2:
        raise ValueError(f"need at least 2 machines/sets, got {m}")
    k_classes = class_count(m, sc.target)
    rng = random.Random(seed)
    perms = tuple(_permutation(rng, m) for _ in range(k_classes))

    setup_rows = [[1] * m for _ in range(k_classes)]
    job_rows: list[tuple[int, list]] = []
    job_ids: dict[tuple[int, int], int] = {}
    for k in range(k_classes):
        for elem in range(1, sc.n_elements + 1):
            row = [
                Fraction(0) if elem in sc.sets[perms[k][i]] else INF
                for i in range(m)
            ]
            job_ids[(k, elem)] = len(job_rows)
            job_rows.append((k, row))
    instance = Instance.unrelated(setup_rows, job_rows)
    return instance, ReductionRecord(perms, k_classes, job_ids)


def min_cover(sc: SetCoverInstance) -> tuple[int, tuple[int, ...]]:
    """Exhaustive minimum set cover; returns (size, lexicographic witness)."""
    full = (1 << sc.n_elements) - 1
    masks = []
    for s in sc.sets:
        mask = 0
        for elem in s:
            mask |= 1 << (elem - 1)
        masks.append(mask)
    for size in range(1, len(sc.sets) + 1):
        for combo in combinations(range(len(sc.sets)), size):
            acc = 0
            for idx in combo:
                acc |= masks[idx]
            if acc == full:
                return size, combo
    raise CertificationFailed("no cover at all; validate should have caught this")


def witness_schedule(
    sc: SetCoverInstance, record: ReductionRecord, cover: tuple[int, ...]
) -> Schedule:
    """Schedule induced by a cover: per class, jobs ride the cover machines.

    Every element sits in some cover set, and per class exactly one machine
    plays each set, so each job goes to the lowest machine whose current set
    both lies in the cover and contains the element.
    """
    chosen = set(cover)
    assignment = [0] * (record.num_classes * sc.n_elements)
    for k, perm in enumerate(record.permutations):
        for elem in range(1, sc.n_elements + 1):
            host = min(
                i
                for i in range(len(perm))
                if perm[i] in chosen and elem in sc.sets[perm[i]]
            )
            assignment[record.job_ids[(k, elem)]] = host
    return Schedule(tuple(assignment))


def induced_cover(
    record: ReductionRecord, schedule: Schedule, instance: Instance, k: int
) -> frozenset[int]:
    """Set indices bought by class k's hosts under a schedule."""
    hosts = {
        schedule.assignment[j]
        for j, job in enumerate(instance.jobs)
        if job.cls == k
    }
    return frozenset(record.permutations[k][i] for i in hosts)


def _assert_covers(
    sc: SetCoverInstance,
    record: ReductionRecord,
    schedule: Schedule,
    instance: Instance,
    loads: Loads,
) -> None:
    # A finite schedule can only place jobs on machines that cover them.
    if loads.makespan is INF:
        return
    universe = set(range(1, sc.n_elements + 1))
    for k in range(record.num_classes):
        union: set[int] = set()
        for idx in induced_cover(record, schedule, instance, k):
            union |= sc.sets[idx]
        if union != universe:
            raise InternalInvariantViolation(
                f"class {k} hosts do not induce a cover"
            )


@dataclass(frozen=True)
class GapTrial:
    """One seeded draw: what the rounding and the witness each achieved."""

    trial: int
    yes_approx: Fraction
    yes_witness: Fraction
    yes_achieved: Fraction
    no_approx: Fraction


@dataclass(frozen=True)
class GapReport:
    trials: int
    seed: int
    num_classes: int
    machines: int
    target: int
    alpha: int
    yes_cover_size: int
    yes_cover: tuple[int, ...]
    no_cover_size: int
    no_lower_bound: int
    r_bound: float
    rows: tuple[GapTrial, ...]
    yes_within_r: int
    no_bound_exceeds_yes: int


def gap_experiment(
    sc_yes: SetCoverInstance,
    sc_no: SetCoverInstance,
    seed: int,
    trials: int,
) -> GapReport:
    """Certify the pair, then measure the makespan gap over seeded draws.

    Per trial both instances are re-reduced with a fresh permutation draw,
    the YES side is scheduled by randomized rounding and by its certified
    cover, and the NO side's makespan is pinned from below by counting
    setups: each class forces at least (min cover) distinct machines, so
    some machine pays ceil(K * mincover / m).
    """
    yes_size, yes_cover = min_cover(sc_yes)
    if yes_size != sc_yes.target:
        raise CertificationFailed(
            f"YES instance: claimed cover size {sc_yes.target}, found {yes_size}"
        )
    no_size, _ = min_cover(sc_no)
    if no_size < sc_no.alpha * sc_no.target:
        raise CertificationFailed(
            f"NO instance: claimed >= {sc_no.alpha * sc_no.target} sets, found {no_size}"
        )

    m = len(sc_yes.sets)
    k_classes = class_count(m, sc_yes.target)
    no_lower = ceil(Fraction(k_classes * no_size, m))
    if no_lower < Fraction(k_classes * sc_no.alpha * sc_no.target, m):
        raise InternalInvariantViolation("setup-counting bound fell below (K/m)*alpha*t")
    r_bound = 2 * k_classes * e * sc_yes.target / m + 2 * log2(m)

    rows = []
    for trial in range(trials):
        draw = seed + trial
        yes_inst, yes_rec = reduce(sc_yes, draw)
        no_inst, no_rec = reduce(sc_no, draw)

        yes_sched, yes_rep = approx_unrelated(yes_inst, seed=draw)
        _assert_covers(
            sc_yes, yes_rec, yes_sched, yes_inst, compute_loads(yes_inst, yes_sched)
        )
        witness = witness_schedule(sc_yes, yes_rec, yes_cover)
        wit_make = compute_loads(yes_inst, witness).makespan

        no_sched, no_rep = approx_unrelated(no_inst, seed=draw)
        no_loads = compute_loads(no_inst, no_sched)
        _assert_covers(sc_no, no_rec, no_sched, no_inst, no_loads)
        if no_loads.makespan < no_lower:
            raise InternalInvariantViolation(
                f"NO schedule beat the counting bound: {no_loads.makespan} < {no_lower}"
            )

        rows.append(
            GapTrial(
                trial=trial,
                yes_approx=yes_rep.makespan,
                yes_witness=wit_make,
                yes_achieved=min(yes_rep.makespan, wit_make),
                no_approx=no_rep.makespan,
            )
        )

    yes_within_r = sum(1 for row in rows if row.yes_achieved <= r_bound)
    sigma = sqrt(trials) / 2
    if yes_within_r < trials / 2 - 3 * sigma:
        raise InternalInvariantViolation(
            f"YES makespan cleared r in only {yes_within_r}/{trials} trials"
        )
    no_bound_exceeds = sum(1 for row in rows if no_lower > row.yes_achieved)

    return GapReport(
        trials=trials,
        seed=seed,
        num_classes=k_classes,
        machines=m,
        target=sc_yes.target,
        alpha=sc_no.alpha,
        yes_cover_size=yes_size,
        yes_cover=yes_cover,
        no_cover_size=no_size,
        no_lower_bound=no_lower,
        r_bound=r_bound,
        rows=tuple(rows),
        yes_within_r=yes_within_r,
        no_bound_exceeds_yes=no_bound_exceeds,
    )


def bundled_pair() -> tuple[SetCoverInstance, SetCoverInstance]:
    """The shipped certified gap pair: N=12, m=6, t=2, alpha=2.

    YES: two big sets split the universe, four decoys.  NO: every set has
    three elements, so three sets reach at most nine of twelve and any
    cover needs four.
    """
    yes = SetCoverInstance(
        n_elements=12,
        sets=(
            frozenset(range(1, 7)),
            frozenset(range(7, 13)),
            frozenset({1}),
            frozenset({1}),
            frozenset({1}),
            frozenset({1}),
        ),
        target=2,
        alpha=2,
    )
    no = SetCoverInstance(
        n_elements=12,
        sets=(
            frozenset({1, 2, 3}),
            frozenset({4, 5, 6}),
            frozenset({7, 8, 9}),
            frozenset({10, 11, 12}),
            frozenset({1, 4, 7}),
            frozenset({2, 5, 8}),
        ),
        target=2,
        alpha=2,
    )
    return yes, no
