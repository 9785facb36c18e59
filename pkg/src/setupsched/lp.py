"""Linear programs for a makespan bound T, and the binary-search driver.

Two formulations share one solver:

* the job-level program: assignment fractions x[i,j] and setup fractions
  y[i,k] with per-machine load rows, per-job assignment rows, and linking
  rows y[i,k_j] >= x[i,j];
* the class-level program for class-uniform structure: one fraction
  xbar[i,k] per machine and class, where the setup charge is inflated by
  alpha = max(1, pbar/(T-s)) so that integral schedules stay feasible.

Infinite costs never reach a row: any variable whose cost would be infinite
(or whose placement provably cannot fit under T) is omitted entirely, and a
job or class left without variables makes the bound T infeasible outright.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import ceil, lcm
from typing import Callable

from setupsched import simplex
from setupsched.errors import Infeasible, NotClassUniform
from setupsched.model import INF, Instance, Kind, is_finite

#: Row tags, stable for tests and debugging.
ROW_MACHINE_LOAD = "machine_load"
ROW_ASSIGNMENT = "assignment"
ROW_SETUP_LINK = "setup_link"
ROW_CLASS_LOAD = "class_load"
ROW_CLASS_ASSIGNMENT = "class_assignment"


@dataclass(frozen=True)
class Variable:
    """A column: ``tag`` is "assign" (x), "setup" (y), or "classfrac" (xbar)."""

    name: str
    tag: str
    key: tuple[int, int]
    upper: Fraction | None


@dataclass(frozen=True)
class Row:
    coeffs: dict[int, Fraction]
    sense: str
    rhs: Fraction
    tag: str

    def __post_init__(self):
        assert all(is_finite(v) for v in self.coeffs.values())


@dataclass(frozen=True)
class LinearProgram:
    variables: tuple[Variable, ...]
    rows: tuple[Row, ...]
    objective: dict[int, Fraction] | None = None

    def var_index(self) -> dict[tuple[str, tuple[int, int]], int]:
        return {(v.tag, v.key): idx for idx, v in enumerate(self.variables)}


class LpStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    values: tuple[Fraction, ...] | None
    basis: tuple[int, ...] | None
    objective_value: Fraction | None

    def by_key(self, lp: LinearProgram, tag: str) -> dict[tuple[int, int], Fraction]:
        """Nonzero values of one variable family, keyed by (machine, other)."""
        assert self.values is not None
        return {
            v.key: self.values[idx]
            for idx, v in enumerate(lp.variables)
            if v.tag == tag and self.values[idx] != 0
        }


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Exact basic solution: Optimal with an objective, else Feasible."""
    rows = [(r.coeffs, r.sense, r.rhs) for r in lp.rows]
    # upper bounds become explicit rows; assignment equalities already imply
    # x <= 1, so only setup variables contribute here
    for idx, v in enumerate(lp.variables):
        if v.upper is not None and not _upper_implied(lp, idx):
            rows.append(({idx: Fraction(1)}, "<=", v.upper))
    res = simplex.solve(len(lp.variables), rows, lp.objective)
    if res.status == "infeasible":
        return LpSolution(LpStatus.INFEASIBLE, None, None, None)
    status = LpStatus.OPTIMAL if lp.objective is not None else LpStatus.FEASIBLE
    return LpSolution(status, res.values, res.basis, res.objective_value)


def _upper_implied(lp: LinearProgram, idx: int) -> bool:
    # a variable in an all-positive equality row with rhs <= upper stays below
    # its bound automatically
    v = lp.variables[idx]
    for row in lp.rows:
        if (
            row.sense == "="
            and idx in row.coeffs
            and row.rhs <= v.upper * row.coeffs[idx]
            and all(c > 0 for c in row.coeffs.values())
        ):
            return True
    return False


# -- job-level program -----------------------------------------------------


def build_lp_um(instance: Instance, T: Fraction, with_class_rows: bool = False) -> LinearProgram:
    """Feasibility program over x[i,j] and y[i,k] at makespan bound T.

    Omits x[i,j] when p_ij > T (or infinite) and y[i,k] when s_ik is
    infinite; a job losing all its variables raises Infeasible.  With
    ``with_class_rows`` the per-(machine, class) load rows are added and the
    omission rules tighten to p_ij + s_ik > T and s_ik > T, which is the
    strengthening the class-level feasibility mapping relies on.
    """
    assert instance.kind in (Kind.UNRELATED, Kind.RESTRICTED)
    m, n = instance.m, instance.n
    variables: list[Variable] = []
    vid: dict[tuple[str, int, int], int] = {}

    def add(tag: str, i: int, other: int) -> int:
        idx = len(variables)
        variables.append(Variable(f"{tag}[{i},{other}]", tag, (i, other), Fraction(1)))
        vid[(tag, i, other)] = idx
        return idx

    for i in range(m):
        for k in range(instance.num_classes):
            s = instance.setup(i, k)
            if s is INF:
                continue
            if with_class_rows and s > T:
                continue
            add("setup", i, k)
    for j in range(n):
        k = instance.jobs[j].cls
        for i in range(m):
            p = instance.proc(i, j)
            if p is INF or p > T or ("setup", i, k) not in vid:
                continue
            if with_class_rows and p + instance.setup(i, k) > T:
                continue
            add("assign", i, j)
        if not any(("assign", i, j) in vid for i in range(m)):
            raise Infeasible(f"job {j} fits on no machine at bound {T}")

    rows: list[Row] = []
    for i in range(m):
        coeffs: dict[int, Fraction] = {}
        for j in range(n):
            idx = vid.get(("assign", i, j))
            if idx is not None:
                coeffs[idx] = instance.proc(i, j)
        for k in range(instance.num_classes):
            idx = vid.get(("setup", i, k))
            if idx is not None and instance.setup(i, k) != 0:
                coeffs[idx] = instance.setup(i, k)
        rows.append(Row(coeffs, "<=", T, ROW_MACHINE_LOAD))
    for j in range(n):
        coeffs = {vid[("assign", i, j)]: Fraction(1) for i in range(m) if ("assign", i, j) in vid}
        rows.append(Row(coeffs, "=", Fraction(1), ROW_ASSIGNMENT))
    for j in range(n):
        k = instance.jobs[j].cls
        for i in range(m):
            x = vid.get(("assign", i, j))
            if x is None:
                continue
            y = vid[("setup", i, k)]
            rows.append(Row({y: Fraction(1), x: Fraction(-1)}, ">=", Fraction(0), ROW_SETUP_LINK))
    if with_class_rows:
        for i in range(m):
            for k in range(instance.num_classes):
                y = vid.get(("setup", i, k))
                if y is None:
                    continue
                coeffs = {}
                for job in instance.jobs:
                    if job.cls != k:
                        continue
                    x = vid.get(("assign", i, job.id))
                    if x is not None:
                        coeffs[x] = instance.proc(i, job.id)
                s = instance.setup(i, k)
                coeffs[y] = coeffs.get(y, Fraction(0)) + s - T
                if coeffs[y] == 0:
                    del coeffs[y]
                if coeffs:
                    rows.append(Row(coeffs, "<=", Fraction(0), ROW_CLASS_LOAD))
    return LinearProgram(tuple(variables), tuple(rows))


# -- class-level program ---------------------------------------------------


def check_class_uniform(instance: Instance, variant: str) -> None:
    """Raise NotClassUniform unless the structural precondition holds."""
    if variant == "":
        if instance.kind is not Kind.RESTRICTED:
            raise NotClassUniform("class-level program needs the restricted kind")
        for k in range(instance.num_classes):
            eligibles = {job.eligible for job in instance.jobs if job.cls == k}
            if len(eligibles) > 1:
                raise NotClassUniform(f"class {k} jobs have differing eligible sets")
    elif variant == "class-uniform-pt":
        if instance.kind is not Kind.UNRELATED:
            raise NotClassUniform("per-machine-times program needs the unrelated kind")
        for k in range(instance.num_classes):
            rows = {tuple(job.sizes) for job in instance.jobs if job.cls == k}
            if len(rows) > 1:
                raise NotClassUniform(f"class {k} jobs have differing time vectors")
    else:
        raise ValueError(f"unknown variant {variant!r}")


def class_workloads(instance: Instance, k: int):
    """Per-machine total workload of class k, INF where any job is infinite."""
    out = []
    for i in range(instance.m):
        total = Fraction(0)
        for job in instance.jobs:
            if job.cls != k:
                continue
            p = instance.proc(i, job.id)
            if p is INF:
                total = INF
                break
            total = total + p
        out.append(total)
    return out


def build_lp_ra(instance: Instance, T: Fraction, variant: str = "") -> LinearProgram:
    """Class-fraction program: loads inflated by alpha = max(1, pbar/(T-s)).

    Variables exist only where the class can actually run under T: the plain
    variant drops machines with s_ik >= T (alpha would divide by zero at
    equality, and such a machine can host no setup plus work anyway); the
    "class-uniform-pt" variant instead drops machines where setup plus the
    common job size exceeds T.  Classes without jobs get no variables or
    rows.  A nonempty class with no variables raises Infeasible.
    """
    check_class_uniform(instance, variant)
    m = instance.m
    variables: list[Variable] = []
    vid: dict[tuple[int, int], int] = {}
    alphas: dict[tuple[int, int], Fraction] = {}
    pbars: dict[tuple[int, int], Fraction] = {}
    nonempty = sorted({job.cls for job in instance.jobs})
    for k in nonempty:
        workloads = class_workloads(instance, k)
        for i in range(m):
            s = instance.setup(i, k)
            pbar = workloads[i]
            if s is INF or pbar is INF:
                continue
            if variant == "class-uniform-pt":
                sizes = [instance.proc(i, job.id) for job in instance.jobs if job.cls == k]
                if any(s + p > T for p in sizes):
                    continue
            elif s >= T:
                continue
            idx = len(variables)
            variables.append(Variable(f"classfrac[{i},{k}]", "classfrac", (i, k), None))
            vid[(i, k)] = idx
            pbars[(i, k)] = pbar
            alphas[(i, k)] = max(Fraction(1), pbar / (T - s)) if s < T else Fraction(1)
        if not any((i, k) in vid for i in range(m)):
            raise Infeasible(f"class {k} fits on no machine at bound {T}")

    rows: list[Row] = []
    for i in range(m):
        coeffs = {}
        for k in nonempty:
            idx = vid.get((i, k))
            if idx is None:
                continue
            weight = pbars[(i, k)] + alphas[(i, k)] * instance.setup(i, k)
            if weight:
                coeffs[idx] = weight
        rows.append(Row(coeffs, "<=", T, ROW_MACHINE_LOAD))
    for k in nonempty:
        coeffs = {vid[(i, k)]: Fraction(1) for i in range(m) if (i, k) in vid}
        rows.append(Row(coeffs, "=", Fraction(1), ROW_CLASS_ASSIGNMENT))
    return LinearProgram(tuple(variables), tuple(rows))


# -- binary search over the makespan bound ---------------------------------


def search_grid(instance: Instance) -> Fraction:
    """Grid spacing on which exact termination is guaranteed: integral data
    searches integers, otherwise multiples of the common denominator."""
    denoms = []
    for j in range(instance.n):
        for i in range(instance.m):
            p = instance.proc(i, j)
            if is_finite(p):
                denoms.append(p.denominator)
    for k in range(instance.num_classes):
        for i in range(instance.m):
            s = instance.setup(i, k)
            if is_finite(s):
                denoms.append(s.denominator)
    if not denoms:
        return Fraction(1)
    return Fraction(1, lcm(*denoms))


def dual_search(decider: Callable[[Fraction], object], lo: Fraction, hi: Fraction, grid: Fraction):
    """Smallest multiple of ``grid`` accepted by a monotone decider.

    Probes the lattice of grid multiples from the first point at or above
    lo to the first at or above hi; achievable makespans are lattice points,
    which a lo-anchored walk would miss whenever lo itself (say an averaged
    volume bound) falls between them.  The decider either returns its result
    for bound T or raises Infeasible; whatever it returned at T* is handed
    back.  Failure at the top of the interval propagates (the caller
    promised hi is feasible).
    """
    lo_idx = ceil(lo / grid)
    hi_idx = max(lo_idx, ceil(hi / grid))
    best = None
    best_idx = None
    while lo_idx < hi_idx:
        mid = (lo_idx + hi_idx) // 2
        try:
            best = decider(mid * grid)
            best_idx = mid
            hi_idx = mid
        except Infeasible:
            lo_idx = mid + 1
    if best_idx != lo_idx:
        best = decider(lo_idx * grid)
    return best
