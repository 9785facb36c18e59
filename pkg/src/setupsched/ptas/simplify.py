"""Three-stage instance simplification feeding the dynamic program.

Stage one removes machines too slow to matter and lifts negligible sizes to
a common floor.  Stage two folds jobs tiny relative to their class's setup
into setup-fraction placeholders.  Stage three rounds sizes up onto a
geometric-arithmetic grid and speeds down onto a geometric one.  Each stage
costs at most a bounded factor in makespan, in both directions.

`simplify` composes the stages and additionally rescales all sizes so that
the slowest kept machine has capacity exactly 1 at the guess bound; the
returned record carries everything needed to map a schedule of the
simplified instance back to the original jobs and machines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from setupsched.errors import InternalInvariantViolation
from setupsched.model import Instance, Job, Kind, Schedule, SetupClass
from setupsched.ptas.params import PtasParams, floor_log2, pow2


@dataclass(frozen=True)
class FoldRecord:
    """How stage two replaced tiny jobs, keyed by class.

    ``removed[k]`` lists the folded-away job ids, ``placeholders[k]`` the new
    ids standing in for them, and ``kept`` maps each surviving new id back to
    its source id.
    """

    removed: dict[int, tuple[int, ...]]
    kept: tuple[int, ...]
    placeholders: dict[int, tuple[int, ...]]


@dataclass(frozen=True)
class SimplificationRecord:
    """Undo data for the full pipeline.

    ``kept_machines`` maps simplified machine index to original machine id,
    ``scale`` is the size multiplier applied after stage one, ``t_scaled``
    the guess bound in scaled units and ``t1`` its five-fold inflation (the
    bound the dynamic program must meet).  ``i1`` is the unscaled stage-one
    instance; placeholder capacities during undo are measured against it.
    """

    params: PtasParams
    kept_machines: tuple[int, ...]
    scale: Fraction
    t_scaled: Fraction
    t1: Fraction
    fold: FoldRecord
    original: Instance
    i1: Instance

    @property
    def removed_machines(self) -> tuple[int, ...]:
        kept = set(self.kept_machines)
        return tuple(i for i in range(self.original.m) if i not in kept)

    @property
    def t2(self) -> Fraction:
        """Bound met after realizing a relaxed schedule, scaled units."""
        eps = self.params.eps
        return (1 + eps) ** 3 * (1 + eps**2) * self.t1

    @property
    def t3(self) -> Fraction:
        """Bound met after undoing the fold, scaled units."""
        return (1 + self.params.eps) * self.t2


def _remove_slow_machines(instance: Instance, eps: Fraction) -> tuple[Instance, tuple[int, ...]]:
    vmax = max(instance.speeds)
    cutoff = eps * vmax / instance.m
    kept = tuple(i for i in range(instance.m) if instance.speeds[i] >= cutoff)
    trimmed = Instance(
        kind=instance.kind,
        speeds=tuple(instance.speeds[i] for i in kept),
        classes=instance.classes,
        jobs=instance.jobs,
    )
    return trimmed, kept


def _lift_floor(instance: Instance, floor: Fraction) -> Instance:
    jobs = tuple(Job(j.id, j.cls, max(j.size, floor)) for j in instance.jobs)
    classes = tuple(SetupClass(c.id, max(c.setup, floor)) for c in instance.classes)
    return Instance(kind=instance.kind, speeds=instance.speeds, classes=classes, jobs=jobs)


def _scale_sizes(instance: Instance, c: Fraction) -> Instance:
    jobs = tuple(Job(j.id, j.cls, j.size * c) for j in instance.jobs)
    classes = tuple(SetupClass(k.id, k.setup * c) for k in instance.classes)
    return Instance(kind=instance.kind, speeds=instance.speeds, classes=classes, jobs=jobs)


def _fold_tiny_jobs(instance: Instance, eps: Fraction) -> tuple[Instance, FoldRecord]:
    # class k loses its jobs of size <= eps*s_k; ceil(total / (eps*s_k))
    # placeholders of size exactly eps*s_k take their place
    removed: dict[int, tuple[int, ...]] = {}
    kept: list[int] = []
    new_jobs: list[Job] = []
    for job in instance.jobs:
        if job.size <= eps * instance.classes[job.cls].setup:
            removed.setdefault(job.cls, ())
            removed[job.cls] += (job.id,)
        else:
            kept.append(job.id)
            new_jobs.append(Job(len(new_jobs), job.cls, job.size))
    placeholders: dict[int, tuple[int, ...]] = {}
    for k in sorted(removed):
        unit = eps * instance.classes[k].setup
        total = sum((instance.jobs[j].size for j in removed[k]), Fraction(0))
        ids = []
        for _ in range(math.ceil(total / unit)):
            ids.append(len(new_jobs))
            new_jobs.append(Job(len(new_jobs), k, unit))
        placeholders[k] = tuple(ids)
    folded = Instance(
        kind=instance.kind,
        speeds=instance.speeds,
        classes=instance.classes,
        jobs=tuple(new_jobs),
    )
    return folded, FoldRecord(removed, tuple(kept), placeholders)


def round_size_up(t: Fraction, eps: Fraction) -> Fraction:
    """Next grid point 2**e * (1 + k*eps) at or above t."""
    if t <= 0:
        raise ValueError(f"sizes on the grid must be positive, got {t}")
    base = pow2(floor_log2(t))
    k = math.ceil((t - base) / (eps * base))
    return base * (1 + k * eps)


def round_speed_down(v: Fraction, vmin: Fraction, eps: Fraction) -> Fraction:
    """Largest vmin * (1+eps)**k at or below v."""
    if v < vmin:
        raise ValueError(f"speed {v} below the declared minimum {vmin}")
    rounded = vmin
    while rounded * (1 + eps) <= v:
        rounded *= 1 + eps
    return rounded


def _round_grid(instance: Instance, eps: Fraction) -> Instance:
    vmin = min(instance.speeds)
    jobs = tuple(Job(j.id, j.cls, round_size_up(j.size, eps)) for j in instance.jobs)
    classes = tuple(SetupClass(c.id, round_size_up(c.setup, eps)) for c in instance.classes)
    speeds = tuple(round_speed_down(v, vmin, eps) for v in instance.speeds)
    return Instance(kind=instance.kind, speeds=speeds, classes=classes, jobs=jobs)


def _size_floor(instance: Instance, eps: Fraction, t: Fraction) -> Fraction:
    denom = instance.n + instance.num_classes
    if denom == 0:
        return Fraction(0)
    return eps * min(instance.speeds) * t / denom


def simplify_step1(instance: Instance, params: PtasParams) -> tuple[Instance, tuple[int, ...]]:
    """Drop machines slower than eps/m of the fastest, then lift all sizes
    to the floor eps*vmin*t/(n+K); costs (1+eps)**2 in the guess bound."""
    assert instance.kind in (Kind.IDENTICAL, Kind.UNIFORM)
    trimmed, kept = _remove_slow_machines(instance, params.eps)
    lifted = _lift_floor(trimmed, _size_floor(trimmed, params.eps, params.t))
    return lifted, kept


def simplify_step2(instance: Instance, params: PtasParams) -> tuple[Instance, FoldRecord]:
    """Fold jobs of size <= eps*s_k into placeholders; costs (1+eps)."""
    assert instance.kind in (Kind.IDENTICAL, Kind.UNIFORM)
    return _fold_tiny_jobs(instance, params.eps)


def simplify_step3(instance: Instance, params: PtasParams) -> Instance:
    """Round sizes up and speeds down onto their grids; costs (1+eps)**2."""
    assert instance.kind in (Kind.IDENTICAL, Kind.UNIFORM)
    return _round_grid(instance, params.eps)


def simplify(instance: Instance, params: PtasParams) -> tuple[Instance, SimplificationRecord]:
    """Run all three stages, rescaled so the slowest machine's capacity is 1.

    Sizes are multiplied by 1/(vmin * t) after stage one; folding commutes
    with that, rounding does not, so the scaling happens before stage three
    and the returned instance's grids live in scaled units.
    """
    i1, kept = simplify_step1(instance, params)
    i2, fold = simplify_step2(i1, params)
    vmin = min(i1.speeds)
    scale = 1 / (vmin * params.t)
    i3 = simplify_step3(_scale_sizes(i2, scale), params)
    record = SimplificationRecord(
        params=params,
        kept_machines=kept,
        scale=scale,
        t_scaled=scale * params.t,
        t1=(1 + params.eps) ** 5 * scale * params.t,
        fold=fold,
        original=instance,
        i1=i1,
    )
    return i3, record


def undo_schedule(record: SimplificationRecord, schedule: Schedule) -> Schedule:
    """Map a schedule of the simplified instance back to the original one.

    Surviving jobs follow their own assignment.  Each class's folded jobs
    are poured back into its placeholders in id order, advancing to the next
    placeholder's machine once one has absorbed its own capacity, so every
    placeholder is overpacked by at most one job.
    """
    eps = record.params.eps
    out: dict[int, int] = {}
    for new_id, orig_id in enumerate(record.fold.kept):
        out[orig_id] = record.kept_machines[schedule.assignment[new_id]]
    for k in sorted(record.fold.removed):
        slots = [record.kept_machines[schedule.assignment[pid]] for pid in record.fold.placeholders[k]]
        if not slots:
            raise InternalInvariantViolation(f"class {k} folded jobs but has no placeholders")
        unit = eps * record.i1.classes[k].setup
        at = 0
        absorbed = Fraction(0)
        for j in record.fold.removed[k]:
            if absorbed >= unit and at + 1 < len(slots):
                at += 1
                absorbed = Fraction(0)
            out[j] = slots[at]
            absorbed += record.i1.jobs[j].size
    return Schedule(tuple(out[j] for j in range(record.original.n)))
