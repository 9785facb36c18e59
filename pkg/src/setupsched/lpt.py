"""Longest-processing-time heuristic adapted to setup classes.

Jobs smaller than their class's setup are merged into setup-sized
placeholders first; classic LPT (ignoring setups) places everything; the
placeholders are then unfolded back onto the machines they landed on.  The
makespan stays within a constant factor of optimal on uniform machines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from setupsched.model import Instance, Job, Kind, Schedule


@dataclass(frozen=True)
class PlaceholderMap:
    """Bookkeeping to undo `replace_small_jobs`.

    ``removed[k]`` holds the original ids of class-k jobs that were folded
    away, ``counts[k]`` how many setup-sized placeholders stand in for them,
    ``kept`` the original id of each surviving job (indexed by new id), and
    ``placeholders[k]`` the new ids of class k's placeholders.
    """

    removed: dict[int, tuple[int, ...]]
    counts: dict[int, int]
    kept: tuple[int, ...]
    placeholders: dict[int, tuple[int, ...]]


def replace_small_jobs(instance: Instance) -> tuple[Instance, PlaceholderMap]:
    """Fold jobs with p_j < s_k into ceil(sum/s_k) placeholders of size s_k."""
    assert instance.kind in (Kind.IDENTICAL, Kind.UNIFORM)
    removed: dict[int, tuple[int, ...]] = {}
    counts: dict[int, int] = {}
    kept: list[int] = []
    new_jobs: list[Job] = []
    for job in instance.jobs:
        if job.size < instance.classes[job.cls].setup:
            removed.setdefault(job.cls, ())
            removed[job.cls] += (job.id,)
        else:
            kept.append(job.id)
            new_jobs.append(Job(len(new_jobs), job.cls, job.size))
    placeholders: dict[int, tuple[int, ...]] = {}
    for k in sorted(removed):
        s = instance.classes[k].setup
        total = sum((instance.jobs[j].size for j in removed[k]), Fraction(0))
        counts[k] = math.ceil(total / s)
        ids = []
        for _ in range(counts[k]):
            ids.append(len(new_jobs))
            new_jobs.append(Job(len(new_jobs), k, s))
        placeholders[k] = tuple(ids)
    folded = Instance(
        kind=instance.kind,
        speeds=instance.speeds,
        classes=instance.classes,
        jobs=tuple(new_jobs),
    )
    return folded, PlaceholderMap(removed, counts, tuple(kept), placeholders)


def _classic_lpt(instance: Instance) -> list[int]:
    # nonincreasing size, ties by job id; each job to the machine where it
    # finishes first, ties by machine id; setups play no part here
    order = sorted(range(instance.n), key=lambda j: (-instance.jobs[j].size, j))
    work = [Fraction(0)] * instance.m
    out = [0] * instance.n
    for j in order:
        p = instance.jobs[j].size
        i = min(range(instance.m), key=lambda i: ((work[i] + p) / instance.speeds[i], i))
        out[j] = i
        work[i] += p
    return out


def lpt_uniform(instance: Instance) -> Schedule:
    """LPT with placeholder folding; returns a schedule for the original jobs."""
    assert instance.kind in (Kind.IDENTICAL, Kind.UNIFORM)
    folded, pmap = replace_small_jobs(instance)
    placed = _classic_lpt(folded)

    assignment: dict[int, int] = {}
    for new_id, orig_id in enumerate(pmap.kept):
        assignment[orig_id] = placed[new_id]

    # unfold each class: walk its placeholders in placement order, packing the
    # removed jobs (id order) until a placeholder has absorbed its own size
    hosts_class: list[set[int]] = [set() for _ in range(instance.m)]
    for orig_id, i in assignment.items():
        hosts_class[i].add(instance.jobs[orig_id].cls)
    for k in sorted(pmap.removed):
        s = instance.classes[k].setup
        slots = [placed[pid] for pid in pmap.placeholders.get(k, ())]
        if not slots:
            # all folded jobs had size zero: park each where it grows the
            # finish time least (a setup, or nothing if the class is present)
            for j in pmap.removed[k]:
                i = min(
                    range(instance.m),
                    key=lambda i: (
                        Fraction(0) if k in hosts_class[i] else instance.classes[k].setup / instance.speeds[i],
                        i,
                    ),
                )
                assignment[j] = i
                hosts_class[i].add(k)
            continue
        at = 0
        absorbed = Fraction(0)
        for j in pmap.removed[k]:
            if absorbed >= s and at + 1 < len(slots):
                at += 1
                absorbed = Fraction(0)
            assignment[j] = slots[at]
            hosts_class[slots[at]].add(k)
            absorbed += instance.jobs[j].size

    return Schedule(tuple(assignment[j] for j in range(instance.n)))
