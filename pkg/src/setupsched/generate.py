"""Seeded random instance generators for benchmarks and tests."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from setupsched.model import INF, Instance, Job, Kind, SetupClass, frac

#: Generator variants with extra structure:
#:   "class-uniform"     restricted kind, one eligible set per class
#:   "class-uniform-pt"  unrelated kind, per-machine times shared within a class
VARIANTS = ("", "class-uniform", "class-uniform-pt")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: Kind
    n: int
    m: int
    num_classes: int
    size_range: tuple[int, int] = (1, 9)
    setup_range: tuple[int, int] = (0, 4)
    speed_range: tuple[int, int] = (1, 4)
    variant: str = ""
    inf_prob: Fraction = field(default_factory=lambda: Fraction(0))


def generate(spec: GeneratorSpec, seed: int) -> Instance:
    """Draw a valid instance; equal seeds give equal instances."""
    rng = random.Random(seed)
    draw_size = lambda: rng.randint(*spec.size_range)
    draw_setup = lambda: rng.randint(*spec.setup_range)
    classes_of_jobs = [rng.randrange(spec.num_classes) for _ in range(spec.n)]

    if spec.kind is Kind.IDENTICAL:
        return Instance.identical(
            spec.m,
            setups=[draw_setup() for _ in range(spec.num_classes)],
            jobs=[(k, draw_size()) for k in classes_of_jobs],
        )

    if spec.kind is Kind.UNIFORM:
        return Instance.uniform(
            [rng.randint(*spec.speed_range) for _ in range(spec.m)],
            setups=[draw_setup() for _ in range(spec.num_classes)],
            jobs=[(k, draw_size()) for k in classes_of_jobs],
        )

    if spec.kind is Kind.RESTRICTED:
        def subset() -> frozenset[int]:
            picks = [i for i in range(spec.m) if rng.random() < 0.5]
            return frozenset(picks or [rng.randrange(spec.m)])

        if spec.variant == "class-uniform":
            per_class = [subset() for _ in range(spec.num_classes)]
            eligibles = [per_class[k] for k in classes_of_jobs]
        else:
            eligibles = [subset() for _ in range(spec.n)]
        return Instance.restricted(
            spec.m,
            setups=[draw_setup() for _ in range(spec.num_classes)],
            jobs=[(k, draw_size(), el) for k, el in zip(classes_of_jobs, eligibles)],
        )

    # unrelated: per-machine entries, optionally with infinities; every row
    # keeps at least one finite entry so instances stay feasible
    def row(value_draw) -> list:
        anchor = rng.randrange(spec.m)
        out = []
        for i in range(spec.m):
            if i != anchor and rng.random() < spec.inf_prob:
                out.append(INF)
            else:
                out.append(frac(value_draw()))
        return out

    setup_rows = [row(draw_setup) for _ in range(spec.num_classes)]
    if spec.variant == "class-uniform-pt":
        class_rows = [row(draw_size) for _ in range(spec.num_classes)]
        job_rows = [(k, list(class_rows[k])) for k in classes_of_jobs]
    else:
        job_rows = [(k, row(draw_size)) for k in classes_of_jobs]
    return Instance.unrelated(setup_rows, job_rows)
