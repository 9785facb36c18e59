"""Read and write instances as canonical JSON.

One document format covers all four kinds plus set-cover instances (used by
the hardness experiments).  The writer is canonical: field order is fixed
(kind, machines, classes, jobs), rationals render as "num/den" with the
denominator dropped when 1, infinities as "inf", and the byte output of
``write_instance`` after ``parse_instance`` reproduces a canonical file
exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from setupsched.errors import ParseError, ValidationError
from setupsched.hardness import SetCoverInstance
from setupsched.model import (
    INF,
    Cost,
    Instance,
    Job,
    Kind,
    Schedule,
    SetupClass,
    validate,
)

_KINDS = {k.value: k for k in Kind}


def _cost_str(x: Cost) -> str:
    return "inf" if x is INF else str(x)


def _parse_cost(raw: object, field: str, allow_inf: bool) -> Cost:
    """Accept "num/den" strings, bare ints, and (where legal) "inf"."""
    if raw == "inf":
        if not allow_inf:
            raise ParseError("infinity is not allowed here", field=field)
        return INF
    if isinstance(raw, bool) or isinstance(raw, float):
        raise ParseError(
            f"expected an exact rational like \"27/10\", got {raw!r}", field=field
        )
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational {raw!r}", field=field) from None
    raise ParseError(f"expected a rational, got {type(raw).__name__}", field=field)


def _expect(doc: dict, key: str, typ: type, where: str = "") -> object:
    field = f"{where}.{key}" if where else key
    if key not in doc:
        raise ParseError("missing field", field=field)
    value = doc[key]
    if not isinstance(value, typ) or isinstance(value, bool):
        raise ParseError(f"expected {typ.__name__}, got {type(value).__name__}", field=field)
    return value


def _cost_list(doc: dict, key: str, where: str, m: int, allow_inf: bool) -> tuple[Cost, ...]:
    raw = _expect(doc, key, list, where)
    if len(raw) != m:
        raise ParseError(f"expected {m} entries, got {len(raw)}", field=f"{where}.{key}")
    return tuple(
        _parse_cost(x, f"{where}.{key}[{i}]", allow_inf) for i, x in enumerate(raw)
    )


def _parse_machines(doc: dict, kind: Kind) -> tuple[Fraction, ...]:
    machines = _expect(doc, "machines", dict)
    if "speeds" in machines:
        raw = _expect(machines, "speeds", list, "machines")
        speeds = []
        for i, x in enumerate(raw):
            v = _parse_cost(x, f"machines.speeds[{i}]", allow_inf=False)
            speeds.append(v)
        return tuple(speeds)
    if "count" in machines:
        count = _expect(machines, "count", int, "machines")
        if count < 0:
            raise ParseError("machine count must be >= 0", field="machines.count")
        return tuple(Fraction(1) for _ in range(count))
    raise ParseError("needs either \"count\" or \"speeds\"", field="machines")


def _check_id(doc: dict, key: str, position: int, where: str) -> None:
    """Ids are optional; when present they must equal the list position."""
    if key in doc and doc[key] != position:
        raise ParseError(
            f"id {doc[key]!r} does not match position {position}", field=f"{where}.{key}"
        )


def _parse_classes(doc: dict, kind: Kind, m: int) -> tuple[SetupClass, ...]:
    raw = _expect(doc, "classes", list)
    classes = []
    for k, entry in enumerate(raw):
        where = f"classes[{k}]"
        if not isinstance(entry, dict):
            raise ParseError("each class must be an object", field=where)
        _check_id(entry, "id", k, where)
        if kind is Kind.UNRELATED:
            setups = _cost_list(entry, "setups", where, m, allow_inf=True)
            classes.append(SetupClass(k, setups=setups))
        else:
            setup = _parse_cost(_expect(entry, "setup", object, where), f"{where}.setup", False)
            classes.append(SetupClass(k, setup=setup))
    return tuple(classes)


def _parse_jobs(doc: dict, kind: Kind, m: int, num_classes: int) -> tuple[Job, ...]:
    raw = _expect(doc, "jobs", list)
    jobs = []
    for j, entry in enumerate(raw):
        where = f"jobs[{j}]"
        if not isinstance(entry, dict):
            raise ParseError("each job must be an object", field=where)
        _check_id(entry, "id", j, where)
        cls = _expect(entry, "class", int, where)
        if not 0 <= cls < num_classes:
            raise ParseError(f"class {cls} out of range", field=f"{where}.class")
        if kind is Kind.UNRELATED:
            sizes = _cost_list(entry, "sizes", where, m, allow_inf=True)
            jobs.append(Job(j, cls, sizes=sizes))
        else:
            size = _parse_cost(_expect(entry, "size", object, where), f"{where}.size", False)
            if kind is Kind.RESTRICTED:
                eligible = _expect(entry, "eligible", list, where)
                machines = []
                for pos, i in enumerate(eligible):
                    if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < m:
                        raise ParseError(
                            f"bad machine id {i!r}", field=f"{where}.eligible[{pos}]"
                        )
                    machines.append(i)
                jobs.append(Job(j, cls, size, eligible=frozenset(machines)))
            else:
                jobs.append(Job(j, cls, size))
    return tuple(jobs)


def _load_document(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    return doc


def parse_instance(path: str | Path) -> Instance:
    """Load an instance file, raising ParseError or ValidationError."""
    doc = _load_document(Path(path))
    kind_raw = _expect(doc, "kind", str)
    if kind_raw not in _KINDS:
        raise ParseError(
            f"unknown kind {kind_raw!r}; expected one of {sorted(_KINDS)}", field="kind"
        )
    kind = _KINDS[kind_raw]
    speeds = _parse_machines(doc, kind)
    classes = _parse_classes(doc, kind, len(speeds))
    jobs = _parse_jobs(doc, kind, len(speeds), len(classes))
    instance = Instance(kind=kind, speeds=speeds, classes=classes, jobs=jobs)
    violations = validate(instance)
    if violations:
        raise ValidationError(violations)
    return instance


def _instance_doc(instance: Instance) -> dict:
    if instance.kind is Kind.UNIFORM:
        machines: dict = {"speeds": [_cost_str(v) for v in instance.speeds]}
    else:
        machines = {"count": instance.m}
    classes = []
    for cls in instance.classes:
        entry: dict = {"id": cls.id}
        if cls.setups is not None:
            entry["setups"] = [_cost_str(s) for s in cls.setups]
        else:
            entry["setup"] = _cost_str(cls.setup)
        classes.append(entry)
    jobs = []
    for job in instance.jobs:
        entry = {"id": job.id, "class": job.cls}
        if job.sizes is not None:
            entry["sizes"] = [_cost_str(p) for p in job.sizes]
        else:
            entry["size"] = _cost_str(job.size)
        if job.eligible is not None:
            entry["eligible"] = sorted(job.eligible)
        jobs.append(entry)
    return {
        "kind": instance.kind.value,
        "machines": machines,
        "classes": classes,
        "jobs": jobs,
    }


def write_instance(instance: Instance, path: str | Path) -> None:
    """Write the canonical form: fixed key order, 2-space indent, newline at EOF."""
    text = json.dumps(_instance_doc(instance), indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def parse_schedule(path: str | Path, instance: Instance) -> Schedule:
    """Load a schedule (a job-id indexed array of machine ids)."""
    doc = _load_document_any(Path(path))
    if not isinstance(doc, list):
        raise ParseError("a schedule file holds one array of machine ids")
    if len(doc) != instance.n:
        raise ParseError(f"expected {instance.n} entries, got {len(doc)}")
    for j, i in enumerate(doc):
        if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < instance.m:
            raise ParseError(f"bad machine id {i!r}", field=f"[{j}]")
    return Schedule(tuple(doc))


def _load_document_any(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None


def write_schedule(schedule: Schedule, path: str | Path) -> None:
    text = json.dumps(list(schedule.assignment)) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def parse_setcover(path: str | Path) -> SetCoverInstance:
    """Load a set-cover instance (the gap experiment's input format)."""
    doc = _load_document(Path(path))
    kind = _expect(doc, "kind", str)
    if kind != "setcover":
        raise ParseError(f"expected kind \"setcover\", got {kind!r}", field="kind")
    universe = _expect(doc, "universe", int)
    raw_sets = _expect(doc, "sets", list)
    sets = []
    for s, entry in enumerate(raw_sets):
        if not isinstance(entry, list):
            raise ParseError("each set must be an array", field=f"sets[{s}]")
        for pos, e in enumerate(entry):
            if not isinstance(e, int) or isinstance(e, bool):
                raise ParseError(f"bad element {e!r}", field=f"sets[{s}][{pos}]")
        sets.append(frozenset(entry))
    sc = SetCoverInstance(
        n_elements=universe,
        sets=tuple(sets),
        target=_expect(doc, "target", int),
        alpha=_expect(doc, "alpha", int),
    )
    try:
        sc.validate()
    except ValueError as exc:
        raise ValidationError([exc]) from None
    return sc


def write_setcover(sc: SetCoverInstance, path: str | Path) -> None:
    doc = {
        "kind": "setcover",
        "universe": sc.n_elements,
        "sets": [sorted(s) for s in sc.sets],
        "target": sc.target,
        "alpha": sc.alpha,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
