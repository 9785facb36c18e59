"""Polynomial-time approximation scheme for uniform machines with setups."""

from setupsched.ptas.classify import (
    Classification,
    Group,
    classify,
    core_group_of,
    group_hi,
    group_lo,
    is_big,
    is_huge,
    is_small,
    native_group,
)
from setupsched.ptas.dp import (
    DEFAULT_MAX_STATES,
    DpState,
    RelaxedSchedule,
    check_relaxed,
    dp_relaxed,
    relaxed_summary,
)
from setupsched.ptas.driver import decide, ptas_uniform
from setupsched.ptas.params import PtasParams, floor_log2, pow2
from setupsched.ptas.realize import realize
from setupsched.ptas.simplify import (
    FoldRecord,
    SimplificationRecord,
    simplify,
    simplify_step1,
    simplify_step2,
    simplify_step3,
    undo_schedule,
)

__all__ = [
    "Classification",
    "DEFAULT_MAX_STATES",
    "DpState",
    "FoldRecord",
    "Group",
    "PtasParams",
    "RelaxedSchedule",
    "SimplificationRecord",
    "check_relaxed",
    "classify",
    "core_group_of",
    "decide",
    "dp_relaxed",
    "floor_log2",
    "group_hi",
    "group_lo",
    "is_big",
    "is_huge",
    "is_small",
    "native_group",
    "pow2",
    "ptas_uniform",
    "realize",
    "relaxed_summary",
    "simplify",
    "simplify_step1",
    "simplify_step2",
    "simplify_step3",
    "undo_schedule",
]
