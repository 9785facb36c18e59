"""Command-line harness: solve one instance, bench a grid, run the gap experiment.

Output is CSV on stdout (exact rationals; one header line) for the solver
subcommands and an aligned table for ``gap``.  Exit codes: 0 success, 2
infeasible instance, 1 anything else.  ``SCHED_SEED`` supplies the default
seed.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from setupsched.errors import (
    BudgetExceeded,
    CertificationFailed,
    Infeasible,
    InternalInvariantViolation,
    NotClassUniform,
    ParseError,
    ValidationError,
)
from setupsched.generate import VARIANTS, GeneratorSpec, generate
from setupsched.hardness import gap_experiment
from setupsched.lpt import lpt_uniform
from setupsched.model import Instance, Kind, Schedule, compute_loads
from setupsched.oracle import OracleLimits, exact_makespan
from setupsched.ptas import ptas_uniform
from setupsched.report import SolveReport
from setupsched.round_special import approx_cupt, approx_ra
from setupsched.round_unrelated import approx_unrelated
from setupsched.serialize import parse_instance, parse_setcover, write_schedule

COLUMNS = ("instance_id", "solver", "n", "m", "K", "makespan", "oracle", "ratio", "seed", "ms")

#: Epsilon values the command line accepts; the library itself takes any 1/q.
CLI_EPSILONS = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract reserves 2 for infeasible."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def default_seed() -> int:
    raw = os.environ.get("SCHED_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SCHED_SEED must be an integer, got {raw!r}") from None


# -- solver registry -------------------------------------------------------


def parse_solver_spec(spec: str) -> tuple[str, dict[str, str]]:
    """Split "name" or "name:k=v,k=v" into the name and its parameters."""
    name, _, raw = spec.partition(":")
    params: dict[str, str] = {}
    if raw:
        for part in raw.split(","):
            key, eq, value = part.partition("=")
            if not eq or not key or not value:
                raise UsageError(f"bad solver parameter {part!r} in {spec!r}")
            params[key] = value
    return name, params


def _reject_unknown(name: str, params: dict[str, str], allowed: set[str]) -> None:
    for key in params:
        if key not in allowed:
            raise UsageError(f"solver {name!r} takes no parameter {key!r}")


def run_solver(spec: str, instance: Instance, seed: int) -> tuple[Schedule, SolveReport]:
    name, params = parse_solver_spec(spec)
    if name == "lpt":
        _reject_unknown(name, params, set())
        if instance.kind not in (Kind.IDENTICAL, Kind.UNIFORM):
            raise UsageError(f"solver lpt handles identical/uniform, not {instance.kind.value}")
        start = time.perf_counter()
        schedule = lpt_uniform(instance)
        report = SolveReport(
            solver="lpt",
            makespan=compute_loads(instance, schedule).makespan,
            ms=(time.perf_counter() - start) * 1000.0,
        )
        return schedule, report
    if name == "ptas":
        _reject_unknown(name, params, {"eps"})
        if instance.kind not in (Kind.IDENTICAL, Kind.UNIFORM):
            raise UsageError(f"solver ptas handles identical/uniform, not {instance.kind.value}")
        try:
            eps = Fraction(params.get("eps", "1/2"))
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad eps {params.get('eps')!r}") from None
        if eps not in CLI_EPSILONS:
            choices = ", ".join(str(e) for e in CLI_EPSILONS)
            raise UsageError(f"eps must be one of {choices}, got {eps}")
        return ptas_uniform(instance, eps)
    if name == "unrelated":
        _reject_unknown(name, params, {"c"})
        if instance.kind not in (Kind.UNRELATED, Kind.RESTRICTED):
            raise UsageError(
                f"solver unrelated handles unrelated/restricted, not {instance.kind.value}"
            )
        try:
            c = int(params.get("c", "3"))
        except ValueError:
            raise UsageError(f"bad c {params.get('c')!r}") from None
        return approx_unrelated(instance, c=c, seed=seed)
    if name == "ra":
        _reject_unknown(name, params, set())
        return approx_ra(instance)
    if name == "cupt":
        _reject_unknown(name, params, set())
        return approx_cupt(instance)
    if name == "oracle":
        _reject_unknown(name, params, set())
        start = time.perf_counter()
        opt, schedule = exact_makespan(instance)
        report = SolveReport(
            solver="oracle",
            makespan=opt,
            oracle_ratio=Fraction(1),
            ms=(time.perf_counter() - start) * 1000.0,
        )
        return schedule, report
    raise UsageError(f"unknown solver {name!r}")


# -- generator and seed grammars -------------------------------------------


def parse_gen_spec(raw: str) -> GeneratorSpec:
    """Grammar: kind[:key=value,...] with keys n, m, K, size, setup, speed, inf, variant."""
    kind_raw, _, rest = raw.partition(":")
    kinds = {k.value: k for k in Kind}
    if kind_raw not in kinds:
        raise UsageError(f"unknown kind {kind_raw!r}; expected one of {sorted(kinds)}")
    fields = {"n": 6, "m": 2, "K": 2}
    ranges: dict[str, tuple[int, int]] = {}
    inf_prob = Fraction(0)
    variant = ""
    if rest:
        for part in rest.split(","):
            key, eq, value = part.partition("=")
            if not eq:
                raise UsageError(f"bad generator parameter {part!r}")
            if key in fields:
                try:
                    fields[key] = int(value)
                except ValueError:
                    raise UsageError(f"bad integer {value!r} for {key}") from None
            elif key in ("size", "setup", "speed"):
                lo, sep, hi = value.partition("..")
                if not sep:
                    raise UsageError(f"{key} wants a range like 1..9, got {value!r}")
                try:
                    ranges[key] = (int(lo), int(hi))
                except ValueError:
                    raise UsageError(f"bad range {value!r} for {key}") from None
            elif key == "inf":
                try:
                    inf_prob = Fraction(value)
                except (ValueError, ZeroDivisionError):
                    raise UsageError(f"bad probability {value!r}") from None
            elif key == "variant":
                if value not in VARIANTS:
                    raise UsageError(f"unknown variant {value!r}")
                variant = value
            else:
                raise UsageError(f"unknown generator parameter {key!r}")
    kwargs = {}
    for src, dst in (("size", "size_range"), ("setup", "setup_range"), ("speed", "speed_range")):
        if src in ranges:
            kwargs[dst] = ranges[src]
    return GeneratorSpec(
        kind=kinds[kind_raw],
        n=fields["n"],
        m=fields["m"],
        num_classes=fields["K"],
        inf_prob=inf_prob,
        variant=variant,
        **kwargs,
    )


def parse_seeds(raw: str) -> list[int]:
    """Grammar: "7", "1..20" (inclusive), or a comma list of either."""
    seeds: list[int] = []
    for part in raw.split(","):
        lo, sep, hi = part.partition("..")
        try:
            if sep:
                a, b = int(lo), int(hi)
                if b < a:
                    raise UsageError(f"empty seed range {part!r}")
                seeds.extend(range(a, b + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise UsageError(f"bad seed {part!r}") from None
    return seeds


# -- rows ------------------------------------------------------------------


def _rational(x) -> str:
    return "" if x is None else str(x)


def _row(
    instance_id: str,
    solver_spec: str,
    instance: Instance,
    schedule: Schedule,
    report: SolveReport,
    seed: int,
    stable: bool,
    oracle_value: Fraction | None,
) -> list[str]:
    makespan = compute_loads(instance, schedule).makespan
    if makespan != report.makespan:
        raise InternalInvariantViolation(
            f"solver {solver_spec} reported {report.makespan}, schedule yields {makespan}"
        )
    ratio = None
    if oracle_value is not None:
        ratio = Fraction(1) if oracle_value == 0 else makespan / oracle_value
        if ratio < 1:
            raise InternalInvariantViolation(
                f"solver {solver_spec} beat the oracle: {makespan} < {oracle_value}"
            )
    return [
        instance_id,
        solver_spec,
        str(instance.n),
        str(instance.m),
        str(instance.num_classes),
        _rational(makespan),
        _rational(oracle_value),
        _rational(ratio),
        str(seed),
        "0.000" if stable else f"{report.ms:.3f}",
    ]


def _emit(rows: list[list[str]]) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(COLUMNS)
    writer.writerows(rows)


# -- subcommands -----------------------------------------------------------


def _cmd_solve(args) -> int:
    instance = parse_instance(args.input)
    seed = args.seed if args.seed is not None else default_seed()
    schedule, report = run_solver(args.solver, instance, seed)
    oracle_value = exact_makespan(instance)[0] if args.oracle else None
    instance_id = Path(args.input).stem
    rows = [
        _row(instance_id, args.solver, instance, schedule, report, seed,
             args.stable_output, oracle_value)
    ]
    _emit(rows)
    if args.emit_schedule:
        write_schedule(schedule, args.emit_schedule)
    return 0


def _cmd_bench(args) -> int:
    solver_specs = _split_solvers(args.solvers)
    gen = parse_gen_spec(args.gen)
    seeds = parse_seeds(args.seeds)
    rows = []
    for seed in sorted(set(seeds)):
        instance = generate(gen, seed)
        instance_id = f"{args.gen}#{seed}"
        oracle_value = exact_makespan(instance)[0] if args.oracle else None
        for spec in solver_specs:
            schedule, report = run_solver(spec, instance, seed)
            rows.append(
                _row(instance_id, spec, instance, schedule, report, seed,
                     args.stable_output, oracle_value)
            )
    rows.sort(key=lambda r: (int(r[8]), r[1], r[0]))
    _emit(rows)
    return 0


def _split_solvers(raw: str) -> list[str]:
    """Split on commas that separate solver names, not parameters.

    A comma starts a new solver when the text after it up to the next comma
    or colon contains no "="; "lpt,ptas:eps=1/2,c=3" keeps c=3 with ptas.
    """
    specs: list[str] = []
    for part in raw.split(","):
        if specs and "=" in part and ":" not in part:
            specs[-1] += "," + part
        else:
            specs.append(part)
    if not all(specs):
        raise UsageError(f"empty solver in {raw!r}")
    return specs


def _sig6(x) -> str:
    return f"{float(x):.6g}"


def _cmd_gap(args) -> int:
    sc_yes = parse_setcover(args.yes)
    sc_no = parse_setcover(args.no)
    seed = args.seed if args.seed is not None else default_seed()
    report = gap_experiment(sc_yes, sc_no, seed=seed, trials=args.trials)
    out = sys.stdout
    out.write(
        f"gap experiment: K={report.num_classes} classes, m={report.machines} machines, "
        f"t={report.target}, alpha={report.alpha}, seed={report.seed}\n"
    )
    out.write(
        f"yes cover size {report.yes_cover_size} (sets {','.join(map(str, report.yes_cover))}); "
        f"no needs {report.no_cover_size}; no lower bound {report.no_lower_bound}\n"
    )
    out.write(f"r bound {_sig6(report.r_bound)}\n")
    header = f"{'trial':>5}  {'yes_approx':>10}  {'yes_witness':>11}  {'yes_achieved':>12}  {'no_approx':>9}\n"
    out.write(header)
    for row in report.rows:
        out.write(
            f"{row.trial:>5}  {_sig6(row.yes_approx):>10}  {_sig6(row.yes_witness):>11}  "
            f"{_sig6(row.yes_achieved):>12}  {_sig6(row.no_approx):>9}\n"
        )
    out.write(
        f"yes within r: {report.yes_within_r}/{report.trials}  "
        f"no bound exceeds yes: {report.no_bound_exceeds_yes}/{report.trials}\n"
    )
    return 0


def _cmd_oracle(args) -> int:
    instance = parse_instance(args.input)
    limits = OracleLimits(max_jobs=args.max_jobs, max_machines=args.max_machines)
    start = time.perf_counter()
    opt, schedule = exact_makespan(instance, limits)
    report = SolveReport(
        solver="oracle", makespan=opt, ms=(time.perf_counter() - start) * 1000.0
    )
    instance_id = Path(args.input).stem
    _emit([
        _row(instance_id, "oracle", instance, schedule, report, 0,
             args.stable_output, opt)
    ])
    return 0


# -- entry points ----------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="setupsched", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    solve = sub.add_parser("solve", help="run one solver on one instance file")
    solve.add_argument("--solver", required=True, help="lpt | ptas:eps=1/2 | unrelated:c=3 | ra | cupt | oracle")
    solve.add_argument("--in", dest="input", required=True, metavar="PATH")
    solve.add_argument("--seed", type=int, default=None)
    solve.add_argument("--oracle", action="store_true", help="also solve exactly; fill oracle/ratio columns")
    solve.add_argument("--emit-schedule", metavar="PATH")
    solve.add_argument("--stable-output", action="store_true", help="write ms=0.000 for reproducible bytes")

    bench = sub.add_parser("bench", help="solver grid over generated instances")
    bench.add_argument("--solvers", required=True, help="comma list of solver specs")
    bench.add_argument("--gen", required=True, help="kind:n=8,m=2,K=2[,size=1..9,setup=0..4,speed=1..4,inf=1/8,variant=...]")
    bench.add_argument("--seeds", required=True, help='"7", "1..20", or comma list')
    bench.add_argument("--oracle", action="store_true")
    bench.add_argument("--stable-output", action="store_true")

    gap = sub.add_parser("gap", help="set-cover gap experiment on a certified pair")
    gap.add_argument("--yes", required=True, metavar="PATH")
    gap.add_argument("--no", required=True, metavar="PATH")
    gap.add_argument("--trials", type=int, default=50)
    gap.add_argument("--seed", type=int, default=None)

    oracle = sub.add_parser("oracle", help="exact makespan by bounded enumeration")
    oracle.add_argument("--in", dest="input", required=True, metavar="PATH")
    oracle.add_argument("--max-jobs", type=int, default=OracleLimits.max_jobs)
    oracle.add_argument("--max-machines", type=int, default=OracleLimits.max_machines)
    oracle.add_argument("--stable-output", action="store_true")

    return parser


_DISPATCH = {
    "solve": _cmd_solve,
    "bench": _cmd_bench,
    "gap": _cmd_gap,
    "oracle": _cmd_oracle,
}


def run(argv: list[str]) -> int:
    """Parse and execute one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        return _DISPATCH[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (ParseError, ValidationError, BudgetExceeded, NotClassUniform,
            CertificationFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
