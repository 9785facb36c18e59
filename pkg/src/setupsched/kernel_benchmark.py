"""Timing comparison of the compiled search kernel against the pure twin.

Run as ``python -m setupsched.kernel_benchmark``.  Both backends solve the
same batch of enumeration-scale instances; the table reports totals and the
speedup, or notes that the compiled kernel is unavailable.
"""

from __future__ import annotations

import time

from setupsched import _kernel_py
from setupsched.generate import GeneratorSpec, generate
from setupsched.model import Kind, trivial_bounds
from setupsched.oracle import integer_costs

try:
    from setupsched import _kernel as _compiled
except ImportError:
    _compiled = None


def _batch(num: int):
    spec = GeneratorSpec(kind=Kind.IDENTICAL, n=10, m=4, num_classes=3)
    out = []
    for seed in range(num):
        inst = generate(spec, seed)
        costs, setups, cls, scale = integer_costs(inst)
        order = sorted(range(inst.n), key=lambda j: (-max(costs[j]), j))
        bound = int(trivial_bounds(inst)[1] * scale) + 1
        out.append((costs, setups, cls, order, inst.m, bound))
    return out


def run_benchmark(instances: int = 25) -> list[dict]:
    batch = _batch(instances)
    rows = []
    backends = [("python", _kernel_py)] + ([("compiled", _compiled)] if _compiled else [])
    for name, backend in backends:
        values = []
        start = time.perf_counter()
        for args in batch:
            values.append(backend.best_value(*args))
        elapsed = (time.perf_counter() - start) * 1000
        rows.append({"backend": name, "instances": len(batch), "total_ms": elapsed, "values": values})
    if len(rows) == 2 and rows[0]["values"] != rows[1]["values"]:
        raise AssertionError("backends disagree on optimal values")
    return rows


def main() -> None:
    rows = run_benchmark()
    for row in rows:
        print(f"{row['backend']:>9}: {row['instances']} instances in {row['total_ms']:8.1f} ms")
    if len(rows) == 2 and rows[1]["total_ms"] > 0:
        print(f"  speedup: {rows[0]['total_ms'] / rows[1]['total_ms']:.1f}x")
    else:
        print("  compiled kernel unavailable; pure-Python fallback only")


if __name__ == "__main__":
    main()
