"""Shared helpers for the test suite: small instance mixes and slow cross-checks."""

from __future__ import annotations

from fractions import Fraction

from setupsched.generate import GeneratorSpec, generate
from setupsched.model import Instance, Kind


def mixed_instance(seed: int, max_jobs: int = 6, max_machines: int = 3) -> Instance:
    """A small random instance cycling through all four kinds."""
    kind = (Kind.IDENTICAL, Kind.UNIFORM, Kind.RESTRICTED, Kind.UNRELATED)[seed % 4]
    spec = GeneratorSpec(
        kind=kind,
        n=2 + seed % (max_jobs - 1),
        m=1 + (seed // 4) % max_machines,
        num_classes=1 + seed % 3,
        inf_prob=Fraction(1, 4) if kind is Kind.UNRELATED else Fraction(0),
        variant="class-uniform" if (kind is Kind.RESTRICTED and seed % 8 >= 4) else "",
    )
    return generate(spec, seed)


def assert_lp_solution_valid(lp, sol) -> None:
    """Exact re-substitution plus the basic-solution (vertex) property."""
    values = sol.values
    assert values is not None
    for row in lp.rows:
        lhs = sum((values[c] * v for c, v in row.coeffs.items()), Fraction(0))
        if row.sense == "<=":
            assert lhs <= row.rhs
        elif row.sense == ">=":
            assert lhs >= row.rhs
        else:
            assert lhs == row.rhs
    for idx, var in enumerate(lp.variables):
        assert values[idx] >= 0
        if var.upper is not None:
            assert values[idx] <= var.upper
    strictly_inside = sum(
        1
        for idx, var in enumerate(lp.variables)
        if values[idx] > 0 and (var.upper is None or values[idx] < var.upper)
    )
    assert strictly_inside <= len(lp.rows)


def enumerate_vertices(lp):
    """All vertices of {rows, x >= 0, x <= upper} by active-set enumeration.

    Exponential and tiny on purpose: the independent check for the simplex.
    """
    from itertools import combinations

    n = len(lp.variables)
    planes = []  # (coeffs dict, rhs)
    for row in lp.rows:
        planes.append((row.coeffs, row.rhs))
    for idx, var in enumerate(lp.variables):
        planes.append(({idx: Fraction(1)}, Fraction(0)))
        if var.upper is not None:
            planes.append(({idx: Fraction(1)}, var.upper))
    vertices = []
    for active in combinations(range(len(planes)), n):
        point = _solve_square([planes[a] for a in active], n)
        if point is None or any(v < 0 for v in point):
            continue
        ok = True
        for row in lp.rows:
            lhs = sum((point[c] * v for c, v in row.coeffs.items()), Fraction(0))
            if row.sense == "<=" and lhs > row.rhs:
                ok = False
            elif row.sense == ">=" and lhs < row.rhs:
                ok = False
            elif row.sense == "=" and lhs != row.rhs:
                ok = False
            if not ok:
                break
        if ok and all(
            lp.variables[i].upper is None or point[i] <= lp.variables[i].upper for i in range(n)
        ):
            if point not in vertices:
                vertices.append(point)
    return vertices


def _solve_square(planes, n):
    # Gaussian elimination over Fractions; None when singular
    a = [[plane[0].get(c, Fraction(0)) for c in range(n)] + [plane[1]] for plane in planes]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(a[r][n] for r in range(n))


def classical_opt_identical(sizes: list[int], m: int) -> int:
    """Subset-DP makespan minimum for identical machines without setups.

    Deliberately independent of the oracle's search: f_r(S) = min over
    submasks T of max(work(T), f_{r-1}(S minus T)).
    """
    n = len(sizes)
    full = (1 << n) - 1
    work = [0] * (full + 1)
    for mask in range(1, full + 1):
        low = (mask & -mask).bit_length() - 1
        work[mask] = work[mask & (mask - 1)] + sizes[low]
    cur = work[:]
    for _ in range(m - 1):
        nxt = [0] * (full + 1)
        for mask in range(full + 1):
            best = cur[mask]  # new machine left empty
            sub = mask
            while sub:
                cand = max(work[sub], cur[mask ^ sub])
                if cand < best:
                    best = cand
                sub = (sub - 1) & mask
            nxt[mask] = best
        cur = nxt
    return cur[full]
