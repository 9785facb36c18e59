"""Sparse exact-rational primal simplex with Bland's anti-cycling rule.

Rows are dictionaries mapping column index to Fraction, so pivots touch only
columns that actually occur; a column-to-rows index keeps the elimination
sweep proportional to the nonzeros involved.  Two phases: artificials are
introduced only where the slack cannot serve as the initial basis, and a
feasibility-only solve stops as soon as phase 1 proves a basic feasible
point.  No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class Unbounded(Exception):
    """Objective unbounded below; the programs built here never trigger it."""


@dataclass(frozen=True)
class SimplexResult:
    status: str  # "optimal" | "feasible" | "infeasible"
    values: tuple[Fraction, ...] | None
    basis: tuple[int, ...] | None  # basic column per live row
    objective_value: Fraction | None


def solve(ncols: int, rows, objective: dict[int, Fraction] | None = None) -> SimplexResult:
    """Minimize ``objective`` (or just find a point) over the given rows.

    ``rows`` is an iterable of (coeffs, sense, rhs) with sense in {"<=",
    "=", ">="}; all structural variables are nonnegative.
    """
    t = _Tableau(ncols, rows)
    if not t.phase1():
        return SimplexResult("infeasible", None, None, None)
    if objective is None:
        return SimplexResult("feasible", t.values(), t.live_basis(), None)
    value = t.phase2(objective)
    return SimplexResult("optimal", t.values(), t.live_basis(), value)


class _Tableau:
    def __init__(self, ncols: int, rows):
        self.ncols = ncols
        self.rows: list[dict[int, Fraction]] = []
        self.rhs: list[Fraction] = []
        self.basis: list[int | None] = []
        self.col_rows: dict[int, set[int]] = {}
        next_col = ncols
        artificial_rows = []
        for coeffs, sense, rhs in rows:
            row = {c: Fraction(v) for c, v in coeffs.items() if v}
            rhs = Fraction(rhs)
            if sense == ">=":
                row = {c: -v for c, v in row.items()}
                rhs = -rhs
                sense = "<="
            slack_coef = ZERO
            if sense == "<=":
                slack_coef = ONE
            elif sense != "=":
                raise ValueError(f"unknown sense {sense!r}")
            if rhs < 0:
                row = {c: -v for c, v in row.items()}
                rhs = -rhs
                slack_coef = -slack_coef
            if slack_coef:
                row[next_col] = slack_coef
                slack = next_col
                next_col += 1
            r = len(self.rows)
            if slack_coef == ONE:
                self.basis.append(slack)
            else:
                row[next_col] = ONE
                self.basis.append(next_col)
                artificial_rows.append(r)
                next_col += 1
            self.rows.append(row)
            self.rhs.append(rhs)
            for c in row:
                self.col_rows.setdefault(c, set()).add(r)
        # artificials are interleaved with slacks; ban entering by membership
        self.artificials = {self.basis[r] for r in artificial_rows}
        self.obj: dict[int, Fraction] = {}
        self.obj_const = ZERO

    # -- row algebra -------------------------------------------------------

    def _axpy_row(self, target_idx: int, factor: Fraction, src: dict[int, Fraction]) -> None:
        target = self.rows[target_idx]
        for c, v in src.items():
            nv = target.get(c, ZERO) + factor * v
            if nv:
                if c not in target:
                    self.col_rows.setdefault(c, set()).add(target_idx)
                target[c] = nv
            elif c in target:
                del target[c]
                self.col_rows[c].discard(target_idx)

    def _axpy_obj(self, factor: Fraction, src: dict[int, Fraction]) -> None:
        for c, v in src.items():
            nv = self.obj.get(c, ZERO) + factor * v
            if nv:
                self.obj[c] = nv
            else:
                self.obj.pop(c, None)

    def _pivot(self, r: int, q: int) -> None:
        row = self.rows[r]
        piv = row[q]
        if piv != ONE:
            inv = ONE / piv
            for c in row:
                row[c] *= inv
            self.rhs[r] *= inv
        for r2 in list(self.col_rows.get(q, ())):
            if r2 == r:
                continue
            f = self.rows[r2].get(q)
            if f:
                self._axpy_row(r2, -f, row)
                self.rhs[r2] += -f * self.rhs[r]
        # z = const + sum(d_c x_c): substituting x_q via the pivot row adds
        # d_q * rhs to the constant, not the row-style negative
        f = self.obj.get(q)
        if f:
            self._axpy_obj(-f, row)
            self.obj_const += f * self.rhs[r]
        self.basis[r] = q

    def _enter(self, banned) -> int | None:
        best = None
        for c, v in self.obj.items():
            if v < 0 and c not in banned and (best is None or c < best):
                best = c
        return best

    def _leave(self, q: int) -> int | None:
        best_ratio = None
        best_row = None
        for r in self.col_rows.get(q, ()):
            if self.basis[r] is None:
                continue
            a = self.rows[r].get(q, ZERO)
            if a <= 0:
                continue
            ratio = self.rhs[r] / a
            if (
                best_ratio is None
                or ratio < best_ratio
                or (ratio == best_ratio and self.basis[r] < self.basis[best_row])
            ):
                best_ratio = ratio
                best_row = r
        return best_row

    def _minimize(self, banned: frozenset) -> None:
        while True:
            q = self._enter(banned)
            if q is None:
                return
            r = self._leave(q)
            if r is None:
                raise Unbounded(f"column {q} has no blocking row")
            self._pivot(r, q)

    # -- phases ------------------------------------------------------------

    def phase1(self) -> bool:
        if not self.artificials:
            return True
        self.obj = {}
        self.obj_const = ZERO
        for r, b in enumerate(self.basis):
            if b in self.artificials:
                # z = sum of artificials = sum over their rows of (rhs - rest)
                self._axpy_obj(-ONE, {c: v for c, v in self.rows[r].items() if c != b})
                self.obj_const += self.rhs[r]
        self._minimize(frozenset(self.artificials))
        if self.obj_const != 0:
            return False
        self._evict_artificials()
        return True

    def _evict_artificials(self) -> None:
        for r, b in enumerate(self.basis):
            if b not in self.artificials:
                continue
            pivot_col = None
            for c in self.rows[r]:
                if c != b and c not in self.artificials:
                    pivot_col = c if pivot_col is None or c < pivot_col else pivot_col
            if pivot_col is not None:
                self._pivot(r, pivot_col)
            else:
                # redundant row: retire it entirely
                for c in list(self.rows[r]):
                    self.col_rows[c].discard(r)
                self.rows[r] = {}
                self.basis[r] = None

    def phase2(self, objective: dict[int, Fraction]) -> Fraction:
        self.obj = {c: Fraction(v) for c, v in objective.items() if v}
        self.obj_const = ZERO
        for r, b in enumerate(self.basis):
            if b is None:
                continue
            cb = self.obj.pop(b, None)
            if cb:
                self._axpy_obj(-cb, {c: v for c, v in self.rows[r].items() if c != b})
                self.obj_const += cb * self.rhs[r]
        self._minimize(frozenset(self.artificials))
        return self.obj_const

    # -- extraction --------------------------------------------------------

    def values(self) -> tuple[Fraction, ...]:
        out = [ZERO] * self.ncols
        for r, b in enumerate(self.basis):
            if b is not None and b < self.ncols:
                out[b] = self.rhs[r]
        return tuple(out)

    def live_basis(self) -> tuple[int, ...]:
        return tuple(b for b in self.basis if b is not None)
