"""Exact integer linear feasibility.

Systems are conjunctions of linear constraints with integer coefficients
over integer variables, some restricted to be nonnegative.  Decisions are
exact: the LP relaxations are solved with a rational phase-1 simplex
(fractions.Fraction throughout, Bland's rule), and integrality is recovered
by branch and bound.  Completeness on unbounded polyhedra comes from an
a-priori magnitude bound: if an integer solution exists at all, one exists
inside a computable box, so every search tree is finite.

Every sat answer is re-verified by substituting the witness into all
constraints; a failed recheck raises, it is never reported as a result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

EQ, LE, LT = "=", "<=", "<"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[tuple[str, int], ...]  # sorted by variable name, no zero coeffs
    rel: str                             # "=", "<=" or "<"
    rhs: int

    def __str__(self) -> str:
        lhs = " + ".join(f"{c}*{v}" for v, c in self.coeffs) or "0"
        return f"{lhs} {self.rel} {self.rhs}"


def constraint(coeffs: dict[str, int], rel: str, rhs: int) -> Constraint:
    if rel not in (EQ, LE, LT):
        raise ValueError(f"unknown relation {rel!r}")
    items = tuple(sorted((v, int(c)) for v, c in coeffs.items() if c != 0))
    return Constraint(items, rel, int(rhs))


@dataclass(frozen=True)
class IlpSystem:
    variables: tuple[tuple[str, bool], ...]  # (name, nonneg), sorted by name
    constraints: tuple[Constraint, ...]


def system(variables: dict[str, bool], constraints: list[Constraint]) -> IlpSystem:
    names = set(variables)
    for c in constraints:
        for v, _ in c.coeffs:
            if v not in names:
                raise ValueError(f"constraint mentions undeclared variable {v!r}")
    return IlpSystem(tuple(sorted(variables.items())), tuple(constraints))


@dataclass(frozen=True)
class Feasibility:
    status: str                      # "sat", "unsat" or "unknown" (budget exhausted)
    witness: dict[str, int] | None = None
    nodes: int = 0


class BudgetExceeded(Exception):
    pass


def _check_witness(sys: IlpSystem, w: dict[str, int]) -> None:
    for name, nonneg in sys.variables:
        if nonneg and w.get(name, 0) < 0:
            raise AssertionError(f"witness violates {name} >= 0")
    for c in sys.constraints:
        lhs = sum(k * w.get(v, 0) for v, k in c.coeffs)
        ok = lhs == c.rhs if c.rel == EQ else lhs <= c.rhs if c.rel == LE else lhs < c.rhs
        if not ok:
            raise AssertionError(f"witness violates {c}")


def _magnitude_bound(sys: IlpSystem) -> int:
    """Box radius within which some integer solution lies, if any does.

    Uses the classical small-solution bound for integer programs in
    standard form Ax = b, x >= 0: a feasible system has a solution with
    entries at most n * (m * a)^(2m + 1) where a bounds the absolute values
    of all coefficients.  Inequalities contribute slack variables and free
    variables are split into differences of nonnegative ones before
    counting, so the bound applies to the original variables as well.
    """
    n = 0
    for _, nonneg in sys.variables:
        n += 1 if nonneg else 2
    m = len(sys.constraints)
    n += sum(1 for c in sys.constraints if c.rel != EQ)
    a = 1
    for c in sys.constraints:
        for _, k in c.coeffs:
            a = max(a, abs(k))
        rhs = c.rhs if c.rel != LT else c.rhs - 1
        a = max(a, abs(rhs))
    if m == 0:
        return 1
    return max(1, n) * (max(1, m) * a) ** (2 * m + 1)


def _phase1_simplex(rows: list[list[Fraction]], nvars: int) -> list[Fraction] | None:
    """Feasible point of {x >= 0 : Ax = b} or None.

    `rows` holds [A | b] with b >= 0 (callers normalize signs).  Artificial
    variables are appended and driven out by minimizing their sum; Bland's
    rule guarantees termination.
    """
    m = len(rows)
    if m == 0:
        return [Fraction(0)] * nvars
    total = nvars + m
    tab = []
    for i, row in enumerate(rows):
        r = row[:nvars] + [Fraction(1) if j == i else Fraction(0) for j in range(m)]
        r.append(row[nvars])
        tab.append(r)
    basis = [nvars + i for i in range(m)]
    # objective row: minimize sum of artificials, expressed over nonbasic columns
    obj = [Fraction(0)] * (total + 1)
    for r in tab:
        for j in range(total + 1):
            obj[j] += r[j]
    for j in range(nvars, total):
        obj[j] = Fraction(0)

    while True:
        enter = -1
        for j in range(total):
            if obj[j] > 0:
                enter = j
                break
        if enter < 0:
            break
        leave, best = -1, None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][total] / tab[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave < 0:
            # unbounded phase-1 objective cannot happen (bounded below by 0)
            return None
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, tab[leave])]
        basis[leave] = enter

    if obj[total] != 0:
        return None
    point = [Fraction(0)] * total
    for i, b in enumerate(basis):
        point[b] = tab[i][total]
    # artificials may linger in the basis, but only at value zero
    if any(point[j] != 0 for j in range(nvars, total)):
        return None
    return point[:nvars]


def _lp_feasible(varnames: list[str], lower: dict[str, int | None],
                 upper: dict[str, int | None],
                 constraints: list[tuple[dict[str, int], str, int]],
                 ) -> dict[str, Fraction] | None:
    """Rational point satisfying constraints and bounds, or None.

    A variable with a known lower bound is shifted (x = lo + x', x' >= 0);
    one without is split into a difference of nonnegatives.  Upper bounds
    become rows only when present, so the enormous a-priori box never
    enters the tableau.
    """
    cols: list[tuple[int, int]] = []  # (sign, shift) per column
    colof: dict[str, list[int]] = {}
    for v in varnames:
        lo = lower[v]
        if lo is not None:
            colof[v] = [len(cols)]
            cols.append((1, lo))
        else:
            colof[v] = [len(cols), len(cols) + 1]
            cols.append((1, 0))
            cols.append((-1, 0))

    raw = list(constraints)
    for v in varnames:
        if upper[v] is not None:
            raw.append(({v: 1}, LE, upper[v]))

    nslack = sum(1 for _, rel, _ in raw if rel == LE)
    width = len(cols) + nslack
    rows: list[list[Fraction]] = []
    slack = len(cols)
    for coeffs, rel, rhs in raw:
        row = [Fraction(0)] * (width + 1)
        b = rhs
        for v, k in coeffs.items():
            for idx in colof[v]:
                sign, shift = cols[idx]
                row[idx] += Fraction(k * sign)
                if sign == 1:
                    b -= k * shift
        if rel == LE:
            row[slack] = Fraction(1)
            slack += 1
        if b < 0:
            row = [-x for x in row]
            b = -b
        row[width] = Fraction(b)
        rows.append(row)

    point = _phase1_simplex(rows, width)
    if point is None:
        return None
    out: dict[str, Fraction] = {}
    for v in varnames:
        idxs = colof[v]
        if len(idxs) == 1:
            out[v] = point[idxs[0]] + cols[idxs[0]][1]
        else:
            out[v] = point[idxs[0]] - point[idxs[1]]
    return out


def _presolve(sys: IlpSystem) -> list[tuple[dict[str, int], str, int]] | None:
    """Normalize constraints; None means provably unsat already.

    Strict inequalities become nonstrict, every row is divided by the gcd of
    its coefficients, and an equality whose gcd does not divide its
    right-hand side is a lattice infeasibility.
    """
    import math

    out = []
    for c in sys.constraints:
        coeffs = dict(c.coeffs)
        rhs = c.rhs - 1 if c.rel == LT else c.rhs
        rel = EQ if c.rel == EQ else LE
        if not coeffs:
            if (rhs != 0) if rel == EQ else (rhs < 0):
                return None
            continue
        g = math.gcd(*[abs(k) for k in coeffs.values()])
        if g > 1:
            if rel == EQ:
                if rhs % g:
                    return None
                rhs //= g
            else:
                rhs = rhs // g if rhs >= 0 else -((-rhs + g - 1) // g)
            coeffs = {v: k // g for v, k in coeffs.items()}
        out.append((coeffs, rel, rhs))
    return out


def feasible(sys: IlpSystem, node_budget: int = 10 ** 6) -> Feasibility:
    """Exact integer feasibility by branch and bound on the LP relaxation.

    Branch bounds may descend without the LP ever going infeasible (no
    integer point but rational ones everywhere); the a-priori magnitude
    bound caps that descent, so the answer "unsat" is exact.  "unknown"
    only appears when the node budget runs out first.
    """
    varnames = [v for v, _ in sys.variables]
    constraints = _presolve(sys)
    if constraints is None:
        return Feasibility("unsat", None, 0)
    if not varnames:
        return Feasibility("sat", {}, 0)

    bound = _magnitude_bound(sys)
    lower0: dict[str, int | None] = {v: (0 if nonneg else None)
                                     for v, nonneg in sys.variables}
    upper0: dict[str, int | None] = {v: None for v, _ in sys.variables}

    stack = [(lower0, upper0)]
    nodes = 0
    while stack:
        lower, upper = stack.pop()
        nodes += 1
        if nodes > node_budget:
            return Feasibility("unknown", None, nodes)
        out_of_box = False
        for v in varnames:
            lo = lower[v] if lower[v] is not None else -bound
            up = upper[v] if upper[v] is not None else bound
            if lo > up:
                out_of_box = True
                break
        if out_of_box:
            continue
        point = _lp_feasible(varnames, lower, upper, constraints)
        if point is None:
            continue
        frac_var = None
        for v in varnames:
            if point[v].denominator != 1:
                frac_var = v
                break
        if frac_var is None:
            w = {v: int(point[v]) for v in varnames}
            _check_witness(sys, w)
            return Feasibility("sat", w, nodes)
        val = point[frac_var]
        floor = val.numerator // val.denominator
        up = dict(upper)
        up[frac_var] = floor if upper[frac_var] is None else min(upper[frac_var], floor)
        lo = dict(lower)
        lo[frac_var] = floor + 1 if lower[frac_var] is None else max(lower[frac_var], floor + 1)
        stack.append((lower, up))
        stack.append((lo, upper))
    return Feasibility("unsat", None, nodes)


class Solver:
    """Feasibility front door with query export and cumulative counters."""

    def __init__(self, node_budget: int = 10 ** 6, export_dir: str | None = None):
        self.node_budget = node_budget
        self.export_dir = export_dir
        self.queries = 0

    def feasible(self, sys: IlpSystem) -> Feasibility:
        self.queries += 1
        if self.export_dir is not None:
            self._export(sys)
        res = feasible(sys, self.node_budget)
        if res.status == "unknown":
            raise BudgetExceeded(f"ILP node budget {self.node_budget} exhausted")
        return res

    def member(self, point: tuple[int, ...], ls) -> bool:
        """point in <base, gens>: some nonnegative integer combination works."""
        if len(point) != len(ls.base):
            raise ValueError("dimension mismatch")
        diff = tuple(p - b for p, b in zip(point, ls.base))
        if not ls.gens:
            return not any(diff)
        cons = []
        for i, d in enumerate(diff):
            cons.append(constraint({f"l{j}": g[i] for j, g in enumerate(ls.gens)}, EQ, d))
        sys = system({f"l{j}": True for j in range(len(ls.gens))}, cons)
        return self.feasible(sys).status == "sat"

    def _export(self, sys: IlpSystem) -> None:
        import os

        os.makedirs(self.export_dir, exist_ok=True)
        path = os.path.join(self.export_dir, f"query{self.queries:05d}.smt2")
        with open(path, "w") as fh:
            fh.write(export_smtlib(sys))


def export_smtlib(sys: IlpSystem) -> str:
    """SMT-LIB2 rendering of a system; byte-stable for identical systems."""
    lines = ["(set-logic QF_LIA)"]
    for v, nonneg in sys.variables:
        lines.append(f"(declare-const {v} Int)")
    for v, nonneg in sys.variables:
        if nonneg:
            lines.append(f"(assert (>= {v} 0))")
    for c in sys.constraints:
        terms = [f"(* {k} {v})" for v, k in c.coeffs]
        lhs = terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")" if terms else "0"
        op = c.rel if c.rel != EQ else "="
        lines.append(f"(assert ({op} {lhs} {c.rhs}))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"
