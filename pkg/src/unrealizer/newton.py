"""Fixpoint solving of join-of-products equation systems over semi-linear sets.

The least solution of ``X_i = join of monomials over the X_j`` is found
by Newton iteration: linearize the right-hand sides at the current
valuation via a formal derivative, solve the resulting linear system
exactly with star-based Gaussian elimination, and join the increment
into the valuation.  Over this commutative idempotent domain the least
fixpoint is reached after at most one iteration per variable.
"""

from dataclasses import dataclass

from . import semilinear as sl
from .gfa import IntMonomial


@dataclass
class LinearSystem:
    """Y_i = join_j A[i,j] (x) Y_j (+) c[i]."""

    variables: tuple
    a: dict        # (i, j) -> SemiLinearSet, zero entries absent
    c: dict        # i -> SemiLinearSet
    dimension: int


def monomial_value(m, nu):
    out = m.coeff
    for f in m.factors:
        value = nu[f.var]
        if f.mask is not None:
            value = value.project(f.mask)
        out = out.extend(value)
    return out


def derivative(m, wrt, nu):
    """Formal partial derivative of a product monomial at a valuation."""
    out = sl.ZERO
    for i, f in enumerate(m.factors):
        if f.var != wrt:
            continue
        if f.mask is not None:
            raise ValueError("projection masks must be removed before solving")
        part = m.coeff
        for j, other in enumerate(m.factors):
            if j != i:
                part = part.extend(nu[other.var])
        out = out.combine(part)
    return out


def solve_linear(ls):
    """Least solution by variable elimination with X = a* (x) b."""
    a = dict(ls.a)
    c = dict(ls.c)
    remaining = list(ls.variables)
    solved_rows = []
    while remaining:
        occurrences = {v: 0 for v in remaining}
        for (i, j), value in a.items():
            if not value.is_zero:
                occurrences[i] += 1
                occurrences[j] += 1
        x = min(remaining, key=lambda v: (occurrences[v], v))
        remaining.remove(x)
        self_loop = a.pop((x, x), sl.ZERO)
        star = self_loop.star(ls.dimension)
        row = {}
        for j in remaining:
            entry = a.pop((x, j), sl.ZERO)
            if not entry.is_zero:
                row[j] = star.extend(entry)
        const = star.extend(c.get(x, sl.ZERO))
        solved_rows.append((x, row, const))
        for i in remaining:
            k = a.pop((i, x), sl.ZERO)
            if k.is_zero:
                continue
            for j, entry in row.items():
                a[(i, j)] = a.get((i, j), sl.ZERO).combine(k.extend(entry))
            c[i] = c.get(i, sl.ZERO).combine(k.extend(const))
    values = {}
    for x, row, const in reversed(solved_rows):
        acc = const
        for j, entry in row.items():
            acc = acc.combine(entry.extend(values[j]))
        values[x] = acc
    return values


def npa_solve(sys, solver=None, prune=True, trace=None):
    """Least fixpoint after exactly one Newton iteration per variable."""
    variables = tuple(sys.equations)
    member = solver.member if (solver is not None and prune) else None

    def tidy(value):
        return sl.prune(value, member) if member is not None else value

    nu = {}
    for x, monos in sys.equations.items():
        consts = [m.coeff for m in monos
                  if isinstance(m, IntMonomial) and not m.factors]
        if any(not isinstance(m, IntMonomial) for m in monos):
            raise ValueError("only integer product monomials can be solved here")
        nu[x] = tidy(sl.combine_all(consts))

    for step in range(len(variables)):
        a, c = {}, {}
        for x, monos in sys.equations.items():
            total = sl.zero()
            for m in monos:
                total = total.combine(monomial_value(m, nu))
                for y in {f.var for f in m.factors}:
                    d = derivative(m, y, nu)
                    if not d.is_zero:
                        a[(x, y)] = a.get((x, y), sl.ZERO).combine(d)
            c[x] = total
        delta = solve_linear(LinearSystem(variables, a, c, sys.dimension))
        nu = {x: tidy(nu[x].combine(delta[x])) for x in variables}
        if trace is not None:
            trace.append({x: str(nu[x]) for x in variables})
    return nu


def kleene_solve(sys, max_steps=200):
    """Plain iteration to a fixpoint; diverges on star-requiring systems.

    Testing reference only: compares against npa_solve where it converges.
    """
    nu = {x: sl.ZERO for x in sys.equations}
    for _ in range(max_steps):
        new = {}
        for x, monos in sys.equations.items():
            total = nu[x]
            for m in monos:
                total = total.combine(monomial_value(m, nu))
            new[x] = total
        if new == nu:
            return nu
        nu = new
    raise RuntimeError("no fixpoint within the step budget")
