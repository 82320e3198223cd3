"""Equation systems assigning each nonterminal an abstract value.

Every production contributes one monomial to its left-hand side's
equation; the equation's value is the join of its monomials.  Integer
monomials are products of a constant semi-linear coefficient with
nonterminal factors (optionally under a pending coordinate projection);
conditional and Boolean productions keep their operator symbolic until
the mixed solver freezes or expands them.
"""

import heapq
from dataclasses import dataclass

from . import semilinear as sl
from .booldom import bset_str, mask_str
from .grammar import (
    AND, BOOL, INT, ITE, LESSTHAN, MINUS, NEGVAR, NOT, NUM, PLUS, VAR,
    GrammarError, Term, eval_term,
)


@dataclass(frozen=True)
class Factor:
    var: str
    mask: tuple[bool, ...] | None = None  # projection applied to the value


@dataclass(frozen=True)
class IntMonomial:
    coeff: sl.SemiLinearSet
    factors: tuple[Factor, ...] = ()


@dataclass(frozen=True)
class IteMonomial:
    guard: object      # nonterminal name or a frozen set of Boolean vectors
    then_arg: object   # nonterminal name or a constant SemiLinearSet
    else_arg: object


@dataclass(frozen=True)
class BoolMonomial:
    op: str            # "const", "copy", "not", "and" or "lessthan"
    args: tuple = ()   # names, Boolean-vector sets, or SemiLinearSets


@dataclass
class PolynomialSystem:
    equations: dict            # nonterminal -> tuple of monomials
    dimension: int
    sorts: dict                # nonterminal -> Int/Bool

    def nonterminals(self):
        return tuple(self.equations)

    def has_ite(self):
        return any(isinstance(m, IteMonomial)
                   for monos in self.equations.values() for m in monos)

    def dump(self):
        lines = []
        for nt, monos in self.equations.items():
            rhs = " (+) ".join(_mono_str(m, self.dimension) for m in monos)
            lines.append(f"n({nt}) = {rhs or '{}'}")
        return "\n".join(lines) + "\n"


def _ref_str(arg):
    if isinstance(arg, str):
        return f"n({arg})"
    if isinstance(arg, (frozenset, set)):
        return bset_str(arg)
    return str(arg)


def _mono_str(m, dim):
    if isinstance(m, IntMonomial):
        parts = []
        if m.coeff != sl.one(dim) or not m.factors:
            parts.append(str(m.coeff))
        for f in m.factors:
            if f.mask is None:
                parts.append(f"n({f.var})")
            else:
                parts.append(f"proj(n({f.var}), {mask_str(f.mask)})")
        return " (x) ".join(parts)
    if isinstance(m, IteMonomial):
        return (f"ite({_ref_str(m.guard)}, {_ref_str(m.then_arg)}, "
                f"{_ref_str(m.else_arg)})")
    if m.op == "const":
        return bset_str(m.args[0])
    if m.op == "copy":
        return _ref_str(m.args[0])
    return f"{'lt' if m.op == 'lessthan' else m.op}(" + \
        ", ".join(_ref_str(a) for a in m.args) + ")"


def _leaf_value(term, e):
    out = eval_term(term, e)
    if isinstance(out[0], bool):
        raise GrammarError("Boolean leaves have no constant abstraction")
    return sl.singleton(out)


def _int_ref(arg, e):
    """Nonterminal name, or constant value of an inline leaf."""
    return arg if isinstance(arg, str) else _leaf_value(arg, e)


def build_equations(g, e):
    """One equation per nonterminal over the example-vector domain."""
    d = e.dimension
    sorts = dict(g.nonterminals)
    equations = {nt: [] for nt, _ in g.nonterminals}
    for p in g.productions:
        if p.is_alias:
            if sorts[p.args[0]] == BOOL:
                mono = BoolMonomial("copy", (p.args[0],))
            else:
                mono = IntMonomial(sl.one(d), (Factor(p.args[0]),))
            equations[p.lhs].append(mono)
            continue
        kind = p.symbol.kind
        if kind in (NUM, VAR, NEGVAR):
            equations[p.lhs].append(
                IntMonomial(_leaf_value(Term(p.symbol, ()), e)))
        elif kind == PLUS:
            coeff, factors = sl.one(d), []
            for a in p.args:
                if isinstance(a, str):
                    factors.append(Factor(a))
                else:
                    coeff = coeff.extend(_leaf_value(a, e))
            equations[p.lhs].append(IntMonomial(coeff, tuple(factors)))
        elif kind == ITE:
            guard, then_arg, else_arg = p.args
            equations[p.lhs].append(
                IteMonomial(guard, _int_ref(then_arg, e), _int_ref(else_arg, e)))
        elif kind == NOT:
            equations[p.lhs].append(BoolMonomial("not", (p.args[0],)))
        elif kind == AND:
            equations[p.lhs].append(BoolMonomial("and", tuple(p.args)))
        elif kind == LESSTHAN:
            equations[p.lhs].append(
                BoolMonomial("lessthan",
                             tuple(_int_ref(a, e) for a in p.args)))
        elif kind == MINUS:
            raise GrammarError("Minus must be eliminated before equation "
                               "construction")
        else:
            raise GrammarError(f"no exact abstraction for {kind}")
    return PolynomialSystem({nt: tuple(monos) for nt, monos in equations.items()},
                            d, sorts)


def _references(mono):
    refs = []
    if isinstance(mono, IntMonomial):
        refs.extend(f.var for f in mono.factors)
    elif isinstance(mono, IteMonomial):
        refs.extend(a for a in (mono.guard, mono.then_arg, mono.else_arg)
                    if isinstance(a, str))
    else:
        refs.extend(a for a in mono.args if isinstance(a, str))
    return refs


def dependencies(sys):
    """nonterminal -> set of nonterminals its equation reads."""
    return {nt: {r for m in monos for r in _references(m)}
            for nt, monos in sys.equations.items()}


def stratify(sys):
    """SCCs of the dependence graph in topological order.

    Each stratum only reads values from earlier strata (and itself);
    ties are broken by smallest member name for reproducibility.
    """
    deps = dependencies(sys)
    order = sorted(deps)
    index, low, onstack = {}, {}, set()
    stack, sccs, counter = [], [], [0]

    def strongconnect(root):
        work = [(root, iter(sorted(deps[root])))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        onstack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in deps:
                    continue
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    onstack.add(w)
                    work.append((w, iter(sorted(deps[w]))))
                    advanced = True
                    break
                if w in onstack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(tuple(sorted(comp)))

    for nt in order:
        if nt not in index:
            strongconnect(nt)

    comp_of = {nt: i for i, comp in enumerate(sccs) for nt in comp}
    succs = [set() for _ in sccs]
    indegree = [0] * len(sccs)
    for nt, ds in deps.items():
        for d in ds:
            if d in comp_of and comp_of[d] != comp_of[nt]:
                if comp_of[nt] not in succs[comp_of[d]]:
                    succs[comp_of[d]].add(comp_of[nt])
                    indegree[comp_of[nt]] += 1
    heap = [(sccs[i][0], i) for i in range(len(sccs)) if indegree[i] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, i = heapq.heappop(heap)
        out.append(sccs[i])
        for j in succs[i]:
            indegree[j] -= 1
            if indegree[j] == 0:
                heapq.heappush(heap, (sccs[j][0], j))
    return out


def substitute(sys, solved):
    """Replace references to already-solved nonterminals with constants."""
    def sub_int_ref(a):
        if isinstance(a, str) and a in solved:
            return solved[a]
        return a

    def sub_bool_ref(a):
        if isinstance(a, str) and a in solved:
            return solved[a]
        return a

    equations = {}
    for nt, monos in sys.equations.items():
        if nt in solved:
            continue
        out = []
        for m in monos:
            if isinstance(m, IntMonomial):
                coeff, factors = m.coeff, []
                for f in m.factors:
                    if f.var in solved:
                        value = solved[f.var]
                        if f.mask is not None:
                            value = value.project(f.mask)
                        coeff = coeff.extend(value)
                    else:
                        factors.append(f)
                out.append(IntMonomial(coeff, tuple(factors)))
            elif isinstance(m, IteMonomial):
                out.append(IteMonomial(sub_bool_ref(m.guard),
                                       sub_int_ref(m.then_arg),
                                       sub_int_ref(m.else_arg)))
            else:
                out.append(BoolMonomial(m.op,
                                        tuple(sub_bool_ref(a) if m.op != "lessthan"
                                              else sub_int_ref(a)
                                              for a in m.args)))
        equations[nt] = tuple(out)
    return PolynomialSystem(equations, sys.dimension,
                            {nt: s for nt, s in sys.sorts.items()
                             if nt not in solved})


def restrict(sys, names):
    keep = set(names)
    return PolynomialSystem(
        {nt: monos for nt, monos in sys.equations.items() if nt in keep},
        sys.dimension,
        {nt: s for nt, s in sys.sorts.items() if nt in keep})
