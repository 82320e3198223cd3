"""Ranked alphabet, regular tree grammars and example-set semantics.

The alphabet covers conditional linear integer arithmetic:

    Plus (n-ary, n >= 2 at the surface, binary after expansion), Minus,
    Num(c), Var(x), NegVar(x)                 -> Int
    IfThenElse(Bool, Int, Int)                -> Int
    And, Not, LessThan(Int, Int)              -> Bool
    Double, Inc (unary Int helpers used by the predicate-abstraction domain)

Semantics is relative to a finite example set E: a term denotes the vector
of its values on each example, computed componentwise.  IfThenElse selects
per coordinate from the two integer vectors according to the Boolean guard
vector.

Production arguments are nonterminal names or inline rank-0 leaf terms
(Num/Var/NegVar), and a production may be a plain alias for another
nonterminal; both shapes occur in the natural way of writing grammars like
``S2 ::= Plus(S3, Var x)`` and ``Start ::= ... | Exp2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union

INT = "Int"
BOOL = "Bool"

PLUS = "Plus"
MINUS = "Minus"
NUM = "Num"
VAR = "Var"
NEGVAR = "NegVar"
ITE = "IfThenElse"
AND = "And"
NOT = "Not"
LESSTHAN = "LessThan"
DOUBLE = "Double"
INC = "Inc"

_RESULT_SORT = {PLUS: INT, MINUS: INT, NUM: INT, VAR: INT, NEGVAR: INT,
                ITE: INT, AND: BOOL, NOT: BOOL, LESSTHAN: BOOL,
                DOUBLE: INT, INC: INT}
_FIXED_ARGS = {MINUS: (INT, INT), NUM: (), VAR: (), NEGVAR: (),
               ITE: (BOOL, INT, INT), AND: (BOOL, BOOL), NOT: (BOOL,),
               LESSTHAN: (INT, INT), DOUBLE: (INT,), INC: (INT,)}


class GrammarError(Exception):
    pass


@dataclass(frozen=True)
class Symbol:
    kind: str
    value: int | None = None   # Num payload
    name: str | None = None    # Var / NegVar payload
    arity: int | None = None   # Plus only; None means the fixed rank

    @property
    def rank(self) -> int:
        if self.kind == PLUS:
            return self.arity if self.arity is not None else 2
        return len(_FIXED_ARGS[self.kind])

    @property
    def sort(self) -> str:
        return _RESULT_SORT[self.kind]

    @property
    def arg_sorts(self) -> tuple[str, ...]:
        if self.kind == PLUS:
            return (INT,) * self.rank
        return _FIXED_ARGS[self.kind]

    def __str__(self) -> str:
        if self.kind == NUM:
            return f"Num {self.value}"
        if self.kind in (VAR, NEGVAR):
            return f"{self.kind} {self.name}"
        return self.kind


def num(c: int) -> Symbol:
    return Symbol(NUM, value=int(c))


def var(x: str) -> Symbol:
    return Symbol(VAR, name=x)


def negvar(x: str) -> Symbol:
    return Symbol(NEGVAR, name=x)


def plus(arity: int = 2) -> Symbol:
    if arity < 2:
        raise GrammarError("Plus needs at least two arguments")
    return Symbol(PLUS, arity=arity)


MINUS_SYM = Symbol(MINUS)
ITE_SYM = Symbol(ITE)
AND_SYM = Symbol(AND)
NOT_SYM = Symbol(NOT)
LESSTHAN_SYM = Symbol(LESSTHAN)
DOUBLE_SYM = Symbol(DOUBLE)
INC_SYM = Symbol(INC)


@dataclass(frozen=True)
class Term:
    symbol: Symbol
    children: tuple["Term", ...] = ()

    def __post_init__(self):
        if len(self.children) != self.symbol.rank:
            raise GrammarError(f"{self.symbol} expects {self.symbol.rank} children, "
                               f"got {len(self.children)}")

    @property
    def sort(self) -> str:
        return self.symbol.sort

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def height(self) -> int:
        return 1 + max((c.height() for c in self.children), default=0)

    def __str__(self) -> str:
        if not self.children:
            return str(self.symbol)
        return f"{self.symbol.kind}({', '.join(str(c) for c in self.children)})"

    def to_sexpr(self) -> str:
        k = self.symbol.kind
        if k == NUM:
            v = self.symbol.value
            return str(v) if v >= 0 else f"(- {-v})"
        if k == VAR:
            return self.symbol.name
        if k == NEGVAR:
            return f"(- 0 {self.symbol.name})"
        op = {PLUS: "+", MINUS: "-", ITE: "ite", AND: "and", NOT: "not",
              LESSTHAN: "<", DOUBLE: "double", INC: "inc"}[k]
        return "(" + op + " " + " ".join(c.to_sexpr() for c in self.children) + ")"


def leaf(symbol: Symbol) -> Term:
    return Term(symbol)


Arg = Union[str, Term]  # nonterminal reference or inline leaf term


@dataclass(frozen=True)
class Production:
    lhs: str
    symbol: Symbol | None      # None marks an alias production lhs ::= args[0]
    args: tuple[Arg, ...]

    @property
    def is_alias(self) -> bool:
        return self.symbol is None

    def __str__(self) -> str:
        def arg(a: Arg) -> str:
            return a if isinstance(a, str) else str(a)
        if self.is_alias:
            return f"{self.lhs} ::= {arg(self.args[0])}"
        if not self.args:
            return f"{self.lhs} ::= {self.symbol}"
        return f"{self.lhs} ::= {self.symbol.kind}({', '.join(arg(a) for a in self.args)})"


@dataclass(frozen=True)
class Rtg:
    nonterminals: tuple[tuple[str, str], ...]  # (name, sort) in declaration order
    start: str
    productions: tuple[Production, ...]

    @cached_property
    def sorts(self) -> dict[str, str]:
        return dict(self.nonterminals)

    @cached_property
    def by_lhs(self) -> dict[str, tuple[Production, ...]]:
        out: dict[str, list[Production]] = {n: [] for n, _ in self.nonterminals}
        for p in self.productions:
            out.setdefault(p.lhs, []).append(p)
        return {n: tuple(ps) for n, ps in out.items()}

    def __str__(self) -> str:
        return "\n".join(str(p) for p in self.productions)


def rtg(nonterminals: Iterable[tuple[str, str]], start: str,
        productions: Iterable[Production]) -> Rtg:
    return Rtg(tuple(nonterminals), start, tuple(productions))


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.message}"


def _arg_sort(g: Rtg, a: Arg) -> str | None:
    if isinstance(a, str):
        return g.sorts.get(a)
    return a.sort


def validate(g: Rtg) -> list[Diagnostic]:
    """All structural diagnostics; sort/arity/declaration faults are errors,
    unproductive nonterminals are warnings (their language is empty and the
    solvers assign them the bottom abstract value)."""
    out: list[Diagnostic] = []
    declared = g.sorts
    if g.start not in declared:
        out.append(Diagnostic("error", "undeclared-nonterminal",
                              f"start symbol {g.start!r} is not declared"))
    seen = set()
    for name, _ in g.nonterminals:
        if name in seen:
            out.append(Diagnostic("error", "duplicate-nonterminal",
                                  f"nonterminal {name!r} declared twice"))
        seen.add(name)
    for p in g.productions:
        if p.lhs not in declared:
            out.append(Diagnostic("error", "undeclared-nonterminal",
                                  f"production uses undeclared nonterminal {p.lhs!r}"))
            continue
        for a in p.args:
            if isinstance(a, str) and a not in declared:
                out.append(Diagnostic("error", "undeclared-nonterminal",
                                      f"{p} references undeclared nonterminal {a!r}"))
            if isinstance(a, Term) and a.children:
                out.append(Diagnostic("error", "inline-term",
                                      f"{p} inlines a non-leaf term"))
        if p.is_alias:
            if len(p.args) != 1 or not isinstance(p.args[0], str):
                out.append(Diagnostic("error", "arity-mismatch",
                                      f"alias production {p} needs exactly one nonterminal"))
                continue
            tgt = p.args[0]
            if tgt in declared and declared[tgt] != declared[p.lhs]:
                out.append(Diagnostic("error", "sort-mismatch",
                                      f"{p}: alias target has sort {declared[tgt]}, "
                                      f"lhs has {declared[p.lhs]}"))
            continue
        if len(p.args) != p.symbol.rank:
            out.append(Diagnostic("error", "arity-mismatch",
                                  f"{p}: {p.symbol.kind} expects {p.symbol.rank} arguments"))
            continue
        if declared[p.lhs] != p.symbol.sort:
            out.append(Diagnostic("error", "sort-mismatch",
                                  f"{p}: {p.symbol.kind} produces {p.symbol.sort}, "
                                  f"lhs has sort {declared[p.lhs]}"))
        for a, want in zip(p.args, p.symbol.arg_sorts):
            got = _arg_sort(g, a)
            if got is not None and got != want:
                out.append(Diagnostic("error", "sort-mismatch",
                                      f"{p}: argument of sort {got} where {want} expected"))
    if not any(d.severity == "error" for d in out):
        productive = _productive(g)
        for name, _ in g.nonterminals:
            if name not in productive:
                out.append(Diagnostic("warning", "unproductive",
                                      f"nonterminal {name!r} derives no finite tree"))
    return out


def check(g: Rtg) -> Rtg:
    """Raise on error-severity diagnostics, pass warnings through."""
    errors = [d for d in validate(g) if d.severity == "error"]
    if errors:
        raise GrammarError("; ".join(d.message for d in errors))
    return g


def _productive(g: Rtg) -> set[str]:
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs in productive:
                continue
            ok = all(isinstance(a, Term) or a in productive for a in p.args)
            if ok:
                productive.add(p.lhs)
                changed = True
    return productive


def reachable(g: Rtg, roots: Iterable[str]) -> set[str]:
    seen = set(roots)
    work = list(seen)
    while work:
        nt = work.pop()
        for p in g.by_lhs.get(nt, ()):
            for a in p.args:
                if isinstance(a, str) and a not in seen:
                    seen.add(a)
                    work.append(a)
    return seen


# -- example-set semantics ---------------------------------------------------

@dataclass(frozen=True)
class ExampleSet:
    variables: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]  # one row per example, aligned with variables

    def __post_init__(self):
        if not self.rows:
            raise GrammarError("an example set needs at least one example")
        for r in self.rows:
            if len(r) != len(self.variables):
                raise GrammarError("example row arity mismatch")

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def var_vector(self, x: str) -> tuple[int, ...]:
        try:
            i = self.variables.index(x)
        except ValueError:
            raise GrammarError(f"unbound variable {x!r}") from None
        return tuple(r[i] for r in self.rows)

    def point(self, j: int) -> dict[str, int]:
        return dict(zip(self.variables, self.rows[j]))

    def points(self) -> list[dict[str, int]]:
        return [self.point(j) for j in range(self.dimension)]

    @staticmethod
    def from_points(points: Iterable[Mapping[str, int]],
                    variables: Iterable[str] | None = None) -> "ExampleSet":
        points = list(points)
        if variables is None:
            variables = sorted({v for p in points for v in p})
        vs = tuple(variables)
        return ExampleSet(vs, tuple(tuple(int(p[v]) for v in vs) for p in points))


def eval_term(t: Term, e: ExampleSet) -> tuple:
    """Componentwise value of a term on every example; Int terms yield an
    int vector, Bool terms a bool vector."""
    k = t.symbol.kind
    if k == NUM:
        return (t.symbol.value,) * e.dimension
    if k == VAR:
        return e.var_vector(t.symbol.name)
    if k == NEGVAR:
        return tuple(-v for v in e.var_vector(t.symbol.name))
    return _apply(t.symbol, [eval_term(c, e) for c in t.children])


# -- bounded enumeration -----------------------------------------------------

def enumerate_trees(g: Rtg, nt: str, depth: int) -> Iterator[Term]:
    """Every tree of height <= depth derivable from nt, each exactly once.

    Deterministic order: by height, then production declaration order, then
    child combinations left to right.  A leaf has height 1; alias
    productions add no node and no height.
    """
    upto: dict[str, list[Term]] = {n: [] for n, _ in g.nonterminals}
    seen: dict[str, set[Term]] = {n: set() for n, _ in g.nonterminals}

    def materialize(a: Arg, h: int) -> list[Term]:
        if isinstance(a, Term):
            return [a] if h >= 1 else []
        return [t for t in upto[a] if t.height() <= h]

    for h in range(1, depth + 1):
        added = True
        # alias productions may chain; iterate until the level is stable
        while added:
            added = False
            for p in g.productions:
                if p.is_alias:
                    for t in list(upto[p.args[0]]):
                        if t.height() <= h and t not in seen[p.lhs]:
                            seen[p.lhs].add(t)
                            upto[p.lhs].append(t)
                            added = True
                    continue
                if p.symbol.rank == 0:
                    t = Term(p.symbol)
                    if t.height() <= h and t not in seen[p.lhs]:
                        seen[p.lhs].add(t)
                        upto[p.lhs].append(t)
                        added = True
                    continue
                pools = [materialize(a, h - 1) for a in p.args]
                if any(not pool for pool in pools):
                    continue
                for combo in itertools.product(*pools):
                    t = Term(p.symbol, tuple(combo))
                    if t not in seen[p.lhs]:
                        seen[p.lhs].add(t)
                        upto[p.lhs].append(t)
                        added = True
    for t in sorted(upto.get(nt, []), key=lambda t: t.height()):
        yield t


def reachable_values(g: Rtg, nt: str, depth: int, e: ExampleSet,
                     max_values: int = 200_000) -> dict[tuple, Term]:
    """Output vector -> one representative tree, over all trees of height
    <= depth from nt.  Equivalent trees are merged as they are built, so
    this scales where full tree enumeration cannot; it is the bounded
    oracle for the combine-over-all-derivations semantics."""
    banks: dict[str, dict[tuple, Term]] = {n: {} for n, _ in g.nonterminals}

    def settle_aliases() -> None:
        moved = True
        while moved:
            moved = False
            for p in g.productions:
                if not p.is_alias:
                    continue
                for v, t in list(banks[p.args[0]].items()):
                    if v not in banks[p.lhs]:
                        banks[p.lhs][v] = t
                        moved = True

    def argvals(a: Arg) -> list[tuple[tuple, Term | None]]:
        if isinstance(a, Term):
            return [(eval_term(a, e), None)]
        return [(v, t) for v, t in banks[a].items()]

    for _ in range(depth):
        fresh: list[tuple[str, tuple, Term]] = []
        for p in g.productions:
            if p.is_alias:
                continue
            if p.symbol.rank == 0:
                t = Term(p.symbol)
                v = eval_term(t, e)
                if v not in banks[p.lhs]:
                    fresh.append((p.lhs, v, t))
                continue
            pools = [argvals(a) for a in p.args]
            if any(not pool for pool in pools):
                continue
            for combo in itertools.product(*pools):
                children = tuple(a if isinstance(a, Term) else t
                                 for a, (_, t) in zip(p.args, combo))
                vec = _apply(p.symbol, [v for v, _ in combo])
                if vec not in banks[p.lhs]:
                    t = Term(p.symbol, children)
                    fresh.append((p.lhs, vec, t))
        for lhs, v, t in fresh:
            if v not in banks[lhs]:
                banks[lhs][v] = t
        settle_aliases()
        if sum(len(b) for b in banks.values()) > max_values:
            raise GrammarError(f"value enumeration exceeded {max_values} entries")
    return dict(banks.get(nt, {}))


def _apply(sym: Symbol, vals: list[tuple]) -> tuple:
    k = sym.kind
    if k == PLUS:
        return tuple(sum(col) for col in zip(*vals))
    if k == MINUS:
        return tuple(a - b for a, b in zip(*vals))
    if k == DOUBLE:
        return tuple(2 * a for a in vals[0])
    if k == INC:
        return tuple(a + 1 for a in vals[0])
    if k == ITE:
        b, x, y = vals
        return tuple(xi if bi else yi for bi, xi, yi in zip(b, x, y))
    if k == AND:
        return tuple(a and b for a, b in zip(*vals))
    if k == NOT:
        return tuple(not a for a in vals[0])
    if k == LESSTHAN:
        return tuple(a < b for a, b in zip(*vals))
    raise GrammarError(f"cannot apply symbol {sym}")


# -- n-ary Plus expansion ----------------------------------------------------

def expand_nary(g: Rtg) -> Rtg:
    """Binarize every Plus of arity n > 2 with a chain of fresh nonterminals.

    ``X ::= Plus(a1, .., an)`` becomes ``X ::= Plus(S1, an)`` with
    ``Si ::= Plus(S(i+1), a(n-i))`` and the chain bottoming out in a1 (a
    fresh unit nonterminal when a1 is an inline leaf, a1 itself when it is
    a nonterminal).  Fresh names count S1, S2, .. skipping declared names.
    Binary grammars come back unchanged.
    """
    if all(p.is_alias or p.symbol.kind != PLUS or p.symbol.rank == 2
           for p in g.productions):
        return g

    taken = {n for n, _ in g.nonterminals}
    counter = itertools.count(1)

    def fresh() -> str:
        while True:
            name = f"S{next(counter)}"
            if name not in taken:
                taken.add(name)
                return name

    new_nts: list[tuple[str, str]] = list(g.nonterminals)
    new_prods: list[Production] = []
    for p in g.productions:
        if p.is_alias or p.symbol.kind != PLUS or p.symbol.rank == 2:
            new_prods.append(p)
            continue
        args = p.args
        n = len(args)
        chain_len = n - 1 if isinstance(args[0], Term) else n - 2
        names = [fresh() for _ in range(chain_len)]
        for name in names:
            new_nts.append((name, INT))
        top = names[0]
        new_prods.append(Production(p.lhs, plus(2), (top, args[-1])))
        for i in range(chain_len - 1):
            below = names[i + 1]
            new_prods.append(Production(names[i], plus(2), (below, args[n - 2 - i])))
        if isinstance(args[0], Term):
            new_prods.append(Production(names[-1], args[0].symbol, ()))
        else:
            new_prods.append(Production(names[-1], plus(2), (args[0], args[1])))
    return Rtg(tuple(new_nts), g.start, tuple(new_prods))
