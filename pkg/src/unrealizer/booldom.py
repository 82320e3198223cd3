"""Finite powerset domain over Boolean vectors of dimension |E|.

A Boolean nonterminal's abstract value is the set of guard vectors its
trees can evaluate to.  Not and And act elementwise on members.  LessThan
compares two semi-linear integer abstractions: a vector b belongs to the
result iff some concrete o1, o2 drawn from the two concretizations satisfy
b = (o1 < o2) coordinatewise, decided per sign pattern by exact integer
feasibility, with a bounded concretization scan as a cheap positive
witness pass before any feasibility call.
"""

from __future__ import annotations

import itertools
import threading

from . import ilp
from .semilinear import LinearSet, SemiLinearSet

BoolVec = tuple[bool, ...]
BoolVecSet = frozenset  # of BoolVec

_GAMMA_PAIR_CAP = 4096  # max candidate pairs scanned in the witness pass


def mask_str(b: BoolVec) -> str:
    return "".join("t" if x else "f" for x in b)


def parse_mask(s: str) -> BoolVec:
    return tuple(c == "t" for c in s)


def bset_str(bs: BoolVecSet) -> str:
    return "{" + ",".join(mask_str(b) for b in sorted(bs, reverse=True)) + "}"


def neg(b: BoolVec) -> BoolVec:
    return tuple(not x for x in b)


def conj(a: BoolVec, b: BoolVec) -> BoolVec:
    return tuple(x and y for x, y in zip(a, b))


def all_true(dim: int) -> BoolVec:
    return (True,) * dim


def proj_z(v: tuple[int, ...], b: BoolVec) -> tuple[int, ...]:
    """Zero out the coordinates where b is false."""
    return tuple(x if m else 0 for x, m in zip(v, b))


def abs_not(bs: BoolVecSet) -> BoolVecSet:
    return frozenset(neg(b) for b in bs)


def abs_and(b1: BoolVecSet, b2: BoolVecSet) -> BoolVecSet:
    return frozenset(conj(a, b) for a in b1 for b in b2)


def _pattern_system(c1: LinearSet, c2: LinearSet, pattern: BoolVec) -> ilp.IlpSystem:
    """Feasibility of: o1 in c1, o2 in c2, (o1 < o2) == pattern coordinatewise."""
    variables: dict[str, bool] = {}
    cons: list[ilp.Constraint] = []
    for tag, c in (("a", c1), ("b", c2)):
        for j in range(len(c.gens)):
            variables[f"{tag}{j}"] = True
    for i, want in enumerate(pattern):
        # o1_i - o2_i expressed over the generator multipliers
        coeffs: dict[str, int] = {}
        for j, g in enumerate(c1.gens):
            coeffs[f"a{j}"] = coeffs.get(f"a{j}", 0) + g[i]
        for j, g in enumerate(c2.gens):
            coeffs[f"b{j}"] = coeffs.get(f"b{j}", 0) - g[i]
        const = c1.base[i] - c2.base[i]
        if want:  # o1_i < o2_i
            cons.append(ilp.constraint(coeffs, ilp.LT, -const))
        else:     # o1_i >= o2_i, i.e. -(o1_i - o2_i) <= 0
            cons.append(ilp.constraint({v: -k for v, k in coeffs.items()}, ilp.LE, const))
    return ilp.system(variables, cons)


class LessThanCache:
    """Memoized abs_less_than over one fixed dimension.

    Safe for concurrent use: the memo table sits behind a lock, and entries
    are only written once fully computed.
    """

    def __init__(self, solver: ilp.Solver):
        self.solver = solver
        self._memo: dict[tuple, BoolVecSet] = {}
        self._lock = threading.Lock()

    def abs_less_than(self, sl1: SemiLinearSet, sl2: SemiLinearSet) -> BoolVecSet:
        key = (sl1, sl2)
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = self._compute(sl1, sl2)
        with self._lock:
            self._memo[key] = result
        return result

    def _compute(self, sl1: SemiLinearSet, sl2: SemiLinearSet) -> BoolVecSet:
        if sl1.is_zero or sl2.is_zero:
            return frozenset()
        d = sl1.dim
        if sl2.dim != d:
            raise ValueError("dimension mismatch")
        found: set[BoolVec] = set()
        # positive witnesses from bounded concretizations, no feasibility calls
        g1 = sorted(sl1.gamma_bounded(2))
        g2 = sorted(sl2.gamma_bounded(2))
        if len(g1) * len(g2) <= _GAMMA_PAIR_CAP:
            for v1 in g1:
                for v2 in g2:
                    found.add(tuple(a < b for a, b in zip(v1, v2)))
        undecided = [p for p in itertools.product((True, False), repeat=d)
                     if p not in found]
        for pattern in undecided:
            if self._pattern_feasible(sl1, sl2, pattern):
                found.add(pattern)
        return frozenset(found)

    def _pattern_feasible(self, sl1: SemiLinearSet, sl2: SemiLinearSet,
                          pattern: BoolVec) -> bool:
        for c1 in sl1.components:
            for c2 in sl2.components:
                if self.solver.feasible(_pattern_system(c1, c2, pattern)).status == "sat":
                    return True
        return False


def abs_less_than(sl1: SemiLinearSet, sl2: SemiLinearSet,
                  solver: ilp.Solver) -> BoolVecSet:
    """One-shot form; long-running solves should hold a LessThanCache."""
    return LessThanCache(solver).abs_less_than(sl1, sl2)
