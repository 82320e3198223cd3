"""Semi-linear sets over Z^d, the exact abstract domain for integer outputs.

A linear set <u, {v1, .., vn}> denotes {u + l1*v1 + .. + ln*vn | li in N};
u is the base, the vi are generators.  A semi-linear set is a finite union
of linear sets.  With

    a (+) b   union of components
    a (x) b   pairwise base sums and generator unions
    a*        <0, all bases and generators of a>   (closure under (x))

semi-linear sets form a commutative idempotent omega-continuous semiring
with ZERO = {} (empty union) and ONE = {<0, {}>}.

Values are canonical on construction: generators are deduplicated, sorted,
and never zero; components are deduplicated and sorted; so structural
equality is semantic equality of the written form.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable

Vector = tuple[int, ...]


@dataclass(frozen=True, order=True)
class LinearSet:
    base: Vector
    gens: tuple[Vector, ...]

    def __str__(self) -> str:
        gens = ",".join(_fmt_vec(v) for v in self.gens)
        return f"<{_fmt_vec(self.base)},{{{gens}}}>"


def _fmt_vec(v: Vector) -> str:
    return "(" + ",".join(str(c) for c in v) + ")"


def linset(base: Iterable[int], gens: Iterable[Iterable[int]] = ()) -> LinearSet:
    """Canonical linear set: gens sorted, deduplicated, zero vectors dropped."""
    b = tuple(int(c) for c in base)
    gs = set()
    for g in gens:
        g = tuple(int(c) for c in g)
        if len(g) != len(b):
            raise ValueError(f"generator dimension {len(g)} != base dimension {len(b)}")
        if any(g):
            gs.add(g)
    return LinearSet(b, tuple(sorted(gs)))


@dataclass(frozen=True)
class SemiLinearSet:
    components: tuple[LinearSet, ...]

    @property
    def dim(self) -> int | None:
        """Dimension of the ambient space; None for the empty set."""
        return len(self.components[0].base) if self.components else None

    @property
    def is_zero(self) -> bool:
        return not self.components

    def __str__(self) -> str:
        return "{" + ",".join(str(c) for c in self.components) + "}"

    def combine(self, other: "SemiLinearSet") -> "SemiLinearSet":
        """(+): union of the two sets of components."""
        _check_dims(self, other)
        return sls(self.components + other.components)

    def extend(self, other: "SemiLinearSet") -> "SemiLinearSet":
        """(x): pointwise sums, {<u1+u2, V1 | V2>} for all component pairs."""
        _check_dims(self, other)
        out = []
        for a, b in product(self.components, other.components):
            base = tuple(x + y for x, y in zip(a.base, b.base))
            out.append(linset(base, a.gens + b.gens))
        return sls(out)

    def star(self, dim: int | None = None) -> "SemiLinearSet":
        """Closure under (x): <0, union of all bases and generators>.

        Valid only because (+) is idempotent and (x) commutative; the single
        component absorbs every finite product of components.

        ZERO* is ONE but carries no dimension of its own; callers that may
        star ZERO must pass the ambient dimension.
        """
        d = self.dim if self.dim is not None else dim
        if d is None:
            raise ValueError("star of the empty semi-linear set needs an explicit dimension")
        if self.is_zero:
            return one(d)
        gens: list[Vector] = []
        for c in self.components:
            gens.append(c.base)
            gens.extend(c.gens)
        return sls([linset((0,) * d, gens)])

    def project(self, mask: tuple[bool, ...]) -> "SemiLinearSet":
        """proj_SL: zero out every coordinate whose mask entry is False."""
        if self.is_zero:
            return self
        if len(mask) != self.dim:
            raise ValueError("mask dimension mismatch")
        out = []
        for c in self.components:
            base = tuple(x if m else 0 for x, m in zip(c.base, mask))
            gens = [tuple(x if m else 0 for x, m in zip(g, mask)) for g in c.gens]
            out.append(linset(base, gens))
        return sls(out)

    def size(self) -> int:
        """Sum over components of (generator count + 1)."""
        return sum(len(c.gens) + 1 for c in self.components)

    def gamma_bounded(self, budget: int) -> frozenset[Vector]:
        """All points u + sum(l_i * v_i) with every 0 <= l_i <= budget.

        A finite underapproximation of the concretization, used as a testing
        oracle and as a cheap positive witness source.
        """
        pts: set[Vector] = set()
        for c in self.components:
            for ls in product(range(budget + 1), repeat=len(c.gens)):
                pts.add(tuple(b + sum(l * g[i] for l, g in zip(ls, c.gens))
                              for i, b in enumerate(c.base)))
        return frozenset(pts)

    def to_json(self) -> dict:
        return {"components": [{"base": list(c.base), "gens": [list(g) for g in c.gens]}
                               for c in self.components]}

    @staticmethod
    def from_json(data: dict) -> "SemiLinearSet":
        return sls([linset(c["base"], c["gens"]) for c in data["components"]])


def _check_dims(a: SemiLinearSet, b: SemiLinearSet) -> None:
    if a.dim is not None and b.dim is not None and a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def sls(components: Iterable[LinearSet]) -> SemiLinearSet:
    """Canonical semi-linear set: components deduplicated and sorted."""
    comps = sorted(set(components))
    dims = {len(c.base) for c in comps}
    if len(dims) > 1:
        raise ValueError(f"mixed component dimensions {sorted(dims)}")
    return SemiLinearSet(tuple(comps))


ZERO = SemiLinearSet(())


def zero() -> SemiLinearSet:
    return ZERO


def one(dim: int) -> SemiLinearSet:
    return sls([linset((0,) * dim)])


def singleton(point: Iterable[int]) -> SemiLinearSet:
    return sls([linset(point)])


def combine_all(parts: Iterable[SemiLinearSet]) -> SemiLinearSet:
    acc = ZERO
    for p in parts:
        acc = acc.combine(p)
    return acc


MemberFn = Callable[[Vector, LinearSet], bool]


def prune(a: SemiLinearSet, member: MemberFn) -> SemiLinearSet:
    """Drop components subsumed by another component.

    <u1,V1> is dropped when some surviving <u2,V2> has V1 a subset of V2 and
    u1 a member of <u2,V2>; membership is decided by the caller-supplied
    `member` (an exact integer feasibility check).  Removal never changes
    the denoted set.  Deterministic: components are examined in canonical
    order, and a component is only dropped in favour of one still alive.
    """
    comps = list(a.components)
    alive = [True] * len(comps)
    for i, c in enumerate(comps):
        ci_gens = set(c.gens)
        for j, d in enumerate(comps):
            if i == j or not alive[j]:
                continue
            if ci_gens <= set(d.gens) and member(c.base, d):
                alive[i] = False
                break
    return sls([c for c, keep in zip(comps, alive) if keep])
