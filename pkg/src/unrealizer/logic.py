"""Linear integer arithmetic formulas over named variables.

Two layers share this representation: specifications (atoms over the
declared inputs plus the function-output slot) and concretizations of
abstract values (atoms over output coordinates ``o1..od`` with
existentially quantified multiplier variables).  Deciding a formula
compiles it to disjunctive normal form and hands each branch to the
exact integer solver.
"""

from dataclasses import dataclass

from . import ilp

RELOPS = ("=", "<", "<=", ">", ">=", "!=")


@dataclass(frozen=True, order=True)
class LinTerm:
    """Integer-linear expression: sum of coeff*var products plus a constant."""

    coeffs: tuple[tuple[str, int], ...]
    const: int = 0

    def evaluate(self, env):
        return sum(c * int(env[v]) for v, c in self.coeffs) + self.const

    def variables(self):
        return {v for v, _ in self.coeffs}

    def __str__(self):
        parts = []
        for v, c in self.coeffs:
            parts.append(f"{c}*{v}" if c != 1 else v)
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


def lin(coeffs=(), const=0):
    if hasattr(coeffs, "items"):
        coeffs = coeffs.items()
    acc = {}
    for v, c in coeffs:
        acc[v] = acc.get(v, 0) + c
    return LinTerm(tuple(sorted((v, c) for v, c in acc.items() if c)), const)


def lin_add(a, b):
    return lin(tuple(a.coeffs) + tuple(b.coeffs), a.const + b.const)


def lin_scale(a, k):
    return lin(tuple((v, k * c) for v, c in a.coeffs), k * a.const)


def lin_sub(a, b):
    return lin_add(a, lin_scale(b, -1))


@dataclass(frozen=True)
class LiaFormula:
    """op is one of true/false/atom/and/or/not/exists.

    Atoms hold (lhs, relop, rhs); exists binds integer variables that
    are nonnegative when ``nonneg`` is set (the multiplier convention).
    """

    op: str
    args: tuple = ()
    atom: tuple = None
    bound: tuple = ()
    nonneg: bool = True


TRUE = LiaFormula("true")
FALSE = LiaFormula("false")


def atom(lhs, rel, rhs):
    if rel not in RELOPS:
        raise ValueError(f"unknown relation {rel!r}")
    if not isinstance(lhs, LinTerm):
        lhs = lin(const=int(lhs))
    if not isinstance(rhs, LinTerm):
        rhs = lin(const=int(rhs))
    return LiaFormula("atom", atom=(lhs, rel, rhs))


def conj(*fs):
    flat = []
    for f in fs:
        if f.op == "false":
            return FALSE
        if f.op == "true":
            continue
        flat.extend(f.args if f.op == "and" else (f,))
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return LiaFormula("and", tuple(flat))


def disj(*fs):
    flat = []
    for f in fs:
        if f.op == "true":
            return TRUE
        if f.op == "false":
            continue
        flat.extend(f.args if f.op == "or" else (f,))
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return LiaFormula("or", tuple(flat))


def neg(f):
    return LiaFormula("not", (f,))


def exists(bound, body, nonneg=True):
    if not bound:
        return body
    return LiaFormula("exists", (body,), bound=tuple(bound), nonneg=nonneg)


def free_vars(f):
    if f.op == "atom":
        return f.atom[0].variables() | f.atom[2].variables()
    if f.op == "exists":
        return free_vars(f.args[0]) - set(f.bound)
    out = set()
    for g in f.args:
        out |= free_vars(g)
    return out


def evaluate(f, env):
    """Evaluate a quantifier-free formula under an integer environment."""
    if f.op == "true":
        return True
    if f.op == "false":
        return False
    if f.op == "atom":
        lhs, rel, rhs = f.atom
        a, b = lhs.evaluate(env), rhs.evaluate(env)
        return {"=": a == b, "<": a < b, "<=": a <= b,
                ">": a > b, ">=": a >= b, "!=": a != b}[rel]
    if f.op == "and":
        return all(evaluate(g, env) for g in f.args)
    if f.op == "or":
        return any(evaluate(g, env) for g in f.args)
    if f.op == "not":
        return not evaluate(f.args[0], env)
    raise ValueError(f"cannot evaluate quantified formula ({f.op})")


def substitute(f, mapping):
    """Replace variables by LinTerms (or ints) throughout a formula."""
    terms = {v: t if isinstance(t, LinTerm) else lin(const=int(t))
             for v, t in mapping.items()}

    def sub_term(t):
        out = lin(const=t.const)
        for v, c in t.coeffs:
            out = lin_add(out, lin_scale(terms[v], c) if v in terms
                          else lin(((v, c),)))
        return out

    if f.op == "atom":
        lhs, rel, rhs = f.atom
        return LiaFormula("atom", atom=(sub_term(lhs), rel, sub_term(rhs)))
    if f.op in ("true", "false"):
        return f
    if f.op == "exists" and any(v in terms for v in f.bound):
        raise ValueError("substitution would capture a bound variable")
    return LiaFormula(f.op, tuple(substitute(g, mapping) for g in f.args),
                      bound=f.bound, nonneg=f.nonneg)


# --- normal forms -----------------------------------------------------------

_NEG_REL = {"=": None, "!=": "=", "<": None, "<=": None, ">": None, ">=": None}


def _positive_atom(lhs, rel, rhs):
    # normalize to {=, <, <=} with possibly a disjunctive split
    if rel == ">":
        return atom(rhs, "<", lhs)
    if rel == ">=":
        return atom(rhs, "<=", lhs)
    if rel == "!=":
        return disj(atom(lhs, "<", rhs), atom(rhs, "<", lhs))
    return atom(lhs, rel, rhs)


def _negated_atom(lhs, rel, rhs):
    if rel == "=":
        return disj(atom(lhs, "<", rhs), atom(rhs, "<", lhs))
    if rel == "!=":
        return atom(lhs, "=", rhs)
    if rel == "<":
        return atom(rhs, "<=", lhs)
    if rel == "<=":
        return atom(rhs, "<", lhs)
    if rel == ">":
        return atom(lhs, "<=", rhs)
    return atom(lhs, "<", rhs)  # rel == ">="


def nnf(f, negate=False):
    """Negation normal form; all atoms use {=, <, <=}."""
    if f.op == "true":
        return FALSE if negate else TRUE
    if f.op == "false":
        return TRUE if negate else FALSE
    if f.op == "atom":
        lhs, rel, rhs = f.atom
        return _negated_atom(lhs, rel, rhs) if negate \
            else _positive_atom(lhs, rel, rhs)
    if f.op == "not":
        return nnf(f.args[0], not negate)
    if f.op == "and":
        sub = tuple(nnf(g, negate) for g in f.args)
        return disj(*sub) if negate else conj(*sub)
    if f.op == "or":
        sub = tuple(nnf(g, negate) for g in f.args)
        return conj(*sub) if negate else disj(*sub)
    if f.op == "exists":
        if negate:
            raise ValueError("negation over a quantifier is not supported")
        return exists(f.bound, nnf(f.args[0]), f.nonneg)
    raise ValueError(f.op)


@dataclass(frozen=True)
class Branch:
    """One DNF branch: a conjunction of normalized atoms."""

    atoms: tuple
    nonneg: frozenset = frozenset()
    free_bound: frozenset = frozenset()


def dnf_branches(f):
    """DNF of a formula; bound variables are freshened to q1, q2, ..."""
    counter = [0]

    def fresh():
        counter[0] += 1
        return f"q{counter[0]}"

    def go(g, renaming):
        if g.op == "true":
            return [Branch(())]
        if g.op == "false":
            return []
        if g.op == "atom":
            lhs, rel, rhs = g.atom
            ren = {v: lin(((renaming[v], 1),)) for v in
                   (lhs.variables() | rhs.variables()) & renaming.keys()}
            if ren:
                g = substitute(g, ren)
            return [Branch((g.atom,))]
        if g.op == "or":
            out = []
            for h in g.args:
                out.extend(go(h, renaming))
            return out
        if g.op == "and":
            branches = [Branch(())]
            for h in g.args:
                sub = go(h, renaming)
                branches = [Branch(b.atoms + s.atoms,
                                   b.nonneg | s.nonneg,
                                   b.free_bound | s.free_bound)
                            for b in branches for s in sub]
            return branches
        if g.op == "exists":
            ren = dict(renaming)
            names = []
            for v in g.bound:
                ren[v] = fresh()
                names.append(ren[v])
            out = []
            for b in go(g.args[0], ren):
                if g.nonneg:
                    out.append(Branch(b.atoms, b.nonneg | set(names),
                                      b.free_bound))
                else:
                    out.append(Branch(b.atoms, b.nonneg,
                                      b.free_bound | set(names)))
            return out
        raise ValueError(g.op)

    return go(nnf(f), {})


def branch_system(b):
    varnames = set(b.nonneg) | set(b.free_bound)
    for lhs, _, rhs in b.atoms:
        varnames |= lhs.variables() | rhs.variables()
    variables = {v: v in b.nonneg for v in sorted(varnames)}
    cons = []
    for lhs, rel, rhs in b.atoms:
        diff = lin_sub(lhs, rhs)
        cons.append(ilp.constraint(dict(diff.coeffs), rel, -diff.const))
    return ilp.system(variables, cons)


def decide(f, solver):
    """Return ('sat', witness) or ('unsat', None); may raise BudgetExceeded."""
    for b in dnf_branches(f):
        res = solver.feasible(branch_system(b))
        if res.status == "sat":
            return "sat", dict(res.witness)
    return "unsat", None


# --- concretization ---------------------------------------------------------

def output_names(dim):
    return tuple(f"o{j + 1}" for j in range(dim))


def concretize(value, names=None):
    """Formula over the output coordinates whose models are the set's points."""
    if names is None:
        if value.dim is None:
            return FALSE
        names = output_names(value.dim)
    parts = []
    for comp in value.components:
        gens = tuple(comp.gens)
        lams = tuple(f"l{i + 1}" for i in range(len(gens)))
        eqs = []
        for j, name in enumerate(names):
            rhs = lin({lams[i]: g[j] for i, g in enumerate(gens)},
                      comp.base[j])
            eqs.append(atom(lin(((name, 1),)), "=", rhs))
        parts.append(exists(lams, conj(*eqs)))
    return disj(*parts)


def concretize_bools(bset, names):
    """Formula over 0/1 output coordinates matching a set of Boolean vectors."""
    parts = []
    for vec in sorted(bset, reverse=True):
        parts.append(conj(*(atom(lin(((n, 1),)), "=", 1 if b else 0)
                            for n, b in zip(names, vec))))
    return disj(*parts)


def build_query(value, ps):
    """Abstract start value constrained by the per-example specification."""
    names = output_names(len(ps.formulas))
    if isinstance(value, (frozenset, set)):
        gamma = concretize_bools(value, names)
    else:
        gamma = concretize(value, names)
    return conj(gamma, *ps.formulas)


# --- SMT-LIB rendering ------------------------------------------------------

def _render_lin(t):
    parts = []
    for v, c in t.coeffs:
        if c == 1:
            parts.append(v)
        else:
            parts.append(f"(* {_render_int(c)} {v})")
    if t.const or not parts:
        parts.append(_render_int(t.const))
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def _render_int(c):
    return str(c) if c >= 0 else f"(- {-c})"


def render(f):
    """S-expression body of a formula."""
    if f.op == "true":
        return "true"
    if f.op == "false":
        return "false"
    if f.op == "atom":
        lhs, rel, rhs = f.atom
        if rel == "!=":
            return f"(not (= {_render_lin(lhs)} {_render_lin(rhs)}))"
        return f"({rel} {_render_lin(lhs)} {_render_lin(rhs)})"
    if f.op in ("and", "or"):
        return f"({f.op} " + " ".join(render(g) for g in f.args) + ")"
    if f.op == "not":
        return f"(not {render(f.args[0])})"
    if f.op == "exists":
        decls = " ".join(f"({v} Int)" for v in f.bound)
        body = render(f.args[0])
        if f.nonneg:
            lows = " ".join(f"(>= {v} 0)" for v in f.bound)
            body = f"(and {lows} {body})"
        return f"(exists ({decls}) {body})"
    raise ValueError(f.op)


def to_smtlib(f):
    """Full SMT-LIB2 script deciding the formula; byte-stable."""
    lines = ["(set-logic LIA)"]
    for v in sorted(free_vars(f)):
        lines.append(f"(declare-const {v} Int)")
    lines.append(f"(assert {render(f)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"
