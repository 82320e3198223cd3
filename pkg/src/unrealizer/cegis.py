"""Unrealizability checking on finite example sets, and the surrounding
counterexample-guided loop.

One round: decide the example-restricted problem exactly (unsat proves
the full problem unrealizable), otherwise ask the enumerative
synthesizer for a candidate correct on the persistent examples and
verify it on all inputs.  Verified candidates settle realizability;
counterexamples grow the persistent examples; when the synthesizer
comes up empty, a temporary random example strengthens the next check.
"""

import json
import queue
import random
import threading
import time
from dataclasses import dataclass, field

from . import approx, clia, logic, synth
from .frontend import specialize
from .grammar import ExampleSet, Term
from .ilp import BudgetExceeded, Solver


@dataclass
class Budgets:
    seconds: float = 60.0
    max_size: int = 20
    max_rounds: int = 20
    max_terms: int = 200_000


@dataclass
class CheckResult:
    verdict: str               # "Unrealizable" | "Realizable" | "Unknown"
    query: str | None = None   # "sat" | "unsat"
    values: dict | None = None
    witness: dict | None = None
    reason: str | None = None
    stats: dict = field(default_factory=dict)


def check_unrealizable(g, spec, e, solver=None, mode="sl"):
    """Exact decision on the examples in ``e`` (semi-linear mode), or a
    sound one-sided answer (predicate-abstraction mode)."""
    solver = solver if solver is not None else Solver()
    ps = specialize(spec, e)
    try:
        if mode == "predabs":
            dom = approx.parity_domain()
            values = approx.predabs_solve(g, e, dom)
            gamma = dom.concretize(values[g.start],
                                   logic.output_names(e.dimension))
            status, witness = logic.decide(
                logic.conj(gamma, ps.conjunction()), solver)
            if status == "unsat":
                return CheckResult("Unrealizable", status, values)
            return CheckResult("Unknown", status, values, witness,
                               "abstraction-sat")
        result = clia.solve(g, e, solver)
        stats = {"strata": len(result.strata),
                 "mutual_iterations": {"+".join(k): v for k, v in
                                       result.mutual_iterations.items()}}
        query = logic.build_query(result.values[g.start], ps)
        status, witness = logic.decide(query, solver)
        if status == "unsat":
            return CheckResult("Unrealizable", status, result.values,
                               stats=stats)
        return CheckResult("Realizable", status, result.values, witness,
                           stats=stats)
    except BudgetExceeded:
        return CheckResult("Unknown", reason="ilp-budget")


@dataclass
class Verdict:
    verdict: str               # "Unrealizable" | "Realizable" | "Unknown"
    witness: Term | None = None
    reason: str | None = None
    examples: list = field(default_factory=list)
    iterations: int = 0
    trace: list = field(default_factory=list)

    def payload(self):
        return {
            "verdict": self.verdict,
            "witness": self.witness.to_sexpr() if self.witness else None,
            "reason": self.reason,
            "examples": [list(r) for r in self.examples],
            "iterations": self.iterations,
            "trace": self.trace,
        }

    def to_json(self):
        return json.dumps(self.payload(), sort_keys=True,
                          separators=(",", ":"))


def _draw(rng, variables, taken):
    if not variables:
        return () if () not in taken else None
    for _ in range(10_000):
        row = tuple(rng.randint(-50, 50) for _ in variables)
        if row not in taken:
            return row
    return None


def _round_record(k, e_main, e_rand, check):
    return {
        "round": k,
        "examples": [list(r) for r in e_main],
        "random": [list(r) for r in e_rand],
        "check": check.verdict,
        "query": check.query,
        "start_value": None,
        "synth": None, "candidate": None, "verify": None, "cex": None,
    }


def run_cegis(problem, seed=0, sequential=True, budgets=None, mode="sl",
              solver=None):
    budgets = budgets if budgets is not None else Budgets()
    solver = solver if solver is not None else Solver()
    g, spec, variables = problem.grammar, problem.spec, problem.variables
    rng = random.Random(seed)
    deadline = time.monotonic() + budgets.seconds
    e_main = [_draw(rng, variables, set())]
    e_rand = []
    trace = []

    for k in range(1, budgets.max_rounds + 1):
        if time.monotonic() > deadline:
            return Verdict("Unknown", reason="budget", examples=e_main,
                           iterations=k - 1, trace=trace)
        rows = tuple(e_main) + tuple(e_rand)
        check = check_unrealizable(g, spec, ExampleSet(variables, rows),
                                   solver, mode)
        rec = _round_record(k, e_main, e_rand, check)
        if check.values is not None:
            rec["start_value"] = _value_str(check.values[g.start])
        trace.append(rec)
        if check.verdict == "Unrealizable":
            return Verdict("Unrealizable", examples=list(rows),
                           iterations=k, trace=trace)

        if sequential:
            outcome = synth.enumerate_solve(
                g, specialize(spec, ExampleSet(variables, tuple(e_main))),
                ExampleSet(variables, tuple(e_main)),
                max_size=budgets.max_size, max_terms=budgets.max_terms)
        else:
            outcome = _race_round(g, spec, variables, e_main, e_rand, rng,
                                  budgets, mode, solver, deadline)
            if isinstance(outcome, Verdict):
                outcome.trace = trace + outcome.trace
                outcome.iterations = k
                return outcome
        rec["synth"] = outcome.status
        if outcome.candidate is None:
            row = _draw(rng, variables, set(rows))
            if row is None:
                return Verdict("Unknown", reason="inputs-exhausted",
                               examples=e_main, iterations=k, trace=trace)
            e_rand.append(row)
            continue

        term = outcome.candidate.term
        rec["candidate"] = term.to_sexpr()
        status, cex = synth.verify(term, spec, variables, solver)
        rec["verify"] = status
        if status == "valid":
            return Verdict("Realizable", witness=term, examples=e_main,
                           iterations=k, trace=trace)
        if status == "valid-unknown":
            return Verdict("Realizable", witness=term,
                           reason="valid-unknown", examples=e_main,
                           iterations=k, trace=trace)
        rec["cex"] = list(cex)
        assert tuple(cex) not in e_main
        e_main.append(tuple(cex))
        e_rand = []

    return Verdict("Unknown", reason="max-rounds", examples=e_main,
                   iterations=budgets.max_rounds, trace=trace)


def _value_str(v):
    if isinstance(v, frozenset):
        if all(isinstance(x, str) for x in v):
            return "{" + ",".join(sorted(v)) + "}"
        from .booldom import bset_str
        return bset_str(v)
    return str(v)


def _race_round(g, spec, variables, e_main, e_rand, rng, budgets, mode,
                solver, deadline):
    """Parallel round: the synthesizer races a loop of checks on growing
    random example sets.  First definitive answer wins."""
    stop = threading.Event()
    results = queue.Queue()

    def checker():
        local = list(e_rand)
        while not stop.is_set():
            rows = tuple(e_main) + tuple(local)
            res = check_unrealizable(g, spec, ExampleSet(variables, rows),
                                     Solver(), mode)
            if res.verdict == "Unrealizable":
                results.put(("unrealizable", rows))
                return
            if res.verdict == "Unknown":
                results.put(("check-unknown", None))
                return
            row = _draw(rng, variables, set(rows))
            if row is None:
                results.put(("check-unknown", None))
                return
            local.append(row)

    def solver_task():
        out = synth.enumerate_solve(
            g, specialize(spec, ExampleSet(variables, tuple(e_main))),
            ExampleSet(variables, tuple(e_main)),
            max_size=budgets.max_size, max_terms=budgets.max_terms,
            stop=stop)
        results.put(("synth", out))

    threads = [threading.Thread(target=checker, daemon=True),
               threading.Thread(target=solver_task, daemon=True)]
    for t in threads:
        t.start()
    verdict = None
    outcome = synth.SynthOutcome("budget", None, 0)
    pending = 2
    while pending:
        timeout = deadline - time.monotonic()
        if timeout <= 0:
            break
        try:
            kind, val = results.get(timeout=timeout)
        except queue.Empty:
            break
        pending -= 1
        if kind == "unrealizable":
            verdict = Verdict("Unrealizable", examples=list(val), trace=[])
            break
        if kind == "synth":
            outcome = val
            if val.candidate is not None:
                break
    stop.set()
    for t in threads:
        t.join(timeout=5.0)
    return verdict if verdict is not None else outcome
