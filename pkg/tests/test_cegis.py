import json
from pathlib import Path

from unrealizer import cegis
from unrealizer import grammar as gr
from unrealizer.cegis import Budgets, CheckResult, Verdict, check_unrealizable, run_cegis
from unrealizer.frontend import parse_problem
from unrealizer.ilp import Solver

PROBLEMS = Path(__file__).parent / "problems"


def _problem(name):
    return parse_problem((PROBLEMS / name).read_text())


def _examples(p, rows):
    return gr.ExampleSet(p.variables, tuple(tuple(r) for r in rows))


def test_check_refutes_triple_sums_on_one_example():
    p = _problem("g1.sy")
    res = check_unrealizable(p.grammar, p.spec, _examples(p, [(1,)]))
    # multiples of 3 never hit 2*1+2 = 4
    assert res.verdict == "Unrealizable"
    assert res.query == "unsat"
    assert str(res.values["Start"]) == "{<(0),{(3)}>}"
    assert res.stats["strata"] >= 1


def test_check_sat_reports_witness():
    p = _problem("g1.sy")
    res = check_unrealizable(p.grammar, p.spec, _examples(p, [(-1,)]))
    # 2*(-1)+2 = 0 is the empty sum: consistent, so no refutation here
    assert res.verdict == "Realizable"
    assert res.query == "sat"
    assert res.witness is not None


def test_check_two_examples_conditional_grammar():
    p = _problem("g2.sy")
    res = check_unrealizable(p.grammar, p.spec, _examples(p, [(1,), (2,)]))
    # a consistent conditional term exists on x in {1,2}: sat, not refuted
    assert res.verdict == "Realizable"
    assert res.stats["mutual_iterations"] == {"BExp+Start": 2}
    res2 = check_unrealizable(p.grammar, p.spec, _examples(p, [(0,)]))
    # x=0 collapses every sum to 0 while the target is 2: refuted
    assert res2.verdict == "Unrealizable"


def test_check_predabs_mode():
    p = _problem("parity.sy")
    res = check_unrealizable(p.grammar, p.spec, _examples(p, [(3,)]),
                             mode="predabs")
    assert res.verdict == "Unrealizable"
    assert res.values[p.grammar.start] == frozenset({"even"})
    g1 = _problem("g1.sy")
    res2 = check_unrealizable(g1.grammar, g1.spec, _examples(g1, [(1,)]),
                              mode="predabs")
    # the target 2x+2 is even, so parity alone cannot refute
    assert res2.verdict == "Unknown"
    assert res2.reason == "abstraction-sat"


def test_cegis_triple_sum_seed0():
    v = run_cegis(_problem("g1.sy"), seed=0, sequential=True)
    assert v.verdict == "Unrealizable"
    assert v.examples == [(-1,), (0,)]
    assert v.iterations == 2
    r1, r2 = v.trace
    assert r1["check"] == "Realizable"
    assert r1["candidate"] == "0"
    assert r1["verify"] == "cex"
    assert r1["cex"] == [0]
    assert r2["check"] == "Unrealizable"
    assert r2["query"] == "unsat"
    assert r2["examples"] == [[-1], [0]]


def test_cegis_conditional_grammar_seed0():
    v = run_cegis(_problem("g2.sy"), seed=0, sequential=True)
    assert v.verdict == "Unrealizable"
    # same counterexample path: x=0 forces every term to 0, target is 2
    assert v.examples == [(-1,), (0,)]
    assert v.iterations == 2


def test_cegis_constant_grammar_hits_round_limit():
    v = run_cegis(_problem("gconst.sy"), seed=0, sequential=True,
                  budgets=Budgets(max_rounds=5))
    assert v.verdict == "Unknown"
    assert v.reason == "max-rounds"
    assert v.iterations == 5
    # every round: sat check, constant candidate, counterexample at the
    # candidate's value (f(x) > x fails first at x = value)
    for rec in v.trace:
        assert rec["check"] == "Realizable"
        assert rec["verify"] == "cex"
    assert v.trace[0]["candidate"] == "1"
    assert v.trace[0]["cex"] == [1]


def test_cegis_realizable_candidate():
    text = """
(set-logic LIA)
(synth-fun f ((x Int)) Int
  ((Start Int (x 0 (+ Start Start)))))
(constraint (= (f x) (+ x x)))
(check-synth)
"""
    v = run_cegis(parse_problem(text), seed=0, sequential=True)
    assert v.verdict == "Realizable"
    assert v.witness is not None
    assert v.witness.to_sexpr() in ("(+ x x)",)
    assert v.reason is None


def test_cegis_zero_budget_is_unknown():
    v = run_cegis(_problem("g1.sy"), seed=0,
                  budgets=Budgets(seconds=0.0))
    assert v.verdict == "Unknown"
    assert v.reason == "budget"
    assert v.iterations == 0


def test_cegis_zero_arity_exhausts_inputs():
    text = """
(set-logic LIA)
(synth-fun f () Int ((Start Int ((+ Start Start) 1))))
(constraint (= (f) 4))
(check-synth)
"""
    v = run_cegis(parse_problem(text), seed=0,
                  budgets=Budgets(max_size=3))
    assert v.verdict == "Unknown"
    assert v.reason == "inputs-exhausted"


def test_cegis_parallel_agrees_on_verdict():
    v = run_cegis(_problem("g1.sy"), seed=0, sequential=False)
    assert v.verdict == "Unrealizable"


def test_cegis_predabs_mode_end_to_end():
    v = run_cegis(_problem("parity.sy"), seed=0, sequential=True,
                  mode="predabs")
    assert v.verdict == "Unrealizable"
    assert v.iterations == 1
    assert v.trace[0]["start_value"] == "{even}"


def test_trace_records_start_values():
    v = run_cegis(_problem("g1.sy"), seed=0, sequential=True)
    assert v.trace[0]["start_value"] == "{<(0),{(-3)}>}"
    assert v.trace[1]["start_value"] == "{<(0,0),{(-3,0)}>}"


def test_verdict_json_shape_and_determinism():
    p = _problem("g1.sy")
    a = run_cegis(p, seed=0, sequential=True).to_json()
    b = run_cegis(p, seed=0, sequential=True).to_json()
    assert a == b
    payload = json.loads(a)
    assert sorted(payload) == ["examples", "iterations", "reason",
                               "trace", "verdict", "witness"]
    assert payload["verdict"] == "Unrealizable"
    assert payload["witness"] is None
    assert payload["examples"] == [[-1], [0]]
    # compact separators: no spaces after commas or colons
    assert ", " not in a and ": " not in a


def test_verdict_payload_with_witness():
    t = gr.Term(gr.plus(2), (gr.leaf(gr.var("x")), gr.leaf(gr.var("x"))))
    v = Verdict("Realizable", witness=t, examples=[(1,)], iterations=1)
    assert v.payload()["witness"] == "(+ x x)"


def test_different_seeds_can_pick_different_examples():
    p = _problem("g1.sy")
    rows = {tuple(run_cegis(p, seed=s, sequential=True).examples[0])
            for s in range(4)}
    assert len(rows) > 1
