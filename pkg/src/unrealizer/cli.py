"""Command-line interface.

Verdict payloads go to stdout (human-readable by default, JSON with
--json); progress traces go to stderr.  Exit codes: 0 unrealizable,
10 realizable, 20 unknown, 2 input error.
"""

import argparse
import json
import os
import sys

from . import approx, cegis, gfa
from .frontend import ParseError, parse_problem, specialize
from .grammar import ExampleSet, GrammarError, expand_nary
from .ilp import Solver
from .rewrite import to_plus_form

EXIT = {"Unrealizable": 0, "Realizable": 10, "Unknown": 20}


def _parser():
    top = argparse.ArgumentParser(
        prog="unrealizer",
        description="Prove (un)realizability of SyGuS problems over "
                    "linear integer arithmetic restricted to examples.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, examples_required=False):
        p.add_argument("file", help="SyGuS problem file")
        p.add_argument("--mode", choices=["sl", "predabs"], default="sl",
                       help="abstract domain (default: exact semi-linear)")
        p.add_argument("--export-smt", metavar="DIR",
                       help="dump every feasibility query as SMT-LIB")
        p.add_argument("--json", action="store_true",
                       help="machine-readable verdict on stdout")
        p.add_argument("-v", "--verbose", action="count", default=0,
                       help="trace to stderr; repeat for full records")
        if examples_required:
            p.add_argument("--examples", required=True,
                           help='example inputs, e.g. "x=1;x=2"')

    p = sub.add_parser("check", help="full counterexample-guided loop")
    common(p)
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: $UNREAL_SEED or 0)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--sequential", action="store_true", default=True,
                       help="deterministic round-robin (default)")
    group.add_argument("--parallel", dest="sequential", action="store_false",
                       help="race synthesis against checking")
    p.add_argument("--budget-seconds", type=float, default=60.0)
    p.add_argument("--max-term-size", type=int, default=20)
    p.add_argument("--max-rounds", type=int, default=20)

    p = sub.add_parser("check-examples",
                       help="single exact check on given examples")
    common(p, examples_required=True)

    p = sub.add_parser("export-horn",
                       help="emit the example-restricted problem as "
                            "constrained Horn clauses")
    common(p, examples_required=True)
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("dump-equations",
                       help="print the equation system for the examples")
    common(p, examples_required=True)
    return top


def _load(path):
    try:
        with open(path, "rb") as fh:
            return parse_problem(fh.read().decode())
    except OSError as e:
        raise SystemExit(_usage_error(str(e)))
    except (ParseError, GrammarError) as e:
        raise SystemExit(_usage_error(str(e)))


def _usage_error(message):
    print(f"error: {message}", file=sys.stderr)
    return 2


def _parse_examples(text, variables):
    if not variables:
        return ExampleSet((), ((),))
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        env = {}
        for part in chunk.split(","):
            name, sep, value = part.partition("=")
            name = name.strip()
            if not sep or name not in variables:
                raise ValueError(f"bad assignment {part.strip()!r}")
            try:
                env[name] = int(value)
            except ValueError:
                raise ValueError(f"bad assignment {part.strip()!r}") from None
        missing = [v for v in variables if v not in env]
        if missing:
            raise ValueError(f"missing value for {missing[0]!r}")
        rows.append(tuple(env[v] for v in variables))
    if not rows:
        raise ValueError("no examples given")
    return ExampleSet(tuple(variables), tuple(rows))


def _emit(verdict, args):
    if args.json:
        print(verdict.to_json())
    else:
        print(f"verdict: {verdict.verdict}")
        if verdict.witness is not None:
            print(f"witness: {verdict.witness.to_sexpr()}")
        if verdict.reason:
            print(f"reason: {verdict.reason}")
    if args.verbose:
        for rec in verdict.trace:
            if args.verbose > 1:
                print(json.dumps(rec, sort_keys=True), file=sys.stderr)
            else:
                print(f"round {rec.get('round')}: check={rec.get('check')} "
                      f"synth={rec.get('synth')} cex={rec.get('cex')}",
                      file=sys.stderr)
    return EXIT[verdict.verdict]


def _solver(args):
    return Solver(export_dir=args.export_smt)


def _cmd_check(args):
    problem = _load(args.file)
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("UNREAL_SEED", "0"))
    budgets = cegis.Budgets(seconds=args.budget_seconds,
                            max_size=args.max_term_size,
                            max_rounds=args.max_rounds)
    try:
        verdict = cegis.run_cegis(problem, seed=seed,
                                  sequential=args.sequential,
                                  budgets=budgets, mode=args.mode,
                                  solver=_solver(args))
    except KeyboardInterrupt:
        verdict = cegis.Verdict("Unknown", reason="interrupted")
    return _emit(verdict, args)


def _examples_or_exit(args, problem):
    try:
        return _parse_examples(args.examples, problem.variables)
    except ValueError as e:
        raise SystemExit(_usage_error(str(e)))


def _cmd_check_examples(args):
    problem = _load(args.file)
    e = _examples_or_exit(args, problem)
    try:
        result = cegis.check_unrealizable(problem.grammar, problem.spec, e,
                                          _solver(args), mode=args.mode)
    except KeyboardInterrupt:
        result = cegis.CheckResult("Unknown", reason="interrupted")
    trace = [{"examples": [list(r) for r in e.rows],
              "check": result.verdict, "query": result.query,
              "values": {nt: cegis._value_str(v)
                         for nt, v in sorted((result.values or {}).items())},
              "stats": result.stats}]
    verdict = cegis.Verdict(result.verdict, reason=result.reason,
                            examples=list(e.rows), iterations=1, trace=trace)
    return _emit(verdict, args)


def _cmd_export_horn(args):
    problem = _load(args.file)
    e = _examples_or_exit(args, problem)
    ps = specialize(problem.spec, e)
    try:
        data = approx.horn_export(problem.grammar, e, ps)
    except GrammarError as err:
        return _usage_error(str(err))
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())
    return 0


def _cmd_dump_equations(args):
    problem = _load(args.file)
    e = _examples_or_exit(args, problem)
    g = to_plus_form(expand_nary(problem.grammar))
    print(gfa.build_equations(g, e).dump())
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    handler = {"check": _cmd_check,
               "check-examples": _cmd_check_examples,
               "export-horn": _cmd_export_horn,
               "dump-equations": _cmd_dump_equations}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
