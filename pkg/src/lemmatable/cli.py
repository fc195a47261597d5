"""Command-line front end.

    lemmatable prove PROGRAM QUERY [--trace] [--derivations] [--json] ...
    lemmatable compare PROGRAM QUERY --oracle sld|fixpoint [--depth N] ...
    lemmatable programs

PROGRAM is a file path or the name of a bundled program.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import grammars
from .engine import EngineConfig, derivation_trees, run
from .oracles import NotDatalog, datalog_fixpoint, query_answers, sld_solve
from .report import answer_key, format_answer, to_json, trace_lines
from .syntax import Policy, SyntaxErr, format_term, parse_goal, parse_program
from .terms import is_ground

EXIT_SOLVED, EXIT_NONE, EXIT_STEP_LIMIT, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_program(spec: str):
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as f:
            return parse_program(f.read())
    if spec in grammars.DESCRIPTIONS:
        return grammars.load_bundled(spec)
    raise UsageError(f"no such program file or bundled program: {spec}")


def _engine_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("program", help="program file or bundled program name")
    p.add_argument("query", help="goal: a literal or a list of literals")
    p.add_argument("--agenda", choices=["fifo", "lifo"], default="fifo",
                   help="order in which agenda items are processed (default fifo)")
    p.add_argument("--max-steps", type=int, default=100_000,
                   help="stop after this many processed items (default 100000)")
    p.add_argument("--occurs-check", choices=["on", "off"], default="on",
                   help="occurs check in unification (default on)")
    p.add_argument("--no-dedup", action="store_true", help="re-propagate variant solutions")
    p.add_argument("--abbrev", action="store_true", help="abbreviate add_adjuncts, division, lijkt_te, ontwijken")
    p.add_argument("--no-memo", action="store_true", help="drop memo directives (plain resolution)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lemmatable", description="Tabled resolution with coroutined constraints.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    prove = sub.add_parser("prove", help="run a query and print its answers")
    _engine_args(prove)
    prove.add_argument("--trace", action="store_true", help="print one line per processed item")
    prove.add_argument("--derivations", action="store_true", help="count and print derivation trees")
    prove.add_argument("--json", action="store_true", help="dump the full result as JSON")

    compare = sub.add_parser("compare", help="compare engine answers with a reference evaluator")
    _engine_args(compare)
    compare.add_argument("--oracle", choices=["sld", "fixpoint"], required=True,
                         help="depth-bounded SLD resolution or the Datalog least model")
    compare.add_argument("--depth", type=int, default=50,
                         help="SLD resolution-step bound per branch (default 50)")
    compare.add_argument("--max-nodes", type=int, default=20_000,
                         help="SLD total resolution-step budget (default 20000)")

    sub.add_parser("programs", help="list bundled programs")
    return parser


def _config(args) -> EngineConfig:
    if args.max_steps <= 0:
        raise UsageError("--max-steps must be positive")
    return EngineConfig(
        agenda=args.agenda,
        max_items=args.max_steps,
        occurs_check=args.occurs_check == "on",
        dedup_solutions=not args.no_dedup,
    )


def _setup(args):
    program, policy = load_program(args.program)
    if args.no_memo:
        policy = Policy((), policy.delay_guards, policy.abstraction_templates)
    query = parse_goal(args.query)
    return program, policy, query


def cmd_prove(args, out) -> int:
    program, policy, query = _setup(args)
    start = time.perf_counter()
    result = run(program, policy, query, _config(args))
    elapsed = time.perf_counter() - start
    trees = derivation_trees(result) if args.derivations else None

    if args.json:
        json.dump(to_json(result, len(trees) if trees is not None else None), out, indent=2)
        out.write("\n")
    else:
        if args.trace:
            for line in trace_lines(result, args.abbrev):
                print(line, file=out)
            print(file=out)
        for answer in result.answers:
            print(format_answer(answer, args.abbrev), file=out)
        if trees is not None:
            print(f"{len(trees)} derivation{'s' if len(trees) != 1 else ''}", file=out)
            for i, t in enumerate(trees, 1):
                print(f"-- derivation {i}", file=out)
                print(t.render(), file=out)
        print(f"% {len(result.answers)} answers, {result.steps} items, {len(result.tables)} tables, "
              f"{result.status}, {elapsed:.3f}s", file=out)

    if result.status != "completed":
        return EXIT_STEP_LIMIT
    return EXIT_SOLVED if result.answers else EXIT_NONE


def cmd_compare(args, out) -> int:
    program, policy, query = _setup(args)
    result = run(program, policy, query, _config(args))
    engine_keys = {answer_key(c) for c in result.answers}
    print(f"engine: {len(engine_keys)} answers ({result.status}, {result.steps} items)", file=out)
    for c in result.answers:
        print(f"  {format_answer(c, args.abbrev)}", file=out)

    if args.oracle == "fixpoint":
        if len(query) != 1:
            raise UsageError("the fixpoint oracle takes a single-literal query")
        try:
            facts = datalog_fixpoint(program)
        except NotDatalog as e:
            raise UsageError(f"fixpoint oracle: {e}") from None
        expected = query_answers(facts, query[0])
        print(f"oracle (fixpoint): {len(expected)} answers", file=out)
        for f in sorted(expected, key=format_term):
            print(f"  {format_term(f)}", file=out)
        got = set()
        ok = result.completed
        for c in result.answers:
            if c.body or len(c.head) != 1 or not is_ground(c.head[0]):
                ok = False
            else:
                got.add(c.head[0])
        verdict = "EQUAL" if ok and got == expected else "MISMATCH"
    else:
        oracle = sld_solve(program, policy, query, args.depth, max_nodes=args.max_nodes,
                           occurs_check=args.occurs_check == "on")
        oracle_keys = {answer_key(c) for c in oracle.clauses(query)}
        note = "exhausted" if oracle.exhausted else (
            "depth bound hit" if oracle.depth_hit else "node budget hit")
        print(f"oracle (sld, depth {args.depth}): {len(oracle_keys)} answers ({note}, {oracle.nodes} steps)",
              file=out)
        for c in oracle.clauses(query):
            print(f"  {format_answer(c, args.abbrev)}", file=out)
        if result.completed and engine_keys == oracle_keys:
            verdict = "EQUAL"
        elif result.completed and not oracle.exhausted:
            verdict = "ENGINE-TERMINATES-ORACLE-BOUNDED"
        else:
            verdict = "MISMATCH"
    print(f"verdict: {verdict}", file=out)
    return EXIT_MISMATCH if verdict == "MISMATCH" else EXIT_SOLVED


def cmd_programs(args, out) -> int:
    for name in grammars.names():
        print(f"{name:22} {grammars.DESCRIPTIONS[name]}  ({grammars.path(name)})", file=out)
    return EXIT_SOLVED


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    handler = {"prove": cmd_prove, "compare": cmd_compare, "programs": cmd_programs}[args.command]
    try:
        return handler(args, out)
    except (SyntaxErr, UsageError, ValueError) as e:
        print(f"lemmatable: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RecursionError:
        # runaway programs can build terms nested deeper than the interpreter stack
        print("lemmatable: error: term nesting too deep; lower --max-steps", file=sys.stderr)
        return EXIT_STEP_LIMIT


if __name__ == "__main__":
    sys.exit(main())
