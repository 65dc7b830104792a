"""Command line front end: ``dcgfsa intersect|parse|pcp|check``.

Exit codes: 0 non-empty or success, 1 empty, 2 unknown, 64 usage errors,
65 malformed input files, 66 unreadable input files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import barhillel
from .errors import CyclicInputError, FormatError, NotContextFreeError
from .forest import ForestGrammar, format_forest, is_empty, iter_trees
from .fsa import Fsa, find_cycle, format_fsa, from_string, read_fsa
from .grammar import (format_grammar, is_context_free, read_grammar,
                      skeleton_cycle, statistics)
from .parser import (CfgExact, DcgAcyclicOnly, Status, Verdict,
                     emptiness_verdict, strategy_from_name)
from .pcp import encode, read_instance, solution_from_tree, solve_bounded
from .terms import format_term

EX_OK, EX_EMPTY, EX_UNKNOWN = 0, 1, 2
EX_USAGE, EX_DATAERR, EX_NOINPUT = 64, 65, 66

EXIT_FOR = {Status.NONEMPTY: EX_OK, Status.EMPTY: EX_EMPTY, Status.UNKNOWN: EX_UNKNOWN}
STRATEGIES = ["cfg", "acyclic", "threshold", "skeleton", "unrestricted"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str, reader):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _InputError(EX_NOINPUT, f"{path}: {exc.strerror}") from None
    try:
        return reader(text)
    except FormatError as exc:
        raise _InputError(EX_DATAERR, f"{path}: {exc}") from None


class _InputError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _default_strategy(g, m: Fsa) -> str:
    if is_context_free(g):
        return "cfg"
    return "acyclic" if find_cycle(m) is None else "skeleton"


def _verdict(g, m: Fsa, args) -> Verdict:
    name = args.strategy or _default_strategy(g, m)
    strat = strategy_from_name(name, tau=args.tau, depth=args.depth)
    if isinstance(strat, CfgExact) and not is_context_free(g):
        raise UsageError("strategy 'cfg' needs a context-free grammar")
    return emptiness_verdict(g, m, strat)


def _naive(g, m: Fsa, do_reduce: bool) -> tuple[ForestGrammar, Verdict]:
    forest = barhillel.intersect_naive(g, m)
    if do_reduce:
        forest = barhillel.reduce(forest)
    if is_empty(forest):
        return forest, Verdict(Status.EMPTY, forest=forest)
    tree = next(iter_trees(forest, validate=False), None)
    return forest, Verdict(Status.NONEMPTY, tree, forest)


def _report(verdict: Verdict, forest: ForestGrammar | None):
    n = None if forest is None else len(forest.rules)
    count = "no forest" if n is None else f"{n} rule{'' if n == 1 else 's'}"
    print(f"{verdict}; {count}", file=sys.stderr)


def cmd_intersect(args) -> int:
    g = _read(args.grammar, read_grammar)
    m = _read(args.fsa, read_fsa)
    if args.method == "naive":
        forest, verdict = _naive(g, m, args.reduce)
    else:
        verdict = _verdict(g, m, args)
        forest = verdict.forest
        if forest is not None and args.reduce:
            forest = barhillel.reduce(forest)
    if forest is not None:
        _write(format_forest(forest), args.output)
    _report(verdict, forest)
    return EXIT_FOR[verdict.status]


def cmd_parse(args) -> int:
    g = _read(args.grammar, read_grammar)
    m = from_string(args.tokens)
    verdict = _verdict(g, m, args)
    if verdict.forest is not None and args.output:
        _write(format_forest(verdict.forest), args.output)
    if verdict.witness is not None:
        print(verdict.witness.pretty())
        print("frontier:", " ".join(verdict.witness.frontier()) or "ε")
        if args.dot:
            Path(args.dot).write_text(verdict.witness.to_dot())
    _report(verdict, verdict.forest)
    return EXIT_FOR[verdict.status]


def cmd_pcp(args) -> int:
    p = _read(args.instance, read_instance)
    if args.encode_only:
        g, m = encode(p, args.loop_weight)
        prefix = args.prefix or str(Path(args.instance).with_suffix(""))
        Path(prefix + ".gr").write_text(format_grammar(g))
        Path(prefix + ".fsa").write_text(format_fsa(m))
        print(f"wrote {prefix}.gr and {prefix}.fsa")
        return EX_OK
    if args.via_intersection:
        return _pcp_via_intersection(p, args)
    sol = solve_bounded(p, args.max)
    if sol is None:
        print(f"no solution up to m={args.max}")
        return EX_EMPTY
    print(f"{' '.join(map(str, sol.indices))} → {sol.witness}")
    return EX_OK


def _pcp_via_intersection(p, args) -> int:
    name = args.strategy or "threshold"
    if name == "acyclic":
        g, _ = encode(p)
        for n in range(1, args.max + 1):
            verdict = emptiness_verdict(g, from_string(["x"] * n), DcgAcyclicOnly())
            if verdict.status is Status.NONEMPTY:
                break
        else:
            print(f"no solution up to m={args.max}")
            return EX_EMPTY
    else:
        g, m = encode(p, args.loop_weight)
        strat = strategy_from_name(name, tau=args.tau, depth=args.depth)
        if isinstance(strat, CfgExact):
            raise UsageError("the PCP encoding is not context-free")
        verdict = emptiness_verdict(g, m, strat)
        if verdict.status is not Status.NONEMPTY:
            print(verdict)
            return EXIT_FOR[verdict.status]
    sol = solution_from_tree(p, verdict.witness)
    print(f"{' '.join(map(str, sol.indices))} → {sol.witness}")
    return EX_OK


def cmd_check(args) -> int:
    g = _read(args.grammar, read_grammar)
    cycle = skeleton_cycle(g)
    print(f"context-free: {'yes' if is_context_free(g) else 'no'}")
    if cycle is None:
        print("off-line parsable: yes")
    else:
        print(f"off-line parsable: no (cycle {' -> '.join(map(format_term, cycle + cycle[:1]))})")
    for key, value in statistics(g).items():
        if isinstance(value, list):
            value = " ".join(value) or "-"
        print(f"{key}: {value}")
    return EX_OK


def _strategy_flags(p):
    p.add_argument("--strategy", choices=STRATEGIES,
                   help="default: cfg for CFGs, acyclic on word graphs, else skeleton")
    p.add_argument("--tau", type=float, default=0.05, help="threshold strategy cut-off")
    p.add_argument("--depth", type=int, default=10, help="unrestricted strategy depth bound")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dcgfsa", description="Intersect grammars with finite automata.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("intersect", help="intersect a grammar file with an automaton file")
    p.add_argument("grammar")
    p.add_argument("fsa")
    p.add_argument("--method", choices=["naive", "parser"], default="parser")
    _strategy_flags(p)
    p.add_argument("--reduce", action="store_true", help="drop useless forest rules")
    p.add_argument("-o", "--output", help="forest file (default: stdout)")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("parse", help="parse a token sequence")
    p.add_argument("grammar")
    p.add_argument("tokens", nargs="*")
    _strategy_flags(p)
    p.add_argument("-o", "--output", help="write the forest here")
    p.add_argument("--dot", help="write the first tree as DOT here")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("pcp", help="solve or encode a PCP instance")
    p.add_argument("instance")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--solve", action="store_true", help="bounded search (default)")
    mode.add_argument("--encode-only", action="store_true",
                      help="write PREFIX.gr and PREFIX.fsa")
    mode.add_argument("--via-intersection", action="store_true",
                      help="search through the grammar encoding")
    p.add_argument("--max", type=int, default=4, help="longest index sequence tried")
    p.add_argument("--prefix", help="output prefix for --encode-only")
    p.add_argument("--loop-weight", type=float, default=0.5)
    _strategy_flags(p)
    p.set_defaults(func=cmd_pcp)

    p = sub.add_parser("check", help="report grammar properties")
    p.add_argument("grammar")
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"dcgfsa: {exc}", file=sys.stderr)
        return exc.code
    except (UsageError, CyclicInputError, NotContextFreeError, ValueError) as exc:
        print(f"dcgfsa: {exc}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
