"""The ``lmv`` command line.

Exit codes: 0 success, 1 property or type failure, 2 parse or flag error,
3 fuel or budget exhausted.
"""

from __future__ import annotations

import argparse
import random
import sys

from .gen import GenConfig
from .harness import SUITES, run_suite
from .parallel import ReductBudget, complete_development, parallel_reducts
from .reduction import (
    MODES,
    RedexSite,
    ReductionError,
    contract,
    format_path,
    normalize,
    parse_path,
    rules_at,
    step,
)
from .segments import (
    SegmentCapExceeded,
    enumerate_segment_trees,
    maximal_segment_tree,
    segment_roots,
    tree_acceptors,
)
from .syntax import ParseError, parse_term, print_term
from .terms import OccurrenceError, subterm_at
from .typecheck import TypeCheckError, format_judgment, infer, parse_context

OK, FAILED, USAGE, EXHAUSTED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so dispatch owns the exit code."""

    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return n


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lmv", description="Call-by-value lambda-mu calculus with conjunction and disjunction.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def cmd(name, help_text, takes_input=True):
        c = sub.add_parser(name, help=help_text)
        if takes_input:
            c.add_argument("file", nargs="?", default="-", help="input file, or - for standard input")
        return c

    c = cmd("parse", "parse a term and print it in canonical form")
    c.add_argument("--annot", action="store_true", help="keep type annotations")

    c = cmd("check", "infer the formula of an annotated term")
    c.add_argument("--ctx", default="", help="context, e.g. 'x:A, y:B ; @a:C'")

    c = cmd("step", "contract one redex")
    c.add_argument("--mode", choices=sorted(MODES), default="cbv")
    c.add_argument("--at", metavar="PATH", help="dot-separated occurrence of the redex")
    c.add_argument("--strategy", choices=("lo", "random"), default="lo")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--annot", action="store_true", help="print type annotations")

    c = cmd("normalize", "reduce until no redex is left or fuel runs out")
    c.add_argument("--mode", choices=sorted(MODES), default="cbv")
    c.add_argument("--strategy", choices=("lo", "random"), default="lo")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--fuel", type=_nonneg, default=1000)
    c.add_argument("--annot", action="store_true", help="print type annotations")

    cmd("develop", "print the complete development")

    c = cmd("reducts", "list all parallel reducts")
    c.add_argument("--max", type=_positive, default=200, help="reduct budget")
    c.add_argument("--trees", type=_positive, default=16, help="segment-tree budget per node")

    c = cmd("segtrees", "list the segment-trees of every segment root")
    c.add_argument("--cap", type=_positive, default=64, help="most trees listed per root")

    c = cmd("fuzz", "run a property suite on a generated corpus", takes_input=False)
    c.add_argument("--suite", choices=sorted(SUITES), required=True)
    c.add_argument("--count", type=_nonneg, default=100)
    c.add_argument("--size", type=_positive, default=10)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--jobs", type=_positive, default=1)
    c.add_argument("--max", type=_positive, default=200, help="reduct budget")
    c.add_argument("--trees", type=_positive, default=16, help="segment-tree budget per node")
    c.add_argument("--verbose", action="store_true", help="also list inconclusive witnesses")
    return p


def _read(path: str, stdin) -> str:
    if path == "-":
        return stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _trace_line(site: RedexSite, t, annot: bool) -> str:
    return f"{format_path(site.occurrence)}  {site.rule}  {print_term(t, annot)}"


def _cmd_parse(args, t, out):
    print(print_term(t, args.annot), file=out)
    return OK


def _cmd_check(args, t, out):
    ctx = parse_context(args.ctx)
    f, _ = infer(ctx, t)
    print(format_judgment(ctx, t, f), file=out)
    return OK


def _cmd_step(args, t, out):
    if args.at is not None:
        path = parse_path(args.at)
        node = subterm_at(t, path)
        rules = rules_at(node, args.mode)
        if not rules:
            raise ReductionError(f"no {args.mode} redex at {format_path(path)}")
        site = RedexSite(path, rules[0])
        t2 = contract(t, site)
    else:
        res = step(t, args.mode, args.strategy, random.Random(args.seed))
        if res is None:
            print(print_term(t, args.annot), file=out)
            return OK
        site, t2 = res
    print(_trace_line(site, t2, args.annot), file=out)
    return OK


def _cmd_normalize(args, t, out, err):
    trace = normalize(t, args.mode, args.strategy, args.seed, args.fuel)
    for site, u in trace.steps:
        print(_trace_line(site, u, args.annot), file=out)
    print(print_term(trace.final, args.annot), file=out)
    if trace.exhausted:
        print(f"fuel exhausted after {len(trace.steps)} steps", file=err)
        return EXHAUSTED
    return OK


def _cmd_develop(args, t, out):
    print(print_term(complete_development(t)), file=out)
    return OK


def _cmd_reducts(args, t, out, err):
    rs, over = parallel_reducts(t, ReductBudget(args.max, args.trees))
    if over:
        print(f"more than {args.max} reducts (or more than {args.trees} segment-trees at a node)", file=err)
        return EXHAUSTED
    for line in sorted(print_term(r) for r in rs):
        print(line, file=out)
    return OK


def _paths(ps) -> str:
    return "[" + ", ".join(format_path(p) for p in sorted(ps)) + "]"


def _cmd_segtrees(args, t, out, err):
    code = OK
    for root in segment_roots(t):
        try:
            trees = enumerate_segment_trees(t, root, args.cap)
        except SegmentCapExceeded as exc:
            print(f"root {format_path(root)}: {exc}", file=err)
            code = EXHAUSTED
            continue
        top = maximal_segment_tree(t, root)
        print(f"root {format_path(root)}  {len(trees)} tree(s)", file=out)
        for i, tree in enumerate(trees, 1):
            tag = "  maximal" if tree == top else ""
            print(
                f"  {i}. members {_paths(tree.members)}  acceptors {_paths(tree_acceptors(t, tree))}{tag}",
                file=out,
            )
    return code


def _cmd_fuzz(args, out):
    cfg = GenConfig(seed=args.seed, max_size=args.size)
    report = run_suite(args.suite, cfg, args.count, ReductBudget(args.max, args.trees), args.jobs)
    print(report.render(args.verbose), file=out)
    return OK if report.ok else FAILED


def dispatch(argv, stdin=None, out=None, err=None) -> int:
    stdin = stdin or sys.stdin
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"lmv: {exc}", file=err)
        return USAGE
    except SystemExit as exc:  # --help
        return OK if exc.code in (0, None) else USAGE
    if args.command == "fuzz":
        return _cmd_fuzz(args, out)
    try:
        t = parse_term(_read(args.file, stdin))
    except OSError as exc:
        print(f"lmv: {exc}", file=err)
        return USAGE
    except ParseError as exc:
        print(exc.format(), file=err)
        return USAGE
    except RecursionError:
        print("lmv: input nested too deeply", file=err)
        return USAGE
    try:
        if args.command == "parse":
            return _cmd_parse(args, t, out)
        if args.command == "check":
            return _cmd_check(args, t, out)
        if args.command == "step":
            return _cmd_step(args, t, out)
        if args.command == "normalize":
            return _cmd_normalize(args, t, out, err)
        if args.command == "develop":
            return _cmd_develop(args, t, out)
        if args.command == "reducts":
            return _cmd_reducts(args, t, out, err)
        return _cmd_segtrees(args, t, out, err)
    except TypeCheckError as exc:
        print(f"type error: {exc}", file=err)
        return FAILED
    except ParseError as exc:  # a formula inside --ctx
        print(f"--ctx: {exc.format()}", file=err)
        return USAGE
    except (ReductionError, OccurrenceError, ValueError) as exc:
        print(f"lmv: {exc}", file=err)
        return USAGE
    except RecursionError:
        print("lmv: term nested too deeply", file=err)
        return USAGE


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)
