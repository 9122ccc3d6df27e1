"""Command line entry point.

Exit codes: 0 when every check passed, 1 when a check failed, 2 on usage
or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from . import io as wio
from .automata import AlphabetError, Automaton, StateCapExceeded, summary
from .laws import TermGenerator, default_alphabet, law_ids, run_suite
from .observation import may_witness, trace_language, trace_witness
from .probability import PAutomatonError, ProbAutomaton, epsilon, p_leq, prob_leq
from .rabin import RabinConfig, build_system, build_tourist, check_all
from .simulation import greatest_simulation, leq
from .terms import TermError, compile, load_alphabet, load_term_file, parse, to_text

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _automaton(path: str, alphabet: str | None = None, cap: int | None = None) -> Automaton:
    """Load a JSON automaton, a ``.wcka`` term file, or a term with ``--alphabet``."""
    p = Path(path)
    if p.suffix == ".json":
        obj = wio.load(p)
        if not isinstance(obj, Automaton):
            raise UsageError(f"{path} holds a probabilistic automaton")
        return obj
    if alphabet is not None:
        A = load_alphabet(Path(alphabet).read_text())
        return compile(parse(p.read_text(), A), A, cap=cap)
    t, A = load_term_file(p)
    return compile(t, A, cap=cap)


def _prob(path: str) -> ProbAutomaton:
    obj = wio.load(path)
    if isinstance(obj, ProbAutomaton):
        return obj
    return epsilon(obj)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_compile(args: argparse.Namespace) -> int:
    P = _automaton(args.input, args.alphabet, args.cap)
    _emit(wio.dumps(P), args.output)
    if args.dot:
        Path(args.dot).write_text(wio.to_dot(P, Path(args.input).stem))
    if args.output not in (None, "-"):
        print(" ".join(f"{k}={v}" for k, v in summary(P).items()))
    return OK


def cmd_check(args: argparse.Namespace) -> int:
    P = _automaton(args.left, args.alphabet)
    Q = _automaton(args.right, args.alphabet)
    if args.equiv:
        forward, backward = leq(P, Q), leq(Q, P)
        ok = forward and backward
        print("equivalent" if ok else f"not equivalent ({'left' if not forward else 'right'} is not simulated)")
    else:
        ok = leq(P, Q)
        print("left <= right" if ok else "left is not simulated by right")
    if args.witness and ok:
        rel = greatest_simulation(P, Q)
        assert rel is not None
        _emit(json.dumps(rel.to_json()) + "\n", args.witness)
    return OK if ok else FAILED


def cmd_may(args: argparse.Namespace) -> int:
    P = _automaton(args.left, args.alphabet)
    Q = _automaton(args.right, args.alphabet)
    pairs = [(P, Q, "left", "right")] + ([(Q, P, "right", "left")] if args.equiv else [])
    ok = True
    for X, Y, xn, yn in pairs:
        t = may_witness(X, Y, args.depth)
        if t is None:
            print(f"{xn} may-below {yn} for tests of depth <= {args.depth}")
        else:
            ok = False
            print(f"test {to_text(t)} succeeds with {xn} but not with {yn}")
    return OK if ok else FAILED


def cmd_traces(args: argparse.Namespace) -> int:
    P = _automaton(args.input, args.alphabet)
    L = trace_language(P)
    if args.dump:
        print(L.describe())
        if P.is_acyclic():
            for w in L.words(len(P.states)):
                print(" ".join(w) if w else "(empty word)")
    if args.leq:
        Q = _automaton(args.leq, args.alphabet)
        w = trace_witness(P, Q)
        if w is not None:
            print(f"trace {' '.join(w) if w else '(empty word)'} is missing on the right")
            return FAILED
        print("trace inclusion holds")
    return OK


def cmd_laws(args: argparse.Namespace) -> int:
    A = load_alphabet(Path(args.alphabet).read_text()) if args.alphabet else default_alphabet()
    if args.list:
        print("\n".join(law_ids()))
        return OK
    gen = TermGenerator(seed=args.seed, max_depth=args.depth, alphabet=A)
    report = run_suite(gen, args.trials, args.law or None)
    print(report.summary())
    if args.json:
        _emit(report.dumps() + "\n", args.json)
    return OK if report.ok else FAILED


def cmd_prob(args: argparse.Namespace) -> int:
    if args.epsilon:
        P = _automaton(args.epsilon, args.alphabet)
        _emit(wio.dumps(epsilon(P)), args.output)
        return OK
    if args.p_leq:
        P, Q = (_automaton(x, args.alphabet) for x in args.p_leq)
        ok = p_leq(P, Q)
        print("p-simulation holds" if ok else "no p-simulation")
        return OK if ok else FAILED
    if args.leq:
        P, Q = (_prob(x) for x in args.leq)
        ok = prob_leq(P, Q, args.weak_bound)
        print("probabilistic simulation holds" if ok else "no probabilistic simulation")
        return OK if ok else FAILED
    raise UsageError("prob needs --epsilon, --p-leq or --leq")


def cmd_rabin(args: argparse.Namespace) -> int:
    cfg = RabinConfig(value_bound=args.bound, cap=args.cap)
    if args.dot:
        Path(args.dot).write_text(wio.to_dot(build_tourist(cfg, 0), "P"))
    if args.check == "none":
        system = build_system(cfg)
        print(" ".join(f"{k}={v}" for k, v in sorted(system.sizes().items())))
        return OK
    report = check_all(cfg, args.m, args.n)
    if args.check != "all":
        report.checks = [c for c in report.checks if c.group == args.check]
    print(report.summary())
    if args.json:
        _emit(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n", args.json)
    return OK if report.ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wcka", description="Automata model of weak concurrent Kleene algebra.")
    ap.add_argument("--version", action="version", version=f"wcka {__version__} (format {wio.FORMAT_VERSION})")
    sub = ap.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("compile", help="compile a term file to JSON")
    c.add_argument("input")
    c.add_argument("-o", "--output")
    c.add_argument("--dot")
    c.add_argument("--alphabet")
    c.add_argument("--cap", type=int)
    c.set_defaults(func=cmd_compile)

    k = sub.add_parser("check", help="rooted eta-simulation between two automata")
    mode = k.add_mutually_exclusive_group(required=True)
    mode.add_argument("--leq", action="store_true")
    mode.add_argument("--equiv", action="store_true")
    k.add_argument("left")
    k.add_argument("right")
    k.add_argument("--witness", help="write the greatest simulation as JSON pairs")
    k.add_argument("--alphabet")
    k.set_defaults(func=cmd_check)

    m = sub.add_parser("may", help="brute-force may testing")
    mode = m.add_mutually_exclusive_group(required=True)
    mode.add_argument("--leq", action="store_true")
    mode.add_argument("--equiv", action="store_true")
    m.add_argument("left")
    m.add_argument("right")
    m.add_argument("--depth", type=int, default=3)
    m.add_argument("--alphabet")
    m.set_defaults(func=cmd_may)

    t = sub.add_parser("traces", help="erased trace language")
    t.add_argument("input")
    t.add_argument("--dump", action="store_true")
    t.add_argument("--leq", metavar="OTHER")
    t.add_argument("--alphabet")
    t.set_defaults(func=cmd_traces)

    law = sub.add_parser("laws", help="run the law suite")
    law.add_argument("--seed", type=int, default=0)
    law.add_argument("--trials", type=int, default=200)
    law.add_argument("--depth", type=int, default=3)
    law.add_argument("--alphabet")
    law.add_argument("--law", action="append", choices=law_ids())
    law.add_argument("--json", help="write the JSON report here ('-' for stdout)")
    law.add_argument("--list", action="store_true")
    law.set_defaults(func=cmd_laws)

    p = sub.add_parser("prob", help="the probabilistic bridge")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--epsilon", metavar="A")
    mode.add_argument("--p-leq", nargs=2, metavar=("A", "B"))
    mode.add_argument("--leq", nargs=2, metavar=("A", "B"))
    p.add_argument("-o", "--output")
    p.add_argument("--weak-bound", type=int, default=2)
    p.add_argument("--alphabet")
    p.set_defaults(func=cmd_prob)

    r = sub.add_parser("rabin", help="Rabin's choice coordination case study")
    r.add_argument("--bound", type=int, default=1)
    r.add_argument("--check", choices=["all", "theorems", "appendix", "structure", "none"], default="all")
    r.add_argument("--cap", type=int, default=200_000)
    r.add_argument("-m", type=int, default=2)
    r.add_argument("-n", type=int, default=2)
    r.add_argument("--dot", help="write the tourist automaton as DOT")
    r.add_argument("--json")
    r.set_defaults(func=cmd_rabin)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except StateCapExceeded as e:
        print(f"wcka: {e}", file=sys.stderr)
        return USAGE
    except (UsageError, wio.FormatError, TermError, AlphabetError, PAutomatonError, OSError, ValueError) as e:
        print(f"wcka: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
