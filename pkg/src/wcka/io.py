"""JSON interchange for automata and probabilistic automata, and DOT export.

JSON is the only persisted form; DOT is write-only and meant for humans.
Rationals are written as ``"num/den"`` strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .automata import Alphabet, Automaton, ProbSpec
from .probability import Distribution, ProbAutomaton

FORMAT_VERSION = 1


class FormatError(ValueError):
    pass


def _q(p: Fraction) -> str:
    p = Fraction(p)
    return f"{p.numerator}/{p.denominator}"


def _unq(text: Any) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as e:
        raise FormatError(f"bad rational {text!r}") from e


def alphabet_to_json(A: Alphabet) -> dict:
    guards = set(A.guard_owner)
    return {
        "internal": sorted(A.internal - guards),
        "external": sorted(A.external - A.flips),
        "prob": [
            {"flip": s.flip, "branches": [{"p": _q(p), "guard": g} for p, g in s.branches]} for s in A.prob
        ],
        "frame": sorted(A.frame),
    }


def alphabet_from_json(d: dict) -> Alphabet:
    try:
        prob = tuple(
            ProbSpec(s["flip"], tuple((_unq(b["p"]), b["guard"]) for b in s["branches"])) for s in d.get("prob", [])
        )
        return Alphabet(
            frozenset(d.get("internal", [])), frozenset(d.get("external", [])), prob, frozenset(d.get("frame", []))
        )
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed alphabet: {e}") from e


def automaton_to_json(P: Automaton) -> dict:
    return {
        "version": FORMAT_VERSION,
        "kind": "automaton",
        "states": sorted(P.states),
        "initial": P.initial,
        "finals": sorted(P.finals),
        "transitions": [{"src": s, "action": a, "dst": t} for s, a, t in sorted(P.transitions)],
        "alphabet": alphabet_to_json(P.alphabet),
    }


def _check_version(d: dict, kind: str) -> None:
    if not isinstance(d, dict):
        raise FormatError("expected a JSON object")
    if d.get("version", FORMAT_VERSION) != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {d.get('version')!r}")
    if d.get("kind", kind) != kind:
        raise FormatError(f"expected a {kind}, found a {d.get('kind')}")


def automaton_from_json(d: dict) -> Automaton:
    _check_version(d, "automaton")
    try:
        trans = frozenset((int(t["src"]), str(t["action"]), int(t["dst"])) for t in d["transitions"])
        return Automaton(
            frozenset(int(s) for s in d["states"]),
            trans,
            int(d["initial"]),
            frozenset(int(s) for s in d["finals"]),
            alphabet_from_json(d.get("alphabet", {})),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"malformed automaton: {e}") from e


def _dist_to_json(D: Distribution) -> list[dict]:
    return [{"state": s, "p": _q(p)} for s, p in D.weights]


def _dist_from_json(items: list) -> Distribution:
    return Distribution(tuple((int(i["state"]), _unq(i["p"])) for i in items))


def prob_to_json(P: ProbAutomaton) -> dict:
    return {
        "version": FORMAT_VERSION,
        "kind": "prob_automaton",
        "states": sorted(P.states),
        "initial_dist": _dist_to_json(P.initial),
        "finals": sorted(P.finals),
        "transitions": [
            {"src": s, "action": a, "dist": _dist_to_json(D)}
            for s, a, D in sorted(P.transitions, key=lambda t: (t[0], t[1], t[2].weights))
        ],
        "internal": sorted(P.internal),
    }


def prob_from_json(d: dict) -> ProbAutomaton:
    _check_version(d, "prob_automaton")
    try:
        return ProbAutomaton(
            frozenset(int(s) for s in d["states"]),
            frozenset((int(t["src"]), str(t["action"]), _dist_from_json(t["dist"])) for t in d["transitions"]),
            _dist_from_json(d["initial_dist"]),
            frozenset(int(s) for s in d["finals"]),
            frozenset(d.get("internal", ["tau"])),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"malformed probabilistic automaton: {e}") from e


def dumps(obj: Automaton | ProbAutomaton) -> str:
    d = prob_to_json(obj) if isinstance(obj, ProbAutomaton) else automaton_to_json(obj)
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


def loads(text: str) -> Automaton | ProbAutomaton:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e}") from e
    if isinstance(d, dict) and d.get("kind") == "prob_automaton":
        return prob_from_json(d)
    return automaton_from_json(d)


def save(obj: Automaton | ProbAutomaton, path: str | Path) -> None:
    Path(path).write_text(dumps(obj))


def load(path: str | Path) -> Automaton | ProbAutomaton:
    return loads(Path(path).read_text())


# -- DOT --------------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(P: Automaton | ProbAutomaton, name: str = "P") -> str:
    """Graphviz source: finals double-circled, internal actions dashed."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=TB;", '  __start [shape=point, label=""];']
    for s in sorted(P.states):
        shape = "doublecircle" if s in P.finals else "circle"
        lines.append(f"  {s} [shape={shape}];")
    if isinstance(P, ProbAutomaton):
        internal = P.internal
        lines.extend(_dist_edges("__start", "", P.initial, False))
        for s, a, D in sorted(P.transitions, key=lambda t: (t[0], t[1], t[2].weights)):
            lines.extend(_dist_edges(str(s), a, D, a in internal))
    else:
        internal = P.alphabet.internal
        lines.append(f"  __start -> {P.initial};")
        for s, a, t in sorted(P.transitions):
            style = ", style=dashed" if a in internal else ""
            lines.append(f"  {s} -> {t} [label={_quote(a)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dist_edges(src: str, label: str, D: Distribution, dashed: bool) -> list[str]:
    style = ", style=dashed" if dashed else ""
    if D.is_point():
        (t,) = D.support
        lab = f" [label={_quote(label)}{style}]" if label else ""
        return [f"  {src} -> {t}{lab};"]
    # a small diamond node stands for the distribution
    mid = _quote(f"d_{src}_{label}_{'_'.join(str(s) for s in sorted(D.support))}")
    out = [f"  {mid} [shape=diamond, label=\"\", width=0.15, height=0.15];"]
    lab = f" [label={_quote(label)}{style}]" if label else ""
    out.append(f"  {src} -> {mid}{lab};")
    for t, p in D.weights:
        out.append(f"  {mid} -> {t} [label={_quote(_q(p))}, style=dotted];")
    return out
