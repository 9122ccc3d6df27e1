"""Rabin's choice coordination: two tourists, a church and a museum.

The algebra carries no data, so values are expanded CSP style. Reading a
board is a sum over every value the board might show, and each concrete
value is its own frame action. A term fixes the tourist's door and notepad,
so every iteration of ``(P + Q)*`` re-enters the tourist with the same
parameters and every iteration of a place re-offers its initial board
value. Theorems about this system are therefore about the interleaving
shape, not about the values.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable

from .automata import Alphabet, Automaton, ProbSpec, validate
from .probability import is_p_automaton
from .simulation import equiv, leq
from .terms import Act, One, Par, Plus, Seq, Star, Term, Zero, compile, power, seq_of, sum_of

log = logging.getLogger(__name__)

HERE = "here"
PLACES = ("c", "m")


def other(alpha: str) -> str:
    return "m" if alpha == "c" else "c"


def default_bar(v: int) -> int:
    # the overline is left open; by default it moves K+2 to
    # the other parity class
    return v + 1


@dataclass(frozen=True)
class RabinConfig:
    value_bound: int = 1
    tourists: tuple[tuple[str, int], ...] = (("c", 0), ("m", 0))
    boards: tuple[int | str, int | str] = (0, 0)  # (L at the church, R at the museum)
    bar: Callable[[int], int] = default_bar
    cap: int = 200_000

    def __post_init__(self) -> None:
        if self.value_bound < 1:
            raise ValueError("value_bound must be positive")
        for alpha, k in self.tourists:
            if alpha not in PLACES:
                raise ValueError(f"unknown place {alpha!r}")
            self._check_value(k)
        if len(self.boards) != 2:
            raise ValueError("exactly two boards")
        for v in self.boards:
            self._check_value(v)

    def _check_value(self, v: int | str) -> None:
        if v != HERE and not (isinstance(v, int) and 0 <= v <= self.value_bound):
            raise ValueError(f"value {v!r} outside 0..{self.value_bound}")

    @property
    def values(self) -> tuple[int | str, ...]:
        return tuple(range(self.value_bound + 1)) + (HERE,)

    def board(self, alpha: str) -> int | str:
        return self.boards[PLACES.index(alpha)]

    def saturate(self, v: int) -> int:
        if v > self.value_bound:
            log.info("value %d saturated to %d", v, self.value_bound)
            return self.value_bound
        return v


def read(alpha: str, v: int | str) -> str:
    """The tourist reads ``v`` from the board at ``alpha`` (the place's ``alpha!v``)."""
    return f"{alpha}_{v}_r"


def write(alpha: str, v: int | str) -> str:
    """The tourist writes ``v`` on the board at ``alpha`` (the place's ``alpha?v``)."""
    return f"{alpha}_{v}_w"


def tag(i: int, what: str) -> str:
    """Internal action ``what`` of tourist ``i``."""
    return f"p{i}_{what}"


TOURIST_ACTIONS = ("here", "nothere", "gt", "lt", "eq", "set", "move")


def channel_alphabet(cfg: RabinConfig) -> Alphabet:
    frame = {f(a, v) for a in PLACES for v in cfg.values for f in (read, write)}
    internal = {tag(i, w) for i in range(len(cfg.tourists)) for w in TOURIST_ACTIONS}
    internal |= {"init_boards", "init_tourists"}
    return Alphabet(
        internal=frozenset(internal) | frozenset({"th", "tt"}),
        external=frozenset(frame) | frozenset({"flip"}),
        prob=(_coin(),),
        frame=frozenset(frame),
    )


def _coin() -> ProbSpec:
    return ProbSpec("flip", ((Fraction(1, 2), "th"), (Fraction(1, 2), "tt")))


def tourist_term(cfg: RabinConfig, i: int) -> Term:
    """P(alpha, k) expanded over the value read from the board."""
    alpha, k = cfg.tourists[i]
    t = lambda w: Act(tag(i, w))  # noqa: E731
    leave = lambda v: seq_of([Act(write(alpha, v)), t("move")])  # noqa: E731
    arms = []
    for K in cfg.values:
        if K == HERE:
            body: Term = seq_of([t("here"), Act(write(alpha, HERE)), Zero()])
        elif k > K:
            body = seq_of([t("nothere"), t("gt"), Act(write(alpha, HERE)), Zero()])
        elif k < K:
            body = seq_of([t("nothere"), t("lt"), t("set"), leave(K)])
        else:
            heads = seq_of([Act("th"), t("set"), leave(cfg.saturate(K + 2))])
            tails = seq_of([Act("tt"), t("set"), leave(cfg.saturate(cfg.bar(K + 2)))])
            body = seq_of([t("nothere"), t("eq"), Act("flip"), Plus(heads, tails)])
        arms.append(Seq(Act(read(alpha, K)), body))
    return sum_of(arms)


def place_term(cfg: RabinConfig, alpha: str) -> Term:
    """(alpha!L)* . (alpha?L): serve reads of the board, then take one write."""
    L = cfg.board(alpha)
    return Seq(Star(Act(read(alpha, L))), sum_of([Act(write(alpha, v)) for v in cfg.values]))


def build_tourist(cfg: RabinConfig, which: int) -> Automaton:
    return compile(tourist_term(cfg, which), channel_alphabet(cfg))


def build_place(channel: str, cfg: RabinConfig) -> Automaton:
    return compile(place_term(cfg, channel), channel_alphabet(cfg))


@dataclass
class RabinSystem:
    config: RabinConfig
    alphabet: Alphabet
    X: Term  # all tourists
    Y: Term  # both places
    terms: dict[str, Term]
    automata: dict[str, Automaton] = field(default_factory=dict)

    @property
    def S(self) -> Automaton:
        return self.automata["S"]

    @property
    def serialized(self) -> Automaton:
        return self.automata["serialized"]

    @property
    def summed(self) -> Automaton:
        return self.automata["summed"]

    def sizes(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.automata.items()}


def system_terms(cfg: RabinConfig) -> tuple[Term, Term, dict[str, Term]]:
    X = sum_of([tourist_term(cfg, i) for i in range(len(cfg.tourists))])
    M, C = place_term(cfg, "m"), place_term(cfg, "c")
    Y = Plus(M, C)
    terms = {
        "S": Par(Star(X), Star(Y)),
        "serialized": Star(Seq(Star(Par(X, M)), Star(Par(X, C)))),
        "summed": Star(Plus(Par(X, M), Par(X, C))),
    }
    terms["spec"] = seq_of([Act("init_boards"), Act("init_tourists"), terms["S"]])
    return X, Y, terms


def build_system(cfg: RabinConfig) -> RabinSystem:
    """Compile the specification and its two serialised forms.

    Raises :class:`StateCapExceeded` when a product grows past ``cfg.cap``.
    """
    A = channel_alphabet(cfg)
    X, Y, terms = system_terms(cfg)
    system = RabinSystem(cfg, A, X, Y, terms)
    for name, t in terms.items():
        system.automata[name] = compile(t, A, cap=cfg.cap)
    return system


@dataclass
class Check:
    name: str
    expected: bool
    actual: bool
    group: str = ""

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass
class RabinReport:
    bound: int
    sizes: dict[str, int]
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def summary(self) -> str:
        head = f"B={self.bound} sizes " + ", ".join(f"{k}={v}" for k, v in sorted(self.sizes.items()))
        body = [f"{'ok  ' if c.ok else 'FAIL'} {c.name}: {'holds' if c.actual else 'fails'}" for c in self.checks]
        return "\n".join([head] + body)

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "sizes": self.sizes,
            "checks": [
                {"name": c.name, "group": c.group, "expected": c.expected, "actual": c.actual} for c in self.checks
            ],
            "ok": self.ok,
        }


def check_theorems(system: RabinSystem) -> list[Check]:
    """The serialisation theorems and the ``1 || (1 + X)^n`` identity."""
    S, ser, summed = system.S, system.serialized, system.summed
    out = [
        Check("serialized <= S", True, leq(ser, S)),
        Check("serialized == S", True, equiv(ser, S)),
        Check("summed == S", True, equiv(summed, S)),
    ]
    A = system.alphabet
    X = system.X
    for n in range(4):
        lhs = compile(Par(One(), power(Plus(One(), X), n)), A)
        out.append(Check(f"1 || (1 + X)^{n} == 1", True, equiv(lhs, compile(One(), A))))
    for c in out:
        c.group = "theorems"
    return out


def check_appendix_identities(system: RabinSystem, m: int = 2, n: int = 2) -> list[Check]:
    if m > 3 or n > 3:
        raise ValueError("m and n are limited to 3")
    A = system.alphabet
    X, Y = system.X, system.Y
    c = lambda t: compile(t, A, cap=system.config.cap)  # noqa: E731
    zero = c(Zero())
    out = []
    samples = {"1": One(), "X": X, "Y": Y}
    for an, a in samples.items():
        for bn, b in samples.items():
            lhs = c(Par(Seq(X, a), Seq(Y, b)))
            rhs = c(Seq(Par(X, Y), Par(a, b)))
            out.append(Check(f"X.{an} || Y.{bn} == (X || Y).({an} || {bn})", True, equiv(lhs, rhs)))
        out.append(Check(f"X.{an} || 1 == 0", True, equiv(c(Par(Seq(X, a), One())), zero)))
        out.append(Check(f"Y.{an} || 1 == 0", True, equiv(c(Par(Seq(Y, a), One())), zero)))
    step = Plus(One(), Par(X, Y))
    for i in range(m + 1):
        for j in range(n + 1):
            T = c(Par(power(Plus(One(), X), i), power(Plus(One(), Y), j)))
            out.append(Check(f"T[{i},{j}] == (1 + X || Y)^{min(i, j)}", True, equiv(T, c(power(step, min(i, j))))))
    for chk in out:
        chk.group = "appendix"
    return out


def atomicity_violations(system: RabinSystem) -> list[tuple[int, str]]:
    """Search S for a tourist action while another tourist's turn is open.

    A turn opens with a board read, is claimed by the first tagged action of
    a tourist, and closes with that tourist's move. A write closes nothing
    but must happen inside a claimed turn.
    """
    S = system.automata["spec"]
    frame = system.alphabet.frame
    start = (S.initial, None)
    seen = {start}
    todo = [start]
    bad: list[tuple[int, str]] = []
    while todo:
        s, owner = todo.pop()
        for a, t in S.succ[s]:
            nxt: object = owner
            if a in frame and a.endswith("_r"):
                if owner is not None:
                    bad.append((s, a))
                    continue
                nxt = "open"
            elif a in frame:
                if owner in (None, "open"):
                    bad.append((s, a))
                    continue
            elif a.startswith("p") and "_" in a:
                who = int(a[1 : a.index("_")])
                if owner == "open":
                    owner_now = who
                elif owner != who:
                    bad.append((s, a))
                    continue
                else:
                    owner_now = who
                nxt = None if a.endswith("_move") else owner_now
            key = (t, nxt)
            if key not in seen:
                seen.add(key)
                todo.append(key)
    return bad


def terminal_violations(P: Automaton) -> list[int]:
    """Sinks of a tourist other than a final state entered by a move or a
    deadlock entered by writing ``here``."""
    if not P.is_acyclic():
        return [P.initial]
    bad = []
    for s in P.states:
        if P.succ[s]:
            continue
        if s in P.finals:
            ok = all(a.endswith("_move") for a, _ in P.pred[s])
        else:
            ok = all(a.endswith(f"_{HERE}_w") for a, _ in P.pred[s])
        if not ok:
            bad.append(s)
    return sorted(bad)


def check_all(cfg: RabinConfig, m: int = 2, n: int = 2) -> RabinReport:
    system = build_system(cfg)
    checks = check_theorems(system)
    checks += check_appendix_identities(system, m, n)
    for i in range(len(cfg.tourists)):
        P = build_tourist(cfg, i)
        checks.append(Check(f"tourist {i} is a well-formed p-automaton", True, validate(P).ok and is_p_automaton(P), "structure"))
        checks.append(Check(f"tourist {i} paths end in a decision or a move", True, not terminal_violations(P), "structure"))
    checks.append(Check("turns are atomic in S", True, not atomicity_violations(system), "structure"))
    return RabinReport(cfg.value_bound, system.sizes(), checks)
