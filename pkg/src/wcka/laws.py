"""Executable law suite: every axiom and derived law checked on compiled
terms with the simulation checker, plus the documented counterexamples."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .automata import Alphabet, StateCapExceeded
from .probability import is_p_automaton, p_leq
from .simulation import equiv, leq
from .terms import (
    Act,
    One,
    Par,
    Plus,
    Seq,
    Star,
    Term,
    Zero,
    compile,
    load_alphabet,
    parse,
    power,
    sum_of,
    to_text,
)

DEFAULT_ALPHABET = """
external a, b, c;
internal t;
prob flip: 1/2 h, 1/2 g;
sync {a, b, c};
"""


def default_alphabet() -> Alphabet:
    return load_alphabet(DEFAULT_ALPHABET)


# -- random terms ----------------------------------------------------------------


@dataclass
class TermGenerator:
    """Seeded random terms over an alphabet.

    Probabilistic actions only appear as whole fragments
    ``flip.(g1.s1 + ... + gn.sn)``, so guards always follow their flip.
    """

    seed: int = 0
    max_depth: int = 3
    alphabet: Alphabet = field(default_factory=default_alphabet)
    weights: Mapping[str, float] = field(
        default_factory=lambda: {"atom": 4, "plus": 3, "seq": 3, "star": 1, "par": 1, "flip": 1}
    )
    state_cap: int = 200

    def atoms(self) -> list[Term]:
        A = self.alphabet
        names = sorted((A.external - A.flips) | (A.internal - set(A.guard_owner)))
        return [Zero(), One()] + [Act(n) for n in names]

    def rng_for(self, label: str) -> random.Random:
        return random.Random(f"{self.seed}:{label}")

    def term(self, rng: random.Random, depth: int | None = None) -> Term:
        depth = self.max_depth if depth is None else depth
        kinds = [k for k in self.weights if depth > 0 or k == "atom"]
        if not self.alphabet.prob:
            kinds = [k for k in kinds if k != "flip"]
        kind = rng.choices(kinds, [self.weights[k] for k in kinds])[0]
        if kind == "atom":
            return rng.choice(self.atoms())
        if kind == "star":
            return Star(self.term(rng, depth - 1))
        if kind == "flip":
            spec = rng.choice(self.alphabet.prob)
            arms = [Seq(Act(g), self.term(rng, depth - 1)) for g in spec.guards]
            return Seq(Act(spec.flip), sum_of(arms))
        op = {"plus": Plus, "seq": Seq, "par": Par}[kind]
        return op(self.term(rng, depth - 1), self.term(rng, depth - 1))

    def fits(self, t: Term) -> bool:
        try:
            compile(t, self.alphabet, cap=self.state_cap)
        except StateCapExceeded:
            return False
        return True

    def sample(self, rng: random.Random, depth: int | None = None) -> Term:
        """A random term whose automaton stays under the state cap."""
        while True:
            t = self.term(rng, depth)
            if self.fits(t):
                return t


# -- laws --------------------------------------------------------------------

EQ, LEQ, IMPLIES = "equiv", "leq", "implies"


@dataclass(frozen=True)
class Law:
    id: str
    statement: str
    variables: tuple[str, ...]
    kind: str
    sides: Callable[[Mapping[str, Term]], tuple[Term, Term]]
    hypothesis: Callable[[Mapping[str, Term]], tuple[Term, Term]] | None = None
    # bindings used for half of the samples of an implication, to hit the hypothesis
    helper: Callable[[Mapping[str, Term]], Mapping[str, Term]] | None = None
    derived: bool = False


@dataclass(frozen=True)
class NegativeClaim:
    id: str
    statement: str
    kind: str
    bindings: Mapping[str, str]
    sides: Callable[[Mapping[str, Term]], tuple[Term, Term]]


def _law(id, statement, variables, kind, sides, **kw) -> Law:
    return Law(id, statement, tuple(variables.split()), kind, sides, **kw)


def _mono(op: Callable[[Term, Term], Term]) -> Callable[[Mapping[str, Term]], tuple[Term, Term]]:
    # y = x + z guarantees x <= y
    return lambda b: (op(b["x"], b["w"]), op(Plus(b["x"], b["z"]), b["w"]))


LAWS: tuple[Law, ...] = (
    _law("plus_associative", "x + (y + z) = (x + y) + z", "x y z", EQ,
         lambda b: (Plus(b["x"], Plus(b["y"], b["z"])), Plus(Plus(b["x"], b["y"]), b["z"]))),
    _law("plus_commutative", "x + y = y + x", "x y", EQ,
         lambda b: (Plus(b["x"], b["y"]), Plus(b["y"], b["x"]))),
    _law("plus_idempotent", "x + x = x", "x", EQ, lambda b: (Plus(b["x"], b["x"]), b["x"])),
    _law("plus_zero", "x + 0 = x", "x", EQ, lambda b: (Plus(b["x"], Zero()), b["x"])),
    _law("seq_associative", "x(yz) = (xy)z", "x y z", EQ,
         lambda b: (Seq(b["x"], Seq(b["y"], b["z"])), Seq(Seq(b["x"], b["y"]), b["z"]))),
    _law("seq_one_left", "1x = x", "x", EQ, lambda b: (Seq(One(), b["x"]), b["x"])),
    _law("seq_one_right", "x1 = x", "x", EQ, lambda b: (Seq(b["x"], One()), b["x"])),
    _law("left_annihilation", "0x = 0", "x", EQ, lambda b: (Seq(Zero(), b["x"]), Zero())),
    _law("left_subdistributivity", "xy + xz <= x(y + z)", "x y z", LEQ,
         lambda b: (Plus(Seq(b["x"], b["y"]), Seq(b["x"], b["z"])), Seq(b["x"], Plus(b["y"], b["z"])))),
    _law("right_distributivity", "(x + y)z = xz + yz", "x y z", EQ,
         lambda b: (Seq(Plus(b["x"], b["y"]), b["z"]), Plus(Seq(b["x"], b["z"]), Seq(b["y"], b["z"])))),
    _law("left_unfold", "1 + xx* = x*", "x", EQ,
         lambda b: (Plus(One(), Seq(b["x"], Star(b["x"]))), Star(b["x"]))),
    _law("left_induction", "xy <= y implies x*y <= y", "x y z", IMPLIES,
         lambda b: (Seq(Star(b["x"]), b["y"]), b["y"]),
         hypothesis=lambda b: (Seq(b["x"], b["y"]), b["y"]),
         helper=lambda b: {**b, "y": Seq(Star(b["x"]), b["z"])}),
    _law("right_unfold_below", "1 + x*x <= x*", "x", LEQ,
         lambda b: (Plus(One(), Seq(Star(b["x"]), b["x"])), Star(b["x"])), derived=True),
    _law("right_induction", "yx <= y implies yx* <= y", "x y z", IMPLIES,
         lambda b: (Seq(b["y"], Star(b["x"])), b["y"]),
         hypothesis=lambda b: (Seq(b["y"], b["x"]), b["y"]),
         helper=lambda b: {**b, "y": Seq(b["z"], Star(b["x"]))}, derived=True),
    _law("par_associative", "x || (y || z) = (x || y) || z", "x y z", EQ,
         lambda b: (Par(b["x"], Par(b["y"], b["z"])), Par(Par(b["x"], b["y"]), b["z"]))),
    _law("par_commutative", "x || y = y || x", "x y", EQ,
         lambda b: (Par(b["x"], b["y"]), Par(b["y"], b["x"]))),
    _law("par_one_idempotent", "1 || 1 = 1", "", EQ, lambda b: (Par(One(), One()), One())),
    _law("par_subdistributivity", "x || y + x || z <= x || (y + z)", "x y z", LEQ,
         lambda b: (Plus(Par(b["x"], b["y"]), Par(b["x"], b["z"])), Par(b["x"], Plus(b["y"], b["z"])))),
    _law("interchange", "(x || y)(u || v) <= (xu) || (yv)", "x y u v", LEQ,
         lambda b: (Seq(Par(b["x"], b["y"]), Par(b["u"], b["v"])), Par(Seq(b["x"], b["u"]), Seq(b["y"], b["v"])))),
    _law("plus_monotone", "x <= y implies x + w <= y + w", "x z w", LEQ, _mono(Plus)),
    _law("seq_monotone_left", "x <= y implies xw <= yw", "x z w", LEQ, _mono(Seq)),
    _law("seq_monotone_right", "x <= y implies wx <= wy", "x z w", LEQ,
         lambda b: (Seq(b["w"], b["x"]), Seq(b["w"], Plus(b["x"], b["z"])))),
    _law("star_monotone", "x <= y implies x* <= y*", "x z", LEQ,
         lambda b: (Star(b["x"]), Star(Plus(b["x"], b["z"])))),
    _law("par_monotone", "x <= y implies x || w <= y || w", "x z w", LEQ, _mono(Par)),
    _law("star_of_par_of_stars", "(s* || t*)* = s* || t*", "s t", EQ,
         lambda b: (Star(Par(Star(b["s"]), Star(b["t"]))), Par(Star(b["s"]), Star(b["t"])))),
    _law("star_of_par", "(s || t)* <= s* || t*", "s t", LEQ,
         lambda b: (Star(Par(b["s"], b["t"])), Par(Star(b["s"]), Star(b["t"])))),
    _law("star_of_sum", "(s + t)* = (s*t*)*", "s t", EQ,
         lambda b: (Star(Plus(b["s"], b["t"])), Star(Seq(Star(b["s"]), Star(b["t"]))))),
    _law("flip_subdistributivity", "flip.y + flip.z <= flip.(y + z)", "y z", LEQ,
         lambda b: (Plus(Seq(Act("flip"), b["y"]), Seq(Act("flip"), b["z"])), Seq(Act("flip"), Plus(b["y"], b["z"])))),
    _law("star_approximation", "(1 + x)^n <= x* for n <= 4", "x", LEQ,
         lambda b: (power(Plus(One(), b["x"]), 4), Star(b["x"])), derived=True),
)

NEGATIVE_CLAIMS: tuple[NegativeClaim, ...] = (
    NegativeClaim("left_distributivity", "x(y + z) <= xy + xz", LEQ, {"x": "flip", "y": "a", "z": "b"},
                  lambda b: (Seq(b["x"], Plus(b["y"], b["z"])), Plus(Seq(b["x"], b["y"]), Seq(b["x"], b["z"])))),
    # the converse of right_unfold_below: after one step x* may both stop and go on
    NegativeClaim("right_unfold", "x* <= 1 + x*x", LEQ, {"x": "c"},
                  lambda b: (Star(b["x"]), Plus(One(), Seq(Star(b["x"]), b["x"])))),
    NegativeClaim("right_annihilation", "x0 = 0", EQ, {"x": "a"}, lambda b: (Seq(b["x"], Zero()), Zero())),
    NegativeClaim("par_one_neutral", "1 || x = x", EQ, {"x": "a"}, lambda b: (Par(One(), b["x"]), b["x"])),
    NegativeClaim("mixed_frame_associativity", "(x ||{a} y) ||{c} z = x ||{a} (y ||{c} z)", EQ,
                  {"x": "a", "y": "b", "z": "a"},
                  lambda b: (Par(Par(b["x"], b["y"], frozenset("a")), b["z"], frozenset("c")),
                             Par(b["x"], Par(b["y"], b["z"], frozenset("c")), frozenset("a")))),
)

_BY_ID = {law.id: law for law in LAWS}
_NEG_BY_ID = {c.id: c for c in NEGATIVE_CLAIMS}


def law_ids() -> list[str]:
    return [law.id for law in LAWS]


@dataclass(frozen=True)
class LawInstance:
    law: str
    bindings: Mapping[str, Term]
    verdict: str  # "holds", "fails", or "vacuous" when an implication's hypothesis is false
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "bindings": {k: to_text(v) for k, v in sorted(self.bindings.items())},
            "verdict": self.verdict,
            "detail": self.detail,
        }


def _decide(kind: str, lhs: Term, rhs: Term, alphabet: Alphabet) -> tuple[bool, str]:
    L, R = compile(lhs, alphabet), compile(rhs, alphabet)
    if kind == EQ:
        if not leq(L, R):
            return False, "lhs not below rhs"
        if not leq(R, L):
            return False, "rhs not below lhs"
        return True, ""
    if not leq(L, R):
        return False, "lhs not below rhs"
    return True, ""


def check_law(law_id: str, bindings: Mapping[str, Term], alphabet: Alphabet | None = None) -> LawInstance:
    """Compile both sides under ``bindings`` and decide the law."""
    alphabet = alphabet or default_alphabet()
    if law_id in _NEG_BY_ID:
        claim = _NEG_BY_ID[law_id]
        ok, detail = _decide(claim.kind, *claim.sides(bindings), alphabet)
        return LawInstance(law_id, dict(bindings), "holds" if ok else "fails", detail)
    if law_id not in _BY_ID:
        raise KeyError(f"unknown law {law_id!r}")
    law = _BY_ID[law_id]
    missing = set(law.variables) - set(bindings)
    if missing:
        raise ValueError(f"law {law_id} needs bindings for {sorted(missing)}")
    if law.kind == IMPLIES:
        assert law.hypothesis is not None
        hl, hr = law.hypothesis(bindings)
        if not leq(compile(hl, alphabet), compile(hr, alphabet)):
            return LawInstance(law_id, dict(bindings), "vacuous")
        ok, detail = _decide(LEQ, *law.sides(bindings), alphabet)
    else:
        ok, detail = _decide(law.kind, *law.sides(bindings), alphabet)
    return LawInstance(law_id, dict(bindings), "holds" if ok else "fails", detail)


def negative_witness(claim_id: str, alphabet: Alphabet | None = None) -> LawInstance:
    alphabet = alphabet or default_alphabet()
    claim = _NEG_BY_ID[claim_id]
    bindings = {k: parse(v, alphabet) for k, v in claim.bindings.items()}
    return check_law(claim_id, bindings, alphabet)


@dataclass
class LawResult:
    law: str
    statement: str
    trials: int
    held: int = 0
    failed: list[LawInstance] = field(default_factory=list)
    vacuous: int = 0
    derived: bool = False

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_json(self) -> dict:
        out = {
            "law": self.law,
            "statement": self.statement,
            "trials": self.trials,
            "held": self.held,
            "failed": [i.to_json() for i in self.failed],
            "derived_in_model": self.derived,
        }
        if self.vacuous or self.law in ("left_induction", "right_induction"):
            out["hypothesis_hits"] = self.trials - self.vacuous
        return out


@dataclass
class SuiteReport:
    seed: int
    trials: int
    laws: list[LawResult]
    negatives: list[LawInstance]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.laws) and all(n.verdict == "fails" for n in self.negatives)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "ok": self.ok,
            "laws": [r.to_json() for r in self.laws],
            "negative_claims": [
                {**n.to_json(), "expected": "fails", "as_expected": n.verdict == "fails"} for n in self.negatives
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = []
        for r in self.laws:
            mark = "ok  " if r.ok else "FAIL"
            extra = f" (hypothesis held {r.trials - r.vacuous}/{r.trials})" if r.law.endswith("induction") else ""
            lines.append(f"{mark} {r.law}: {r.held}/{r.trials} held{extra}")
        for n in self.negatives:
            mark = "ok  " if n.verdict == "fails" else "FAIL"
            lines.append(f"{mark} {n.law} fails on its witness: {n.verdict} {n.detail}".rstrip())
        return "\n".join(lines)


def run_suite(
    gen: TermGenerator,
    trials: int,
    laws: Sequence[str] | None = None,
) -> SuiteReport:
    """Sample ``trials`` instances of every law and check every negative witness."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    chosen = [(_BY_ID[i]) for i in laws] if laws is not None else list(LAWS)
    results = []
    for law in chosen:
        rng = gen.rng_for(law.id)
        res = LawResult(law.id, law.statement, trials, derived=law.derived)
        for k in range(trials):
            names = set(law.variables) | ({"z"} if law.helper else set())
            bindings = {v: gen.sample(rng) for v in sorted(names)}
            if law.helper is not None and k % 2 == 0:
                bindings = dict(law.helper(bindings))
            inst = check_law(law.id, bindings, gen.alphabet)
            if inst.verdict == "fails":
                res.failed.append(inst)
            elif inst.verdict == "vacuous":
                res.vacuous += 1
            else:
                res.held += 1
        results.append(res)
    negatives = [negative_witness(c.id, gen.alphabet) for c in NEGATIVE_CLAIMS]
    return SuiteReport(gen.seed, trials, results, negatives)


# -- vending machine ---------------------------------------------------------------

VM_ALPHABET = """
external coin, tea, coffee;
prob flip: 1/2 th, 1/2 tt;
sync {coin, tea, coffee};
"""

VM = "coin.flip.(th.(tea + 1) + tt.(coffee + 1))"
USER = "coin.(tea + 1)"


@dataclass
class VMReport:
    claims: list[tuple[str, str, bool, bool]]  # (description, relation, expected, actual)

    @property
    def ok(self) -> bool:
        return all(e == a for _, _, e, a in self.claims)

    def summary(self) -> str:
        return "\n".join(
            f"{'ok  ' if e == a else 'FAIL'} {d} [{rel}]: {'holds' if a else 'fails'}" for d, rel, e, a in self.claims
        )


def check_vm_example() -> VMReport:
    """The vending-machine inequation and its variants.

    Plain simulation cannot see probabilities, so the variant promising tea
    whatever the coin shows is only refuted by p-simulation.
    """
    A = load_alphabet(VM_ALPHABET)

    def c(text: str):
        return compile(parse(text, A), A)

    system = c(f"({USER}) || ({VM})")
    other_user = c(f"(coin.(coffee + 1)) || ({VM})")
    rhs = c("coin.flip.(th.(tea + 1) + tt)")
    tea_always = c("coin.flip.(th.(tea + 1) + tt.(tea + 1))")
    only_heads_tea = c("coin.flip.th.tea")
    no_coin_flip = c("coin.(tea + 1)")
    claims = [
        ("coin.flip.(th.(tea+1) + tt) <= U || VM", "leq", True, leq(rhs, system)),
        ("coin.flip.(th.(tea+1) + tt) <= U || VM", "p_leq", True, p_leq(rhs, system)),
        ("coin.flip.(th + tt.(coffee+1)) <= U' || VM", "leq", True,
         leq(c("coin.flip.(th + tt.(coffee + 1))"), other_user)),
        ("coin.flip.(th.(tea+1) + tt.(tea+1)) <= U || VM", "p_leq", False, p_leq(tea_always, system)),
        ("coin.flip.(th.(tea+1) + tt.(tea+1)) <= U || VM", "leq", True, leq(tea_always, system)),
        ("coin.(tea+1) <= U || VM", "leq", False, leq(no_coin_flip, system)),
        ("coin.flip.th.tea <= U || VM", "leq", True, leq(only_heads_tea, system)),
        ("U || VM is a p-automaton", "structure", True, is_p_automaton(system)),
    ]
    return VMReport(claims)


def equivalent_texts(left: str, right: str, alphabet: Alphabet) -> bool:
    return equiv(compile(parse(left, alphabet), alphabet), compile(parse(right, alphabet), alphabet))
