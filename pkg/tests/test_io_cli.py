import json

import pydot
import pytest

from wcka import __version__
from wcka import io as wio
from wcka.cli import FAILED, OK, USAGE, main
from wcka.probability import epsilon
from wcka.simulation import equiv

ALPHABET = "external a, b, c; internal t; prob flip: 1/2 h, 1/2 g; sync {a, b, c};\n"


@pytest.mark.parametrize("text", ["a.b + a.c", "(a + t)*", "a ||{} b", "flip.(h.a + g.b)", "0", "1"])
def test_json_roundtrip(c, text):
    P = c(text)
    Q = wio.loads(wio.dumps(P))
    assert Q == P and equiv(P, Q)


def test_prob_roundtrip(c):
    E = epsilon(c("flip.(h.a + g.(b + t))"))
    assert wio.loads(wio.dumps(E)) == E
    d = json.loads(wio.dumps(E))
    assert d["kind"] == "prob_automaton" and d["version"] == wio.FORMAT_VERSION
    assert {"state": 2, "p": "1/2"} in d["transitions"][0]["dist"]


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"version": 99, "kind": "automaton"}',
        '{"kind": "automaton", "states": [0]}',
        '{"kind": "widget"}',
        '{"kind": "prob_automaton", "states": [0], "transitions": [], "finals": [], '
        '"initial_dist": [{"state": 0, "p": "x"}]}',
    ],
)
def test_format_errors(text):
    with pytest.raises(wio.FormatError):
        wio.loads(text)


def test_dot(c):
    for obj in (c("a.(b + t)*"), epsilon(c("flip.(h.a + g.b)"))):
        text = wio.to_dot(obj, 'odd "name"')
        (graph,) = pydot.graph_from_dot_data(text)
        assert graph.get_edges()
    assert "style=dashed" in wio.to_dot(c("t.a"))
    assert "doublecircle" in wio.to_dot(c("a"))


@pytest.fixture
def files(tmp_path):
    (tmp_path / "abc.cfg").write_text(ALPHABET)
    def term(name, text):
        f = tmp_path / f"{name}.wcka"
        f.write_text(f"%alphabet abc.cfg\n{text}\n")
        return str(f)
    return tmp_path, term


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.strip() == f"wcka {__version__} (format 1)"


def test_compile_and_check(files, capsys):
    tmp, term = files
    left, right = term("l", "a.b + a.c"), term("r", "a.(b + c)")
    out = tmp / "l.json"
    assert main(["compile", left, "-o", str(out), "--dot", str(tmp / "l.dot")]) == OK
    assert "states=5" in capsys.readouterr().out
    assert (tmp / "l.dot").read_text().startswith("digraph")
    assert main(["check", "--leq", str(out), right, "--witness", str(tmp / "w.json")]) == OK
    assert json.loads((tmp / "w.json").read_text())[0] == [0, 0]
    assert main(["check", "--leq", right, left]) == FAILED
    assert main(["check", "--equiv", left, right]) == FAILED
    assert "right is not simulated" in capsys.readouterr().out


def test_compile_with_separate_alphabet(files, capsys):
    tmp, _ = files
    f = tmp / "plain.txt"
    f.write_text("a.b\n")
    assert main(["compile", str(f), "--alphabet", str(tmp / "abc.cfg")]) == OK
    assert json.loads(capsys.readouterr().out)["kind"] == "automaton"


def test_may_and_traces(files, capsys):
    _, term = files
    P, Q = term("p", "a.(b.a)*"), term("q", "a + a.b.a")
    assert main(["may", "--leq", P, Q, "--depth", "2"]) == OK
    assert main(["may", "--leq", P, Q, "--depth", "3"]) == FAILED
    assert "test a.(b.a.(b.a)) succeeds with left" in capsys.readouterr().out
    assert main(["traces", P, "--leq", Q]) == FAILED
    assert "trace a b a b a is missing" in capsys.readouterr().out
    assert main(["traces", Q, "--dump", "--leq", P]) == OK
    out = capsys.readouterr().out
    assert "a b a" in out and "trace inclusion holds" in out


def test_laws_json_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["laws", "--seed", "7", "--trials", "5", "--depth", "2", "--json", str(a)]) == OK
    assert main(["laws", "--seed", "7", "--trials", "5", "--depth", "2", "--json", str(b)]) == OK
    assert a.read_bytes() == b.read_bytes()
    assert main(["laws", "--list"]) == OK
    assert "interchange" in capsys.readouterr().out
    assert main(["laws", "--trials", "3", "--law", "plus_zero", "--law", "star_of_sum"]) == OK


def test_prob_verbs(files, capsys):
    tmp, term = files
    P, Q = term("p", "flip.(h.a + g.b) + flip.(h.b + g.a)"), term("q", "flip.(h.(a + b) + g.(a + b))")
    assert main(["prob", "--p-leq", P, Q]) == OK
    assert main(["prob", "--p-leq", Q, P]) == FAILED
    pj, qj = tmp / "p.json", tmp / "q.json"
    assert main(["compile", P, "-o", str(pj)]) == OK
    assert main(["prob", "--epsilon", P, "-o", str(tmp / "ep.json")]) == OK
    assert main(["compile", Q, "-o", str(qj)]) == OK
    assert main(["prob", "--leq", str(tmp / "ep.json"), str(qj)]) == OK
    assert main(["prob", "--leq", str(qj), str(pj)]) == FAILED
    assert main(["prob", "--epsilon", term("bad", "flip.h")]) == USAGE
    assert "expected one per guard" in capsys.readouterr().err


def test_rabin_verb(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["rabin", "--check", "theorems", "--json", str(out), "--dot", str(tmp_path / "p.dot")]) == OK
    report = json.loads(out.read_text())
    assert report["ok"] and {c["group"] for c in report["checks"]} == {"theorems"}
    assert main(["rabin", "--check", "none"]) == OK
    assert "S=25" in capsys.readouterr().out
    assert main(["rabin", "--cap", "10"]) == USAGE


def test_usage_errors(files, capsys):
    tmp, term = files
    assert main(["compile", str(tmp / "missing.wcka")]) == USAGE
    assert main(["compile", term("bad", "a +")]) == USAGE
    assert main(["compile", term("undeclared", "zz")]) == USAGE
    (tmp / "broken.json").write_text("{")
    assert main(["check", "--leq", str(tmp / "broken.json"), term("a", "a")]) == USAGE
    assert main(["compile", term("big", "(a + t)* ||{} (b + t)* ||{} (c + t)*"), "--cap", "3"]) == USAGE
    with pytest.raises(SystemExit) as info:
        main(["check", "x", "y"])
    assert info.value.code == 2
