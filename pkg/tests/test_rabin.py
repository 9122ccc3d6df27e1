import pydot
import pytest

from wcka.automata import StateCapExceeded
from wcka.io import to_dot
from wcka.rabin import (
    HERE,
    RabinConfig,
    build_place,
    build_system,
    build_tourist,
    channel_alphabet,
    check_all,
    read,
    tag,
    terminal_violations,
    tourist_term,
    write,
)
from wcka.simulation import leq
from wcka.terms import to_text


def test_action_names():
    assert read("c", 0) == "c_0_r" and write("m", HERE) == "m_here_w"
    assert tag(1, "move") == "p1_move"
    A = channel_alphabet(RabinConfig())
    assert "c_1_w" in A.frame and "p0_set" in A.internal and "flip" in A.flips


def test_tourist_shape():
    cfg = RabinConfig()
    text = to_text(tourist_term(cfg, 0))
    # k = 0 reads 0 (equal: flip), 1 (greater: set and move) or here (deadlock)
    assert "c_0_r.(p0_nothere.p0_eq.flip.(th.p0_set.(c_1_w.p0_move) + tt.p0_set.(c_1_w.p0_move)))" in text
    assert "c_1_r.(p0_nothere.p0_lt.p0_set.(c_1_w.p0_move))" in text
    assert "c_here_r.(p0_here.c_here_w.0)" in text


def test_tourist_decides_when_its_notepad_is_ahead():
    cfg = RabinConfig(value_bound=2, tourists=(("m", 2), ("c", 0)))
    assert "m_0_r.(p0_nothere.p0_gt.m_here_w.0)" in to_text(tourist_term(cfg, 0))
    assert not terminal_violations(build_tourist(cfg, 0))


def test_saturation():
    cfg = RabinConfig(value_bound=1)
    assert cfg.saturate(3) == 1 and cfg.saturate(0) == 0
    assert cfg.values == (0, 1, HERE)


def test_custom_bar():
    cfg = RabinConfig(value_bound=3, bar=lambda v: v - 1)
    text = to_text(tourist_term(cfg, 0))
    assert "th.p0_set.(c_2_w" in text and "tt.p0_set.(c_1_w" in text


def test_place_serves_reads_then_one_write():
    P = build_place("c", RabinConfig(boards=(1, 0)))
    labels = {a for _, a, _ in P.transitions}
    assert labels == {"c_1_r", "c_0_w", "c_1_w", "c_here_w"}


@pytest.mark.parametrize(
    "kwargs",
    [
        {"value_bound": 0},
        {"tourists": (("x", 0),)},
        {"tourists": (("c", 5),)},
        {"boards": (0,)},
        {"boards": (0, 9)},
    ],
)
def test_config_errors(kwargs):
    with pytest.raises(ValueError):
        RabinConfig(**kwargs)


@pytest.mark.parametrize(
    "cfg",
    [
        RabinConfig(value_bound=1),
        RabinConfig(value_bound=2),
        RabinConfig(value_bound=1, tourists=(("c", 0), ("m", 1), ("c", 1))),
        RabinConfig(value_bound=1, tourists=()),
        RabinConfig(value_bound=1, boards=(HERE, 1)),
    ],
    ids=["B1", "B2", "three-tourists", "no-tourists", "here-board"],
)
def test_check_all(cfg):
    report = check_all(cfg, 1, 1)
    assert report.ok, report.summary()
    assert {c.group for c in report.checks} == {"theorems", "appendix", "structure"}


def test_system_sizes_and_spec():
    system = build_system(RabinConfig())
    assert system.sizes()["S"] == 25
    assert leq(system.serialized, system.S)


def test_cap():
    with pytest.raises(StateCapExceeded):
        build_system(RabinConfig(cap=10))


def test_dot_is_parseable():
    (graph,) = pydot.graph_from_dot_data(to_dot(build_tourist(RabinConfig(), 0), "P"))
    assert len(graph.get_edges()) > 10
