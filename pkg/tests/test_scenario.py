from __future__ import annotations

import pytest

from chainrouting.scenario import (
    EventKind,
    Mode,
    Route,
    ScenarioError,
    bundled_scenarios,
    load_scenario,
    parse_scenario,
    random_scenario,
)

INLINE = """\
[graph]
3
a b d
0 1 1
0 0 1
0 0 0
[destination] d
[preferences]
a: a-b-d > a-d
[events]
t=5 fail_link b d
t=2 fail_node b
"""


def test_bundled_names():
    assert set(bundled_scenarios()) >= {
        "varadhan-baseline", "varadhan-chain", "griffin-baseline", "griffin-chain", "temporal-fig6"}


def test_parse_inline_graph_and_sorted_events():
    scn = parse_scenario(INLINE)
    assert scn.graph.labels == ("a", "b", "d")
    assert scn.destination == "d"
    assert scn.preferences["a"] == (Route(("a", "b", "d")), Route(("a", "d")))
    assert [e.time for e in scn.events] == [2, 5]
    assert scn.events[1].subject == "link:b-d"
    assert scn.events[0].kind is EventKind.FAIL_NODE
    assert scn.mode is Mode.BASELINE and not scn.timestamping


def test_griffin_wildcards():
    scn = load_scenario("griffin-chain")
    c = scn.preferences["c"]
    assert c[1].wildcard and c[1].first_hop == "f"
    assert str(c[1]) == "via f X"
    assert scn.mode is Mode.CHAIN and scn.timestamping


def test_delays_are_symmetric():
    scn = load_scenario("temporal-fig6")
    assert scn.delay("d", "c") == scn.delay("c", "d") == 4
    assert scn.delay("a", "b") == 1


def test_graph_file_relative_to_scenario(tmp_path):
    (tmp_path / "g.adj").write_text("2\nx d\n0 1\n0 0\n")
    (tmp_path / "s.scn").write_text("[graph] file g.adj\n[destination] d\n")
    scn = load_scenario(str(tmp_path / "s.scn"))
    assert scn.graph.labels == ("x", "d")
    assert scn.name == "s"


@pytest.mark.parametrize("text, section, line", [
    ("[destination] d\n", "graph", 0),
    ("[graph] file nope.adj\n[destination] d\n", "graph", 0),
    ("junk\n", "", 1),
    ("[graph]\n2\nd x\n0 0\n2 0\n[destination] d\n", "graph", 5),
    ("[graph] file varadhan.adj\n[destination] d\n[mode] fast\n", "mode", 0),
    ("[graph] file varadhan.adj\n[destination] d\n[events]\nt=x fail_link a b\n", "events", 4),
    ("[graph] file varadhan.adj\n[destination] d\n[events]\nt=1 fail_link a\n", "events", 4),
    ("[graph] file varadhan.adj\n[destination] z\n", "destination", 2),
    ("[graph] file varadhan.adj\n[destination] d\n[preferences]\na: a-c-d\n", "preferences", 3),
    ("[graph] file varadhan.adj\n[destination] d\n[delays]\na b 0\n", "delays", 3),
    ("[graph] file varadhan.adj\n[destination] d\n[bogus]\n", "bogus", 3),
    ("[graph] file varadhan.adj\n[destination] d\n[chains]\na,b\n", "chains", 3),
])
def test_validation_errors_locate_problem(text, section, line):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)
    assert info.value.section == section
    assert info.value.line == line


def test_unknown_bundled_name():
    with pytest.raises(ScenarioError):
        load_scenario("no-such-scenario")


def test_chains_section():
    text = "[graph] file varadhan.adj\n[destination] d\n[mode] chain\n[chains]\nc,a,d ; c,d=c-d\n"
    scn = parse_scenario(text)
    assert scn.chains[0].order == ("c", "a", "d")
    assert scn.chains[0].segments == ((("c", "d"), ("c", "d")),)


def test_random_scenarios_are_seeded_and_valid():
    a, b = random_scenario(4), random_scenario(4)
    assert a == b
    for seed in range(30):
        random_scenario(seed).validate()
