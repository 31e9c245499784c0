from __future__ import annotations

import random

import pytest
from hypothesis import given, settings

from chainrouting.chains import CycleRejected, Kind, chain, is_complete_order, resolve, segment_digraph
from chainrouting.digraph import Digraph, DigraphError, Role, find_cycle, load_adjacency
from chainrouting.discovery import (
    ARC_ONLY,
    BRIDGE,
    UNREACHABLE,
    ClassKind,
    ReachabilityClass,
    _bfs,
    all_chains,
    build_all_reports,
    build_report,
    discover,
    modified_bfs,
    parse_csv,
    render_csv,
    render_table,
    seed_chain,
)

from conftest import DATA, dags, random_dag

NESTED_FROM_S = {"a": "A", "b": "2", "c": "A", "d": "3", "e": "1", "f": "A", "g": "B", "h": "1", "i": "1"}


@pytest.fixture(scope="module")
def nested():
    return load_adjacency(str(DATA / "nested.adj"))


def test_nested_classification(nested):
    rep = build_report(nested, "s")
    assert {v: c.code for v, c in rep.per_destination.items()} == NESTED_FROM_S
    assert rep.per_destination["d"] == ReachabilityClass.chain_height(3)
    assert rep.histogram == {1: 3, 2: 1, 3: 1}
    assert rep.arc_only_count == 3


def test_nested_top_chain_decomposition(nested):
    store = discover(nested, "s")
    top = [b for b in store.top_level() if b.kind is Kind.CHAIN]
    assert [b.order for b in top] == [("s", "e", "b", "d")]
    c = top[0]
    assert c.segment("s", "e").kind is Kind.ARC
    assert c.segment("b", "d").kind is Kind.ARC
    assert c.segment("s", "b").waypoints == ("s", "a", "b")
    assert c.segment("s", "d").waypoints == ("s", "c", "d")
    assert c.segment("e", "b").waypoints == ("e", "f", "b")
    ed = c.segment("e", "d")
    assert ed.kind is Kind.VARC
    inner, last = ed.parts
    assert inner.kind is Kind.CHAIN and inner.order == ("e", "h", "g")
    assert last.kind is Kind.ARC and (last.tail, last.head) == ("g", "d")
    assert inner.segment("e", "g").waypoints == ("e", "f", "g")
    hig = inner.segment("h", "g")
    assert hig.kind is Kind.CHAIN and hig.order == ("h", "i", "g")
    assert max(s.level for s in store.structures.values()) == 4


def test_nested_resolution_notes_shared_arc(nested):
    store = discover(nested, "s")
    r = resolve(store, "C0:s,e,b,d")
    assert r.paths == (
        (("s", "c"), ("c", "d")),
        (("s", "e"), ("e", "f"), ("f", "g"), ("g", "d")),
        (("s", "a"), ("a", "b"), ("b", "d")),
    )
    assert r.shared == {("e", "f")}


def test_varadhan_nests_inner_chain():
    d = load_adjacency(str(DATA / "varadhan.adj"))
    store = discover(d, "a")
    (top,) = [b for b in store.top_level() if b.kind is Kind.CHAIN]
    assert top.order == ("a", "b", "d")
    assert top.segment("b", "d").order == ("b", "c", "d")


def test_three_node_arc_only_all_pairs():
    d = Digraph.from_arcs("abc", [("a", "b"), ("b", "c"), ("c", "a")][:2])
    reps = build_all_reports(d)
    assert reps[0].per_destination == {"b": ARC_ONLY, "c": ARC_ONLY}
    table = render_table(reps)
    assert table.splitlines()[1].split() == ["a", "-", "A", "A"]


def test_triangle_is_height_two():
    d = Digraph.from_arcs("abc", [("a", "b"), ("a", "c"), ("b", "c")])
    rep = build_report(d, "a")
    assert rep.per_destination["c"] == ReachabilityClass.chain_height(2)


def test_unreachable():
    d = Digraph.from_arcs("abc", [("a", "b")])
    assert build_report(d, "a").per_destination["c"] == UNREACHABLE
    assert UNREACHABLE.code == "."


def test_class_codes_round_trip():
    for c in (ARC_ONLY, BRIDGE, UNREACHABLE, ReachabilityClass.chain_height(4)):
        assert ReachabilityClass.from_code(c.code) == c
    with pytest.raises(ValueError):
        ReachabilityClass.chain_height(0)


def test_destination_role_is_conversed(nested):
    dest = nested.converse().with_role(Role.DESTINATION)
    assert build_report(dest, "s").per_destination == build_report(nested, "s").per_destination
    with pytest.raises(DigraphError):
        modified_bfs(dest, "s")


def test_back_arc_to_ancestor_yields_no_chain():
    d = Digraph.from_arcs("abc", [("a", "b"), ("b", "c"), ("c", "b")])
    st, _, events = _bfs(d, "a")
    assert all(seed_chain(d, st, t) is None for t in events if (t.tail, t.head) == ("c", "b"))


def test_max_chain_size_limits_heights():
    d = Digraph.from_arcs("abcde", [(u, v) for i, u in enumerate("abcde") for v in "abcde"[i + 1:]])
    assert build_report(d, "a").per_destination["e"].height == 4
    capped = build_report(d, "a", max_chain_size=3)
    # equally tall chains over shared segments must not swallow each other
    assert {v: c.code for v, c in capped.per_destination.items()} == {"b": "1", "c": "2", "d": "2", "e": "2"}


def test_csv_round_trip(nested):
    reps = build_all_reports(nested)
    parsed = parse_csv(render_csv(reps))
    for r in reps:
        for v, c in r.per_destination.items():
            assert parsed[(r.origin, v)] == c


def test_table_and_csv_agree(nested):
    reps = build_all_reports(nested)
    parsed = parse_csv(render_csv(reps))
    rows = render_table(reps).splitlines()
    labels = rows[0].split()
    for row in rows[1:]:
        origin, *cells = row.split()
        for v, code in zip(labels, cells):
            if v != origin:
                assert parsed[(origin, v)].code == code


def check_report(d: Digraph, origin: str) -> None:
    rep = build_report(d, origin)
    for v, c in rep.per_destination.items():
        if c.kind is ClassKind.CHAIN:
            assert c.height <= rep.arc_disjoint[v]
        if c.kind is ClassKind.UNREACHABLE:
            assert rep.arc_disjoint[v] == 0
    assert sum(rep.histogram.values()) == sum(
        1 for c in rep.per_destination.values() if c.kind is ClassKind.CHAIN)
    for c in all_chains(rep.store):
        assert is_complete_order(segment_digraph(c))
    rel = rep.store.relation
    assert find_cycle(Digraph.from_arcs(sorted({x for p in rel for x in p}), rel)) is None


@given(dags(max_n=8))
@settings(max_examples=150, deadline=None)
def test_discovery_invariants(d):
    check_report(d, d.labels[0])


def test_discovery_invariants_seeded_batch():
    rng = random.Random(11)
    for _ in range(50):
        d = random_dag(rng.randint(3, 10), rng.uniform(0.2, 0.7), rng)
        check_report(d, rng.choice(d.labels))


def test_discovery_is_deterministic(nested):
    a = render_csv(build_all_reports(nested))
    b = render_csv(build_all_reports(nested))
    assert a == b
    assert discover(nested, "s").dumps() == discover(nested, "s").dumps()
