from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainrouting.chains import ChainStore, ChainTooLarge, ContractError, MalformedStructure, arc, chain, path_varc, varc
from chainrouting.digraph import Digraph, find_cycle
from chainrouting.rules import (
    ChainProposal,
    Outcome,
    SegmentStatus,
    SegState,
    establish_chain,
    message_cost,
    reinstate,
    rule1_check,
    rule2_failover,
)


def store_with(*chains) -> ChainStore:
    s = ChainStore()
    for c in chains:
        s.register_blueprint(c)
    return s


def test_rule1_accepts_consistent_order():
    local = store_with(chain("abd"))
    assert rule1_check(local, ChainProposal.of("acd"))


def test_rule1_rejects_with_cycle():
    local = store_with(chain("abd"), chain("cad"))
    res = rule1_check(local, ChainProposal.of("bcd"))
    assert not res
    assert res.cycle[0] == res.cycle[-1]
    assert set(res.cycle) == {"a", "b", "c"}


def test_rule1_sees_varc_ordering():
    # the Varc c-a-d inside the proposal orders c before a
    local = store_with(chain("abc"))
    p = ChainProposal.of("cxd", {("c", "d"): path_varc("c", "a", "d")})
    assert ("c", "a") in p.implied_pairs()
    assert not rule1_check(local, p)


def test_proposal_validation():
    with pytest.raises(MalformedStructure):
        ChainProposal(arc("a", "b"))
    with pytest.raises(ChainTooLarge):
        ChainProposal.of("abcdefgh")
    p = ChainProposal.of("abcd")
    assert p.proposer == "a" and p.intermediaries == ("b", "c")
    assert len(p.required_segments) == 6


@pytest.mark.parametrize("n, cost", [(3, 3), (4, 6), (5, 9), (6, 12), (7, 15)])
def test_all_accept_costs(n, cost):
    p = ChainProposal.of([f"v{i}" for i in range(n)])
    out = establish_chain(p, {})
    assert out.status is Outcome.ESTABLISHED
    assert out.messages_sent == cost == message_cost(n)
    assert out.rounds == 3
    kinds = [m.kind for m in out.messages]
    assert kinds == ["request"] * (n - 2) + ["accept"] * (n - 2) + ["confirm"] * (n - 2)


def test_two_vertex_chain_needs_no_messages():
    out = establish_chain(ChainProposal.of("ab"), {})
    assert out.established and out.messages_sent == 0


def test_rejection_costs_two_rounds():
    p = ChainProposal.of("abcde")
    out = establish_chain(p, {"c": False})
    assert out.status is Outcome.REJECTED
    assert out.rejected_by == "c"
    assert out.messages_sent == 2 * 3 and out.rounds == 2


def test_varadhan_third_chain_rejected():
    # a holds C(a,b,d); c holds C(c,a,d) and, as its member, nothing else
    store_a = store_with(chain("abd"))
    store_b = store_with(chain("abd"))
    store_c = store_with(chain("abd"), chain("cad"))
    out = establish_chain(ChainProposal.of("bcd"), {"a": store_a, "b": store_b, "c": store_c})
    assert out.status is Outcome.REJECTED
    assert out.rejected_by == "c"
    assert out.cycle == ("a", "b", "c", "a")
    assert out.messages_sent == 2


def test_commit_registers_everywhere():
    stores = {v: ChainStore() for v in "abc"}
    out = establish_chain(ChainProposal.of("abc"), stores, commit=True)
    assert out.established
    assert all("C0:a,b,c" in s for s in stores.values())


def test_callable_policy():
    p = ChainProposal.of("abc")
    assert not establish_chain(p, {"b": lambda prop: False}).established
    assert establish_chain(p, {"b": lambda prop: True}).established


# ---- failover --------------------------------------------------------------

def griffin_chain():
    return chain("cfbd", {("c", "d"): path_varc("c", "a", "d"), ("f", "d"): path_varc("f", "a", "d")})


def test_all_up_keeps_every_path():
    c = griffin_chain()
    assert len(rule2_failover(c, SegmentStatus.all_up(c))) == 3


def test_failover_after_bd_fails():
    c = griffin_chain()
    st = SegmentStatus.all_up(c).fail([("b", "d")])
    assert st.state("b", "d") is SegState.DOWN
    assert st.state("f", "d") is SegState.UNCONFIRMED
    assert rule2_failover(c, st).paths == (("c", "d"),)


def test_recovery_needs_confirmation():
    c = griffin_chain()
    st = SegmentStatus.all_up(c).fail([("b", "d")]).recover([("b", "d")])
    assert st.state("b", "d") is SegState.UNCONFIRMED
    assert rule2_failover(c, st).paths == (("c", "d"),)
    st = reinstate(c, st, [("b", "d")])
    assert len(rule2_failover(c, st)) == 3


def test_confirming_down_segment_is_an_error():
    c = griffin_chain()
    st = SegmentStatus.from_failures(c, [("b", "d")])
    with pytest.raises(ContractError):
        reinstate(c, st, [("b", "d")])
    assert reinstate(c, st, [("c", "b")]) is st


def test_no_safe_path():
    c = chain("abc")
    st = SegmentStatus.from_failures(c, [("a", "c"), ("a", "b")])
    ps = rule2_failover(c, st)
    assert ps.no_safe_path and len(ps) == 0


def test_segment_failure_follows_nested_routes():
    inner = chain("xyz")
    c = chain("axz", {("x", "z"): inner})
    st = SegmentStatus.from_failures(c, [("x", "z")])
    assert st.down() == [("x", "z")]


def test_status_rejects_foreign_segment():
    with pytest.raises(ContractError):
        SegmentStatus(chain("abc"), ((("c", "a"), SegState.DOWN),))


@given(st.integers(3, 7), st.data())
@settings(max_examples=150, deadline=None)
def test_failover_paths_avoid_failed_arcs(n, data):
    order = [f"v{i}" for i in range(n)]
    c = chain(order)
    pairs = [p for p, _ in c.segments()]
    failed = data.draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    ps = rule2_failover(c, SegmentStatus.from_failures(c, failed))
    for p in ps:
        assert not set(zip(p, p[1:])) & set(failed)
    assert ps.no_safe_path == (len(ps) == 0)


@given(st.lists(st.permutations("abcdef").map(lambda p: "".join(p[:4])), min_size=2, max_size=10))
@settings(max_examples=150, deadline=None)
def test_gated_admissions_keep_union_acyclic(orders):
    # members vote with the cycle veto; established chains are announced to every store
    stores: dict[str, ChainStore] = {v: ChainStore() for v in "abcdef"}
    admitted = []
    for o in orders:
        p = ChainProposal.of(o)
        if any(a.key == p.chain.key for a in admitted):
            continue
        out = establish_chain(p, {v: stores[v] for v in o})
        if out.established:
            admitted.append(p.chain)
            for s in stores.values():
                s.register_blueprint(p.chain)
    union = {pr for c in admitted for pr in c.relation()}
    labels = sorted({v for pr in union for v in pr})
    assert find_cycle(Digraph.from_arcs(labels, union)) is None
