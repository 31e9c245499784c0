"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
from __future__ import annotations

import itertools
import random
import subprocess
import sys
import time
from contextlib import contextmanager

import pytest

from chainrouting.chains import (
    MAX_CHAIN_SIZE,
    ChainTooLarge,
    GrowRejected,
    Kind,
    canonical_disjoint_paths,
    chain,
    chain_metrics,
    grow,
    is_complete_order,
    resolve,
    segment_digraph,
)
from chainrouting.cli import main
from chainrouting.digraph import (
    Digraph,
    arc_disjoint_count,
    complete_order,
    delete_vertex,
    find_cycle,
    load_adjacency,
)
from chainrouting.discovery import ClassKind, all_chains, build_report, discover
from chainrouting.rules import ChainProposal, establish_chain
from chainrouting.scenario import load_scenario
from chainrouting.simulator import Outcome, detect_loop, run

from conftest import DATA, GOLDEN, random_dag


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def report(number: int, title: str):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            took = time.perf_counter() - start
            with capsys.disabled():
                print(f"\n[criterion {number:>2}] {'PASS' if ok else 'FAIL'} {title} ({took:.2f}s)")
    return report


def labels(n: int) -> list[str]:
    return [f"v{i}" for i in range(1, n + 1)]


def test_c01_counting_laws(criterion):
    with criterion(1, "complete orders: n-1 disjoint paths, u=2n-3, r=(n-2)(n-3)/2"):
        start = time.perf_counter()
        for n in range(2, 8):
            d = complete_order(labels(n))
            c = chain(labels(n))
            paths = canonical_disjoint_paths(c)
            assert arc_disjoint_count(d, labels(n)[0], labels(n)[-1]) == n - 1 == len(paths)
            u = len(paths.used_arcs())
            r = len(d.arcs) - u
            assert u == 2 * n - 3 == chain_metrics(n).u
            assert r == (n - 2) * (n - 3) // 2 == chain_metrics(n).r
        m3, m8 = chain_metrics(3), chain_metrics(8)
        assert (m3.u, m3.r) == (3, 0)
        assert (m8.u, m8.r) == (13, 15)
        assert time.perf_counter() - start < 1.0


def test_c02_vertex_deletion(criterion):
    with criterion(2, "deleting any vertex of a complete order (n=3..7) leaves one"):
        cases = 0
        for n in range(3, 8):
            d = complete_order(labels(n))
            for v in d.labels:
                assert is_complete_order(delete_vertex(d, v))
                cases += 1
        assert cases == 25


def test_c03_growth_cost(criterion):
    with criterion(3, "growing a k-vertex chain needs exactly k segments; k=7 refused"):
        for k in range(2, 7):
            c = chain(labels(k))
            for pos in range(k + 1):
                with pytest.raises(GrowRejected) as info:
                    grow(c, "x", pos, set())
                assert len(info.value.missing) == k
                full = {(u, "x") for u in labels(k)[:pos]} | {("x", u) for u in labels(k)[pos:]}
                assert len(full) == k
                assert grow(c, "x", pos, full).size == k + 1
        assert MAX_CHAIN_SIZE == 7
        with pytest.raises(ChainTooLarge):
            grow(chain(labels(7)), "x", 0, {("x", v) for v in labels(7)})


def test_c04_varadhan(criterion):
    with criterion(4, "Varadhan: baseline oscillates for 10,000 ticks, chain mode converges"):
        start = time.perf_counter()
        base = run(load_scenario("varadhan-baseline"), max_ticks=50)
        assert base.outcome is Outcome.OSCILLATION and base.exit_code == 3
        assert base.tick <= 50
        long = run(load_scenario("varadhan-baseline"), max_ticks=10_000, stop_on_oscillation=False)
        assert long.outcome is not Outcome.CONVERGED
        assert not long.trace.of_kind("converged")
        chained = run(load_scenario("varadhan-chain"), max_ticks=20)
        assert chained.outcome is Outcome.CONVERGED and chained.exit_code == 0
        assert chained.tick <= 20
        rejected = chained.trace.of_kind("chain_rejected")
        assert len(rejected) == 1
        assert rejected[0].actor == "b" and rejected[0].detail == "C(b,c,d) by c cycle a,b,c,a"
        assert time.perf_counter() - start < 1.0


def test_c05_griffin(criterion):
    with criterion(5, "Griffin: chain mode fails over to x-a-d at once, no loops; baseline oscillates"):
        scn = load_scenario("griffin-chain")
        r = run(scn)
        assert r.trace.dumps() == (GOLDEN / "griffin-chain.trace").read_text()
        (fail,) = [e for e in scn.events if e.kind.value == "fail_link"]
        learned = {}
        for rec in r.trace.records:
            if rec.tick >= fail.time and rec.kind == "view_change" and "link:b-d down" in rec.detail:
                learned.setdefault(rec.actor, rec.tick)
        picks = {rec.actor: rec for rec in r.trace.of_kind("route_selected") if rec.tick >= fail.time}
        for x in "cef":
            assert picks[x].detail == f"{x}-a-d"
            assert picks[x].tick - learned[x] <= 1
        assert not r.loops
        # replay the selections tick by tick and check forwarding each time
        hops: dict[str, str | None] = {}
        by_tick = itertools.groupby(r.trace.of_kind("route_selected"), key=lambda x: x.tick)
        for _, recs in by_tick:
            for rec in recs:
                path = rec.detail.split("-")
                hops[rec.actor] = path[1] if len(path) > 1 else None
            assert detect_loop(hops) is None
        base = run(load_scenario("griffin-baseline"))
        assert base.trace.dumps() == (GOLDEN / "griffin-baseline.trace").read_text()
        assert base.outcome is Outcome.OSCILLATION and base.tick > fail.time


def test_c06_message_cost(criterion):
    with criterion(6, "establishment costs 3(n-2) messages for n=3..7"):
        costs = [establish_chain(ChainProposal.of(labels(n)), {}).messages_sent for n in range(3, 8)]
        assert costs == [3, 6, 9, 12, 15]


def test_c07_temporal_ordering(criterion):
    with criterion(7, "timestamps: one stale report ignored, d ends with a up; untimed flaps"):
        timed = run(load_scenario("temporal-fig6"))
        assert timed.trace.dumps() == (GOLDEN / "temporal-fig6.trace").read_text()
        assert timed.views["d"]["node:a"] == "up"
        assert len(timed.trace.of_kind("ignored_stale")) == 1
        untimed = run(load_scenario("temporal-fig6-untimed"))
        assert untimed.trace.dumps() == (GOLDEN / "temporal-fig6-untimed.trace").read_text()
        assert len(untimed.trace.of_kind("view_change", "d")) >= 3


def test_c08_discovery_consistency(criterion):
    with criterion(8, "200 random acyclic digraphs: heights <= max-flow, chains complete, acyclic"):
        start = time.perf_counter()
        rng = random.Random(20240801)
        for _ in range(200):
            d = random_dag(rng.randint(3, 12), rng.uniform(0.15, 0.6), rng)
            for origin in d.labels:
                rep = build_report(d, origin)
                for v, c in rep.per_destination.items():
                    if c.kind is ClassKind.CHAIN:
                        assert c.height <= rep.arc_disjoint[v]
                for c in all_chains(rep.store):
                    assert is_complete_order(segment_digraph(c))
                rel = rep.store.relation
                assert find_cycle(Digraph.from_arcs(sorted({x for p in rel for x in p}), rel)) is None
        assert time.perf_counter() - start < 30.0


def test_c09_worked_example(criterion, capsys):
    with criterion(9, "nested example: s->d has height 3 and resolves into the nested structures"):
        assert main(["analyze", str(DATA / "nested.adj"), "--origin", "s"]) == 0
        header, row = capsys.readouterr().out.splitlines()
        assert dict(zip(header.split(), row.split()[1:]))["d"] == "3"
        store = discover(load_adjacency(str(DATA / "nested.adj")), "s")
        (top,) = [b for b in store.top_level() if b.kind is Kind.CHAIN]
        assert top.order == ("s", "e", "b", "d")
        ed = top.segment("e", "d")
        assert ed.kind is Kind.VARC
        ehg, gd = ed.parts
        assert ehg.order == ("e", "h", "g") and gd.kind is Kind.ARC
        assert ehg.segment("e", "g").waypoints == ("e", "f", "g")
        assert ehg.segment("h", "g").order == ("h", "i", "g")
        levels = {s.level for s in store.structures.values()}
        assert levels == {0, 1, 2, 3, 4}
        res = resolve(store, "C0:s,e,b,d")
        assert len(res) == 3
        assert res.shared == {("e", "f")}


def test_c10_determinism(criterion, tmp_path):
    with criterion(10, "every command is byte-identical across repeated runs"):
        commands = [
            ["analyze", str(DATA / "nested.adj"), "--all-pairs"],
            ["analyze", str(DATA / "nested.adj"), "--all-pairs", "--format", "csv"],
            ["verify", "--n-max", "7"],
            ["histogram", *sorted(str(p) for p in DATA.glob("*.adj"))],
            ["simulate", "--seed", "3", "--show-trace"],
        ] + [["simulate", p.stem, "--show-trace"] for p in sorted(DATA.glob("*.scn"))]
        for cmd in commands:
            outs = [subprocess.run([sys.executable, "-m", "chainrouting.cli", *cmd],
                                   capture_output=True, cwd=tmp_path)
                    for _ in range(2)]
            assert outs[0].stdout == outs[1].stdout and outs[0].stdout
            assert outs[0].returncode == outs[1].returncode
