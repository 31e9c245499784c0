"""Exhaustive checks of the complete-order counting laws.

For every size ``n`` in range the checks build the complete order
``v1 < ... < vn`` and compare closed forms against independent
computations: the max-flow oracle, brute-force path selection, and
actual ``shrink`` / ``grow`` calls.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .chains import (
    MAX_CHAIN_SIZE,
    ChainTooLarge,
    GrowRejected,
    canonical_disjoint_paths,
    chain,
    chain_metrics,
    is_complete_order,
    segment_digraph,
    shrink,
    grow,
)
from .digraph import arc_disjoint_count, complete_order, delete_vertex

BRUTE_FORCE_MAX = 8

LAWS = (
    ("unique_ends", "one transmitter (in-degree 0) and one receiver (out-degree 0)"),
    ("disjoint_paths", "n-1 arc-disjoint transmitter->receiver paths (max-flow oracle)"),
    ("used_arcs", "the n-1 paths use 2n-3 arcs, and no fewer (brute force, n <= 8)"),
    ("unused_arcs", "(n-2)(n-3)/2 arcs stay unused"),
    ("vertex_deletion", "deleting any vertex leaves a complete order"),
    ("growth_cost", "adding a vertex to an n-vertex order needs exactly n new arcs"),
    ("growth_minimum", "growth always needs at least 2 new arcs"),
)


def labels(n: int) -> list[str]:
    return [f"v{i}" for i in range(1, n + 1)]


def min_arcs_for_max_disjoint(n: int) -> int:
    """Fewest arcs any family of n-1 arc-disjoint v1->vn paths can use in
    the complete order on n vertices, by branch-and-bound enumeration."""
    if n == 2:
        return 1
    # every path must leave v1 by a different one of its n-1 out-arcs
    firsts = list(range(1, n))
    by_first: dict[int, list[list[tuple[int, int]]]] = {}
    for f in firsts:
        opts = []
        inner = [k for k in range(f + 1, n - 1)]
        for r in range(len(inner) + 1):
            for mid in itertools.combinations(inner, r):
                verts = [0, f, *mid, n - 1] if f != n - 1 else [0, n - 1]
                opts.append(list(zip(verts, verts[1:])))
        opts.sort(key=len)
        by_first[f] = opts
    best = [n * n]

    def search(i: int, used: set[tuple[int, int]], total: int) -> None:
        if i == len(firsts):
            best[0] = min(best[0], total)
            return
        remaining = sum(1 if f == n - 1 else 2 for f in firsts[i:])
        if total + remaining >= best[0]:
            return
        for p in by_first[firsts[i]]:
            if used.isdisjoint(p):
                search(i + 1, used | set(p), total + len(p))

    search(0, set(), 0)
    return best[0]


@dataclass
class LawRow:
    n: int
    height: int
    arcs: int
    u: int
    r: int
    results: dict[str, bool | None] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v is not False for v in self.results.values())


@dataclass
class VerifyReport:
    rows: list[LawRow]
    notes: list[str]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def check_size(n: int) -> LawRow:
    m = chain_metrics(n)
    labs = labels(n)
    d = complete_order(labs)
    c = chain(labs)
    res: dict[str, bool | None] = {}

    sources = [v for v in labs if d.in_degree(v) == 0]
    sinks = [v for v in labs if d.out_degree(v) == 0]
    res["unique_ends"] = sources == [labs[0]] and sinks == [labs[-1]] and is_complete_order(d)

    canon = canonical_disjoint_paths(c)
    flow = arc_disjoint_count(d, labs[0], labs[-1])
    res["disjoint_paths"] = flow == n - 1 == len(canon) == m.height

    used = len(canon.used_arcs())
    ok = used == 2 * n - 3 == m.u
    if n <= BRUTE_FORCE_MAX:
        ok = ok and min_arcs_for_max_disjoint(n) == m.u
    res["used_arcs"] = ok

    res["unused_arcs"] = len(d.arcs) - used == m.r == (n - 2) * (n - 3) // 2

    if n >= 3:
        res["vertex_deletion"] = all(
            is_complete_order(delete_vertex(d, v)) and
            is_complete_order(segment_digraph(shrink(c, v))) for v in labs)
    else:
        res["vertex_deletion"] = None

    new = "x"
    counts = set()
    for pos in range(n + 1):
        try:
            grow(c, new, pos, set(), max_size=n + 1)
        except GrowRejected as exc:
            counts.add(len(exc.missing))
        full = {(u, new) for u in labs[:pos]} | {(new, u) for u in labs[pos:]}
        g = grow(c, new, pos, full, max_size=n + 1)
        counts.add(len(g.parts) - len(c.parts))
    res["growth_cost"] = counts == {n}
    res["growth_minimum"] = min(counts) >= 2
    return LawRow(n, m.height, m.arcs_total, m.u, m.r, res)


def verify_laws(n_max: int) -> VerifyReport:
    if not 2 <= n_max <= 10:
        raise ValueError("n_max must lie in 2..10")
    rows = [check_size(n) for n in range(2, n_max + 1)]
    notes = []
    try:
        grow(chain(labels(MAX_CHAIN_SIZE)), "x", 0,
             {("x", v) for v in labels(MAX_CHAIN_SIZE)})
        notes.append(f"FAIL: growing a {MAX_CHAIN_SIZE}-vertex chain was not refused")
    except ChainTooLarge:
        notes.append(f"growing a {MAX_CHAIN_SIZE}-vertex chain is refused (maximum chain size)")
    m8 = chain_metrics(8)
    notes.append(f"n=8 (closed form, not enforced): u={m8.u} r={m8.r}; "
                 "beyond 7 vertices unused arcs outnumber used ones")
    if n_max > BRUTE_FORCE_MAX:
        notes.append(f"brute-force arc minimum checked for n <= {BRUTE_FORCE_MAX} only")
    return VerifyReport(rows, notes)


def render_verify(rep: VerifyReport) -> str:
    keys = [k for k, _ in LAWS]
    head = ["n", "height", "arcs", "u", "r", *keys]
    rows = [head]
    for r in rep.rows:
        cells = [str(r.n), str(r.height), str(r.arcs), str(r.u), str(r.r)]
        for k in keys:
            v = r.results.get(k)
            cells.append("n/a" if v is None else ("pass" if v else "FAIL"))
        rows.append(cells)
    widths = [max(len(row[i]) for row in rows) for i in range(len(head))]
    out = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in rows]
    out.append("")
    out += [f"{k}: {desc}" for k, desc in LAWS]
    out.append("")
    out += [f"note: {n}" for n in rep.notes]
    out.append("all laws pass" if rep.passed else "SOME LAWS FAIL")
    return "\n".join(out) + "\n"
