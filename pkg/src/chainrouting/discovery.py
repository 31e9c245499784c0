"""Chain discovery over announcement digraphs and the per-origin report.

The pipeline is ``modified_bfs`` (one BFS from the origin that records
tree arcs, Varcs and a seed chain for every transitive arc), then
``post_combine`` (grow chains into taller ones, then nest chains inside
the Varcs and segments they abstract), then ``classify_destination`` for
every other vertex.  Nothing in here raises on a well-formed digraph:
structures that cannot be admitted become warnings on the store.
"""
from __future__ import annotations

import csv
import enum
import io
import itertools
from collections import Counter, deque
from dataclasses import dataclass, field

from .chains import (
    MAX_CHAIN_SIZE,
    Arc,
    Blueprint,
    ChainError,
    ChainStore,
    CycleRejected,
    Kind,
    arc,
    canonical_routes,
    chain,
    grow,
    path_varc,
    routes_disjoint,
    shrink,
    varc,
)
from .digraph import Digraph, DigraphError, Role, arc_disjoint_count, find_cycle


# ---- BFS ------------------------------------------------------------------

@dataclass
class BfsState:
    predecessor: dict[str, str | None]
    distance: dict[str, int | None]
    queue: deque[str] = field(default_factory=deque)

    @classmethod
    def start(cls, d: Digraph, origin: str) -> "BfsState":
        st = cls({v: None for v in d.labels}, {v: None for v in d.labels})
        st.distance[origin] = 0
        st.queue.append(origin)
        return st

    def tree_path(self, top: str, bottom: str) -> list[str]:
        """Vertices from ``top`` down to ``bottom`` along predecessor links."""
        path = [bottom]
        while path[-1] != top:
            p = self.predecessor[path[-1]]
            if p is None:
                raise DigraphError(f"{top!r} is not an ancestor of {bottom!r}")
            path.append(p)
        return path[::-1]

    def ancestors(self, v: str) -> list[str]:
        """Proper ancestors of ``v``, nearest first."""
        out = []
        p = self.predecessor[v]
        while p is not None:
            out.append(p)
            p = self.predecessor[p]
        return out


@dataclass(frozen=True)
class TransitiveArc:
    """An arc found by BFS towards an already-visited vertex."""

    tail: str
    head: str


def _bfs(d: Digraph, origin: str) -> tuple[BfsState, list[Blueprint], list[TransitiveArc]]:
    st = BfsState.start(d, origin)
    tree: list[Blueprint] = []
    start: dict[str, str] = {}  # first vertex of the tree structure ending at v
    events: list[TransitiveArc] = []
    while st.queue:
        x = st.queue.popleft()
        outs = d.successors(x)
        for y in outs:
            if st.distance[y] is None:
                st.distance[y] = st.distance[x] + 1
                st.predecessor[y] = x
                st.queue.append(y)
                if len(outs) == 1 and x != origin:
                    # x only passes traffic on: extend the structure reaching x
                    s = start[x]
                    tree.append(path_varc(*st.tree_path(s, y)))
                    start[y] = s
                else:
                    tree.append(arc(x, y))
                    start[y] = x
            elif st.predecessor[y] is None:
                continue  # arc back to the origin
            else:
                events.append(TransitiveArc(x, y))
    return st, tree, events


def _tree_segment(st: BfsState, top: str, bottom: str) -> Blueprint:
    return path_varc(*st.tree_path(top, bottom))


def seed_chain(d: Digraph, st: BfsState, t: TransitiveArc) -> Blueprint | None:
    """The 3-vertex chain a transitive arc ``xy`` implies, or None on a cycle.

    If some ancestor ``w`` of ``x`` has literal arcs to both ``x`` and ``y``
    the chain is ``C(w, x, y)`` over arcs, grown towards the root with any
    further such ancestors.  Otherwise the chain hangs from the lowest
    common ancestor ``z`` of ``x`` and ``y``: ``C(z, w, y)`` where ``w`` is
    the first vertex below ``z`` towards ``x`` that is not a Varc interior.
    """
    x, y = t.tail, t.head
    up_x = st.ancestors(x)
    if y in up_x:
        return None
    both = [w for w in up_x if d.has_arc(w, x) and d.has_arc(w, y)]
    if both:
        c = chain((both[0], x, y))
        for w in both[1:]:
            if all(d.has_arc(w, v) for v in c.order):
                c = grow(c, w, 0, {(w, v): arc(w, v) for v in c.order})
        return c
    up_y = set(st.ancestors(y))
    if x in up_y:
        z = x
        down = st.tree_path(x, y)[1:-1]
    else:
        z = next(a for a in up_x if a in up_y)
        down = st.tree_path(z, x)[1:]
    w = next((v for v in down if v == down[-1] or d.out_degree(v) != 1), down[0])
    if z == x:
        zy = arc(x, y)
        wy = _tree_segment(st, w, y)
    else:
        zy = _tree_segment(st, z, y)
        wy = path_varc(*st.tree_path(w, x), y)
    return chain((z, w, y), {(z, w): _tree_segment(st, z, w), (w, y): wy, (z, y): zy})


def modified_bfs(d: Digraph, origin: str, max_chain_size: int = MAX_CHAIN_SIZE) -> ChainStore:
    """Run the modified BFS from ``origin`` and store what it finds.

    Level 0 holds the BFS tree structures (arcs and Varcs) and one seed
    chain per usable transitive arc.
    """
    if d.role is Role.DESTINATION:
        raise DigraphError("discovery runs on an announcement digraph, got a destination digraph")
    d.index(origin)
    st, tree, events = _bfs(d, origin)
    store = ChainStore(max_chain_size, d)
    seeds: dict[str, Blueprint] = {}
    for t in events:
        try:
            c = seed_chain(d, st, t)
        except ChainError as exc:
            store.warnings.append(f"transitive arc {t.tail}{t.head}: {exc}")
            continue
        if c is None:
            store.warnings.append(f"transitive arc {t.tail}{t.head} closes a cycle; skipped")
            continue
        if not routes_disjoint(canonical_routes(c)):
            store.warnings.append(f"chain {c.key} from {t.tail}{t.head} is not arc-disjoint; skipped")
            continue
        seeds.setdefault(c.key, c)
    _register_level0(store, list(seeds.values()), tree)
    return store


def _register_level0(store: ChainStore, chains: list[Blueprint], tree: list[Blueprint]) -> None:
    for c in sorted(chains, key=lambda c: (-c.height, c.order)):
        _try_register(store, c)
    for bp in tree:
        _try_register(store, bp)


def _try_register(store: ChainStore, bp: Blueprint) -> bool:
    try:
        store.register_blueprint(bp, 0)
    except CycleRejected as exc:
        store.warnings.append(f"{bp.structure_id(0)} rejected: cycle {' -> '.join(exc.cycle)}")
        return False
    except ChainError as exc:
        store.warnings.append(f"{bp.structure_id(0)} rejected: {exc}")
        return False
    return True


# ---- combining ------------------------------------------------------------

def _segment_options(d: Digraph, chains: list[Blueprint], tree: list[Blueprint]) -> dict[Arc, Blueprint]:
    """Best known structure for each vertex pair: a literal arc, else the
    shortest registered Varc or segment (ties by waypoint key)."""
    cands: dict[Arc, list[Blueprint]] = {}
    for bp in tree:
        cands.setdefault((bp.tail, bp.head), []).append(bp)
    for c in chains:
        for pair, seg in c.segments():
            cands.setdefault(pair, []).append(seg)
    for u, v in d.arc_list():
        cands.setdefault((u, v), []).append(arc(u, v))

    def rank(bp: Blueprint) -> tuple:
        return (bp.kind is not Kind.ARC, len(bp.primary_route()), bp.key)

    return {pair: min(opts, key=rank) for pair, opts in cands.items()}


def _is_subsequence(short: tuple[str, ...], long: tuple[str, ...]) -> bool:
    it = iter(long)
    return all(v in it for v in short)


def _relation_cycle(chains: list[Blueprint]) -> list[str] | None:
    pairs = sorted({p for c in chains for p in c.relation()})
    nodes = sorted({v for p in pairs for v in p})
    if not pairs:
        return None
    return find_cycle(Digraph.from_arcs(nodes, pairs))


def _grow_once(d: Digraph, chains: list[Blueprint], tree: list[Blueprint],
               max_size: int) -> list[Blueprint] | None:
    options = _segment_options(d, chains, tree)
    for c in sorted(chains, key=lambda c: (-c.height, c.order)):
        if c.size >= max_size:
            continue
        for v in d.labels:
            if v in c.order:
                continue
            for pos in range(c.size + 1):
                try:
                    g = grow(c, v, pos, options, max_size)
                except ChainError:
                    continue
                if not routes_disjoint(canonical_routes(g)):
                    continue
                rest = [o for o in chains if not _is_subsequence(o.order, g.order)]
                if _relation_cycle(rest + [g]) is not None:
                    continue
                return rest + [g]
    return None


def _nest(bp: Blueprint, cands: list[Blueprint], outer: frozenset[str]) -> Blueprint:
    """Replace segments (or runs of Varc parts) that some candidate chain
    abstracts by that chain.

    ``cands`` is ranked (taller first); a chain only absorbs candidates
    ranked after it, so two chains can never end up inside each other.
    """
    if bp.kind is Kind.ARC:
        return bp
    if bp.kind is Kind.CHAIN:
        keys = [c.key for c in cands]
        if bp.key in keys:
            cands = cands[keys.index(bp.key) + 1:]
        inner = outer | {bp.key}
        segs = {pair: _nest_segment(seg, cands, inner) for pair, seg in bp.segments()}
        return chain(bp.order, segs)
    return _nest_segment(bp, cands, outer)


def _match(route: list[Arc], tail: str, head: str, cands: list[Blueprint],
           outer: frozenset[str]) -> Blueprint | None:
    for c in cands:
        if c.key in outer or (c.tail, c.head) != (tail, head):
            continue
        if c.primary_route() == route:
            return c
    return None


def _nest_segment(seg: Blueprint, cands: list[Blueprint], outer: frozenset[str]) -> Blueprint:
    hit = _match(seg.primary_route(), seg.tail, seg.head, cands, outer)
    if hit is not None:
        return _nest(hit, cands, outer)
    if seg.kind is Kind.CHAIN:
        return _nest(seg, cands, outer)
    if seg.kind is Kind.ARC:
        return seg
    parts = list(seg.parts)
    out: list[Blueprint] = []
    i = 0
    while i < len(parts):
        # longest run of parts starting at i that a candidate abstracts
        for j in range(len(parts), i, -1):
            if i == 0 and j == len(parts):
                continue
            run = parts[i:j]
            route = [a for p in run for a in p.primary_route()]
            hit = _match(route, run[0].tail, run[-1].head, cands, outer)
            if hit is not None:
                out.append(_nest(hit, cands, outer))
                i = j
                break
        else:
            out.append(_nest(parts[i], cands, outer) if parts[i].kind is Kind.CHAIN else parts[i])
            i += 1
    return varc(*out)


def post_combine(store: ChainStore, d: Digraph) -> ChainStore:
    """Grow chains to a fixpoint, nest chains inside the structures they
    abstract, and rebuild the store with the surviving top-level chains."""
    top = store.top_level()
    chains = [bp for bp in top if bp.kind is Kind.CHAIN]
    tree = [bp for bp in top if bp.kind is not Kind.CHAIN]
    # plain chains again: nesting is recomputed from scratch
    chains = [_flatten(c) for c in chains]
    seen: set[tuple[str, ...]] = set()
    while True:
        nxt = _grow_once(d, chains, tree, store.max_chain_size)
        if nxt is None:
            break
        key = tuple(sorted(c.key for c in nxt))
        if key in seen:  # defensive: growth only ever adds vertices
            break
        seen.add(key)
        chains = nxt

    cands = sorted(chains, key=lambda c: (-c.height, c.order))
    nested = [_nest(c, cands, frozenset()) for c in cands]
    inner = {n.key for c in nested for n in c.walk() if n is not c and n.kind is Kind.CHAIN}
    roots = [c for c in nested if c.key not in inner]

    out = ChainStore(store.max_chain_size, store.digraph or d)
    out.warnings = list(store.warnings)
    _register_level0(out, roots, tree)
    return out


def _flatten(c: Blueprint) -> Blueprint:
    """The same chain with nested chains replaced by their primary routes."""
    segs = {}
    for pair, seg in c.segments():
        if seg.kind is Kind.ARC:
            segs[pair] = seg
        else:
            route = seg.primary_route()
            segs[pair] = varc(*(arc(u, v) for u, v in route))
    return chain(c.order, segs)


# ---- classification -------------------------------------------------------

class ClassKind(enum.Enum):
    CHAIN = "chain"
    ARC_ONLY = "arc"
    BRIDGE = "bridge"
    UNREACHABLE = "unreachable"


@dataclass(frozen=True)
class ReachabilityClass:
    kind: ClassKind
    height: int | None = None

    @classmethod
    def chain_height(cls, h: int) -> "ReachabilityClass":
        if h < 1:
            raise ValueError("chain height must be positive")
        return cls(ClassKind.CHAIN, h)

    @property
    def code(self) -> str:
        """Table symbol: the height, ``A``, ``B`` or ``.`` for unreachable."""
        if self.kind is ClassKind.CHAIN:
            return str(self.height)
        return {ClassKind.ARC_ONLY: "A", ClassKind.BRIDGE: "B", ClassKind.UNREACHABLE: "."}[self.kind]

    @classmethod
    def from_code(cls, code: str) -> "ReachabilityClass":
        named = {"A": ClassKind.ARC_ONLY, "B": ClassKind.BRIDGE, ".": ClassKind.UNREACHABLE}
        if code in named:
            return cls(named[code])
        return cls.chain_height(int(code))


ARC_ONLY = ReachabilityClass(ClassKind.ARC_ONLY)
BRIDGE = ReachabilityClass(ClassKind.BRIDGE)
UNREACHABLE = ReachabilityClass(ClassKind.UNREACHABLE)


@dataclass(frozen=True)
class Link:
    tail: str
    head: str
    height: int
    via: str


def all_chains(store: ChainStore) -> list[Blueprint]:
    """Every chain in the store, nested ones included, deduplicated by key."""
    found: dict[str, Blueprint] = {}
    for bp in store.top_level():
        for node in bp.walk():
            if node.kind is Kind.CHAIN:
                found.setdefault(node.key, node)
    return [found[k] for k in sorted(found)]


def structure_links(store: ChainStore) -> list[Link]:
    """Hops the stored structures offer, each with the diversity it carries.

    Every ordered pair of a chain gives a link whose height is the length
    of that sub-chain (1 if its canonical routes are not arc-disjoint);
    tree arcs and Varcs give height-1 links.
    """
    links: list[Link] = []
    for c in all_chains(store):
        for i, j in itertools.combinations(range(c.size), 2):
            h = j - i
            if h >= 2:
                sub = c
                for v in c.order[:i] + c.order[j + 1:]:
                    sub = shrink(sub, v)
                if not routes_disjoint(canonical_routes(sub)):
                    h = 1
            links.append(Link(c.order[i], c.order[j], h, c.key))
    for bp in store.top_level():
        if bp.kind is not Kind.CHAIN:
            links.append(Link(bp.tail, bp.head, 1, bp.key))
    return links


def _reach(links: list[Link], src: str, min_height: int) -> set[str]:
    adj: dict[str, list[str]] = {}
    for ln in links:
        if ln.height >= min_height:
            adj.setdefault(ln.tail, []).append(ln.head)
    seen = {src}
    todo = [src]
    while todo:
        u = todo.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def _reverse_reach(links: list[Link], dst: str) -> set[str]:
    return _reach([Link(ln.head, ln.tail, ln.height, ln.via) for ln in links], dst, 1)


def widest_height(links: list[Link], origin: str, dest: str) -> int:
    """Largest h such that ``dest`` is reachable over links of height >= h."""
    best = 0
    for h in sorted({ln.height for ln in links}):
        if dest in _reach(links, origin, h):
            best = h
    return best


def classify_destination(store: ChainStore, d: Digraph, origin: str, dest: str,
                         warnings: list[str] | None = None,
                         links: list[Link] | None = None) -> ReachabilityClass:
    if origin == dest:
        raise DigraphError("origin and destination must differ")
    warnings = warnings if warnings is not None else []
    links = links if links is not None else structure_links(store)
    f = arc_disjoint_count(d, origin, dest)
    if f == 0:
        return UNREACHABLE
    b = widest_height(links, origin, dest)
    if b >= 2:
        if b > f:
            warnings.append(f"{origin}->{dest}: structure height {b} exceeds {f} disjoint paths; clamped")
        return ReachabilityClass.chain_height(min(b, f))
    if f >= 2:
        warnings.append(f"{origin}->{dest}: {f} disjoint paths exist but no chain captures them")
    if f == 1 and b == 1:
        fwd = _reach(links, origin, 1)
        back = _reverse_reach(links, dest)
        if any(ln.height >= 2 and ln.tail in fwd and ln.head in back for ln in links):
            return BRIDGE
    members = {v for c in all_chains(store) for v in c.order}
    if dest in members:
        return ReachabilityClass.chain_height(1)
    return ARC_ONLY


# ---- report ---------------------------------------------------------------

@dataclass
class DiscoveryReport:
    origin: str
    labels: tuple[str, ...]
    per_destination: dict[str, ReachabilityClass]
    histogram: dict[int, int]
    arc_disjoint: dict[str, int]
    store: ChainStore
    warnings: list[str] = field(default_factory=list)

    @property
    def arc_only_count(self) -> int:
        return sum(1 for c in self.per_destination.values() if c.kind is ClassKind.ARC_ONLY)


def discover(d: Digraph, origin: str, max_chain_size: int = MAX_CHAIN_SIZE) -> ChainStore:
    """``modified_bfs`` followed by ``post_combine``."""
    return post_combine(modified_bfs(d, origin, max_chain_size), d)


def build_report(d: Digraph, origin: str, max_chain_size: int = MAX_CHAIN_SIZE) -> DiscoveryReport:
    if d.role is Role.DESTINATION:
        d = d.converse()
    store = discover(d, origin, max_chain_size)
    warnings = list(store.warnings)
    links = structure_links(store)
    per: dict[str, ReachabilityClass] = {}
    flows: dict[str, int] = {}
    for v in d.labels:
        if v == origin:
            continue
        per[v] = classify_destination(store, d, origin, v, warnings, links)
        flows[v] = arc_disjoint_count(d, origin, v)
    hist = Counter(c.height for c in per.values() if c.kind is ClassKind.CHAIN)
    return DiscoveryReport(origin, d.labels, per, dict(sorted(hist.items())), flows, store, warnings)


def build_all_reports(d: Digraph, max_chain_size: int = MAX_CHAIN_SIZE) -> list[DiscoveryReport]:
    return [build_report(d, v, max_chain_size) for v in d.labels]


# ---- rendering ------------------------------------------------------------

def render_table(reports: list[DiscoveryReport]) -> str:
    """Aligned matrix: one row per origin, one column per vertex."""
    if not reports:
        return ""
    labels = reports[0].labels
    rows = [[""] + list(labels)]
    for r in reports:
        rows.append([r.origin] + [
            "-" if v == r.origin else r.per_destination[v].code for v in labels])
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.rjust(w) if i else cell.ljust(w) for i, (cell, w) in
                       enumerate(zip(row, widths))).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


CSV_HEADER = ["origin", "dest", "class", "height", "oracle_disjoint"]


def render_csv(reports: list[DiscoveryReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        for v in r.labels:
            if v == r.origin:
                continue
            c = r.per_destination[v]
            w.writerow([r.origin, v, c.kind.value, c.height if c.height is not None else "",
                        r.arc_disjoint[v]])
    return buf.getvalue()


def parse_csv(text: str) -> dict[tuple[str, str], ReachabilityClass]:
    """Read back ``render_csv`` output as (origin, dest) -> class."""
    out = {}
    for row in csv.DictReader(io.StringIO(text)):
        kind = ClassKind(row["class"])
        h = int(row["height"]) if row["height"] else None
        out[(row["origin"], row["dest"])] = ReachabilityClass(kind, h)
    return out


def render_warnings(reports: list[DiscoveryReport]) -> str:
    return "".join(f"warning: [{r.origin}] {w}\n" for r in reports for w in r.warnings)
