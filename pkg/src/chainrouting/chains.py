"""Arcs, Varcs and chains; the leveled chain store; chain metrics.

Two views of the same objects live here:

* :class:`Blueprint` is a level-free, immutable tree (an arc, a Varc over a
  sequence of parts, or a chain whose segments are blueprints).  Discovery,
  the rules layer and the simulator build and compare blueprints.
* :class:`Structure` is the leveled record a :class:`ChainStore` holds.
  ``Blueprint.materialize(level)`` expands a blueprint into structures,
  children one level below their parent.
"""
from __future__ import annotations

import enum
import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .digraph import Digraph, DigraphError, PathSet, find_cycle, is_acyclic

MAX_CHAIN_SIZE = 7

Arc = tuple[str, str]


class Kind(enum.Enum):
    ARC = "A"
    VARC = "V"
    CHAIN = "C"


class ChainError(ValueError):
    pass


class ContractError(ChainError):
    """A precondition of the called operation does not hold."""


class IntegrityError(ChainError):
    """A stored structure references a child that is not registered."""


class RegistrationError(ChainError):
    pass


class DuplicateStructure(RegistrationError):
    pass


class MissingChild(RegistrationError):
    pass


class ChainTooLarge(RegistrationError):
    pass


class MalformedStructure(RegistrationError):
    pass


class CycleRejected(RegistrationError):
    """Admitting the structure would make the store's relation cyclic."""

    def __init__(self, structure_id: str, cycle: list[str]) -> None:
        super().__init__(f"{structure_id} closes cycle {' -> '.join(cycle)}")
        self.structure_id = structure_id
        self.cycle = cycle


class GrowRejected(ChainError):
    def __init__(self, missing: list[Arc]) -> None:
        listing = ", ".join(f"{u}{v}" for u, v in missing)
        super().__init__(f"missing segments: {listing}")
        self.missing = missing


# ---- level-free blueprints ------------------------------------------------

@dataclass(frozen=True)
class Blueprint:
    kind: Kind
    tail: str
    head: str
    parts: tuple["Blueprint", ...] = ()
    order: tuple[str, ...] = ()

    # constructors --------------------------------------------------------

    def __post_init__(self) -> None:
        if self.tail == self.head:
            raise MalformedStructure(f"structure from {self.tail!r} to itself")
        if self.kind is Kind.ARC and self.parts:
            raise MalformedStructure("an arc cannot contain other structures")
        if self.kind is Kind.VARC:
            if not self.parts:
                raise MalformedStructure("empty Varc")
            at = self.tail
            for p in self.parts:
                if p.tail != at:
                    raise MalformedStructure(f"Varc parts are not a path at {at!r}")
                at = p.head
            if at != self.head:
                raise MalformedStructure("Varc does not end at its head")
            pts = self.waypoints
            if len(set(pts)) != len(pts):
                raise MalformedStructure(f"Varc revisits a vertex: {','.join(pts)}")
        if self.kind is Kind.CHAIN:
            k = len(self.order)
            if k < 2 or len(set(self.order)) != k:
                raise MalformedStructure("chain needs >= 2 distinct vertices")
            if (self.order[0], self.order[-1]) != (self.tail, self.head):
                raise MalformedStructure("chain endpoints disagree with its order")
            want = list(itertools.combinations(self.order, 2))
            got = [(p.tail, p.head) for p in self.parts]
            if got != want:
                raise MalformedStructure(
                    f"chain {','.join(self.order)} needs segments {want}, got {got}")

    # identity ------------------------------------------------------------

    @property
    def waypoints(self) -> tuple[str, ...]:
        """Vertices visited at this structure's own level of abstraction."""
        if self.kind is Kind.CHAIN:
            return self.order
        if self.kind is Kind.ARC:
            return (self.tail, self.head)
        return (self.tail,) + tuple(p.head for p in self.parts)

    @property
    def key(self) -> str:
        """Content-derived identity (level-free part of a structure id)."""
        return ",".join(self.waypoints)

    def structure_id(self, level: int) -> str:
        return f"{self.kind.value}{level}:{self.key}"

    @property
    def size(self) -> int:
        return len(self.order)

    @property
    def height(self) -> int:
        return len(self.order) - 1

    def segment(self, u: str, v: str) -> "Blueprint":
        if self.kind is not Kind.CHAIN:
            raise ContractError("only chains have segments")
        i, j = self.order.index(u), self.order.index(v)
        if i >= j:
            raise ContractError(f"{u}{v} is not a segment of {self.key}")
        return self.parts[_pair_index(len(self.order), i, j)]

    def segments(self) -> Iterator[tuple[Arc, "Blueprint"]]:
        for p in self.parts:
            yield (p.tail, p.head), p

    # routing -------------------------------------------------------------

    def primary_route(self) -> list[Arc]:
        """Concrete arcs of the structure's default path tail -> head.

        A chain used as a single segment routes over its direct segment.
        """
        if self.kind is Kind.ARC:
            return [(self.tail, self.head)]
        if self.kind is Kind.VARC:
            return [a for p in self.parts for a in p.primary_route()]
        return self.parts[_pair_index(len(self.order), 0, len(self.order) - 1)].primary_route()

    def relation(self) -> set[Arc]:
        """Ordered vertex pairs this structure imposes (Varcs and chains)."""
        pairs: set[Arc] = set()
        if self.kind is not Kind.ARC:
            pairs.update(itertools.combinations(self.waypoints, 2))
        for p in self.parts:
            pairs |= p.relation()
        return pairs

    def walk(self) -> Iterator["Blueprint"]:
        yield self
        for p in self.parts:
            yield from p.walk()

    def materialize(self, level: int = 0) -> list["Structure"]:
        """Leveled structures for this tree, root first, children below."""
        out = [Structure(
            kind=self.kind,
            id=self.structure_id(level),
            level=level,
            tail=self.tail,
            head=self.head,
            children=tuple(p.structure_id(level + 1) for p in self.parts),
            vertex_order=self.order,
        )]
        for p in self.parts:
            out.extend(p.materialize(level + 1))
        return out


def _pair_index(k: int, i: int, j: int) -> int:
    # position of (i, j) in itertools.combinations(range(k), 2)
    return i * (2 * k - i - 1) // 2 + (j - i - 1)


def arc(u: str, v: str) -> Blueprint:
    return Blueprint(Kind.ARC, u, v)


def varc(*parts: Blueprint) -> Blueprint:
    """A Varc over ``parts``; a single part is returned unchanged."""
    if len(parts) == 1:
        return parts[0]
    return Blueprint(Kind.VARC, parts[0].tail, parts[-1].head, tuple(parts))


def path_varc(*vertices: str) -> Blueprint:
    """An arc, or a Varc of plain arcs, along a vertex path."""
    return varc(*(arc(u, v) for u, v in zip(vertices, vertices[1:])))


def chain(
    order: Sequence[str],
    segments: Mapping[Arc, Blueprint] | None = None,
) -> Blueprint:
    """Chain over ``order``; segments not given default to plain arcs."""
    order = tuple(order)
    segments = segments or {}
    parts = tuple(segments.get((u, v)) or arc(u, v) for u, v in itertools.combinations(order, 2))
    return Blueprint(Kind.CHAIN, order[0], order[-1], parts, order)


# ---- leveled records ------------------------------------------------------

@dataclass(frozen=True)
class Structure:
    kind: Kind
    id: str
    level: int
    tail: str
    head: str
    children: tuple[str, ...] = ()
    vertex_order: tuple[str, ...] = ()

    @property
    def endpoints(self) -> Arc:
        return (self.tail, self.head)

    def to_line(self) -> str:
        fields = [str(self.level), self.kind.name, self.id, self.tail, self.head, *self.children]
        if self.kind is Kind.CHAIN:
            fields += ["ORDER", ",".join(self.vertex_order)]
        return " ".join(fields)

    @classmethod
    def from_line(cls, line: str) -> "Structure":
        fields = line.split()
        order: tuple[str, ...] = ()
        if "ORDER" in fields:
            k = fields.index("ORDER")
            order = tuple(fields[k + 1].split(","))
            fields = fields[:k]
        level, kind, sid, tail, head, *children = fields
        return cls(Kind[kind], sid, int(level), tail, head, tuple(children), order)


@dataclass(frozen=True)
class ChainMetrics:
    n: int
    height: int
    arcs_total: int
    u: int
    r: int


def chain_metrics(k: int) -> ChainMetrics:
    """Closed-form counts for a complete order on ``k`` vertices."""
    if k < 2:
        raise ChainError(f"a chain needs at least 2 vertices, got {k}")
    return ChainMetrics(n=k, height=k - 1, arcs_total=k * (k - 1) // 2,
                        u=2 * k - 3, r=(k - 2) * (k - 3) // 2)


# ---- complete orders ------------------------------------------------------

def is_complete_order(d: Digraph) -> bool:
    n = d.n
    return len(d.arcs) == n * (n - 1) // 2 and is_acyclic(d)


def transmitter_receiver(d: Digraph) -> tuple[str, str]:
    if not is_complete_order(d):
        raise ContractError("digraph is not a complete order")
    sources = [v for v in d.labels if d.in_degree(v) == 0]
    sinks = [v for v in d.labels if d.out_degree(v) == 0]
    return sources[0], sinks[0]


def segment_digraph(c: Blueprint | Structure) -> Digraph:
    """The abstract digraph of a chain: its vertices and segments."""
    order = c.order if isinstance(c, Blueprint) else c.vertex_order
    return Digraph.from_arcs(order, itertools.combinations(order, 2))


def _order_of(c: Blueprint | Structure) -> tuple[str, ...]:
    if c.kind is not Kind.CHAIN:
        raise ContractError(f"{c.kind.name} is not a chain")
    return c.order if isinstance(c, Blueprint) else c.vertex_order


def canonical_disjoint_paths(c: Blueprint | Structure) -> PathSet:
    """The n-1 segment-disjoint transmitter->receiver paths of a chain.

    The direct segment first, then one two-segment path per intermediate
    vertex in chain order.
    """
    order = _order_of(c)
    first, last = order[0], order[-1]
    paths = [(first, last)] + [(first, v, last) for v in order[1:-1]]
    return PathSet(tuple(paths))


def chains_conflict(c1: Blueprint | Structure, c2: Blueprint | Structure) -> bool:
    """True iff some shared vertex pair is ordered oppositely."""
    pos1 = {v: i for i, v in enumerate(_order_of(c1))}
    pos2 = {v: i for i, v in enumerate(_order_of(c2))}
    shared = [v for v in pos1 if v in pos2]
    for a, b in itertools.combinations(shared, 2):
        if (pos1[a] < pos1[b]) != (pos2[a] < pos2[b]):
            return True
    return False


def shrink(c: Blueprint, v: str) -> Blueprint:
    """``c - v``; the surviving segments keep their structures."""
    order = _order_of(c)
    if v not in order:
        raise ContractError(f"{v!r} is not in chain {c.key}")
    if len(order) < 3:
        raise ContractError("shrinking would leave fewer than 2 vertices")
    keep = tuple(x for x in order if x != v)
    return chain(keep, {pair: seg for pair, seg in c.segments() if v not in pair})


def grow(
    c: Blueprint,
    v: str,
    position: int,
    available: Mapping[Arc, Blueprint] | Iterable[Arc],
    max_size: int = MAX_CHAIN_SIZE,
) -> Blueprint:
    """Insert ``v`` at ``position`` of the chain order.

    Needs a segment between ``v`` and every current vertex (``k`` new
    segments for a ``k``-vertex chain).  ``available`` maps pairs to the
    structure realising them, or is a plain set of arcs.
    """
    order = _order_of(c)
    if v in order:
        raise ContractError(f"{v!r} already in chain {c.key}")
    if not 0 <= position <= len(order):
        raise ContractError(f"position {position} outside 0..{len(order)}")
    if len(order) + 1 > max_size:
        raise ChainTooLarge(f"chain would exceed {max_size} vertices")
    if not isinstance(available, Mapping):
        available = {pair: arc(*pair) for pair in available}
    new_order = order[:position] + (v,) + order[position:]
    needed = [(x, v) for x in order[:position]] + [(v, x) for x in order[position:]]
    missing = [p for p in needed if p not in available]
    if missing:
        raise GrowRejected(missing)
    segs = dict(c.segments())
    segs.update({p: available[p] for p in needed})
    return chain(new_order, segs)


# ---- the store ------------------------------------------------------------

@dataclass(frozen=True)
class Resolution:
    """Concrete arc sequences of a structure.

    ``shared`` lists arcs that back more than one segment of some chain in
    the tree, i.e. places where arc-disjointness between segments breaks.
    """

    paths: tuple[tuple[Arc, ...], ...]
    shared: frozenset[Arc]

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self) -> Iterator[tuple[Arc, ...]]:
        return iter(self.paths)


class ChainStore:
    """Leveled registry of arcs, Varcs and chains for one AS.

    Invariants: every referenced child exists, and the accumulated
    ordering relation stays acyclic.
    """

    def __init__(self, max_chain_size: int = MAX_CHAIN_SIZE,
                 digraph: Digraph | None = None) -> None:
        self.max_chain_size = max_chain_size
        self.digraph = digraph
        self.structures: dict[str, Structure] = {}
        self.by_level: dict[int, list[str]] = defaultdict(list)
        self.by_endpoints: dict[Arc, list[str]] = defaultdict(list)
        self.relation: set[Arc] = set()
        self._succ: dict[str, set[str]] = defaultdict(set)
        self.warnings: list[str] = []

    def __contains__(self, sid: object) -> bool:
        return sid in self.structures

    def __len__(self) -> int:
        return len(self.structures)

    def __getitem__(self, sid: str) -> Structure:
        return self.structures[sid]

    def top_level(self) -> list[Blueprint]:
        """Blueprints of every level-0 structure, in id order."""
        return [self.blueprint(sid) for sid in sorted(self.by_level.get(0, []))]

    def chains(self, level: int | None = None) -> list[Structure]:
        ids = self.by_level.get(level, []) if level is not None else sorted(self.structures)
        return [self.structures[i] for i in ids if self.structures[i].kind is Kind.CHAIN]

    # relation ------------------------------------------------------------

    def find_cycle_with(self, pairs: Iterable[Arc]) -> list[str] | None:
        """Cycle in ``relation`` plus ``pairs``, or None."""
        extra: dict[str, set[str]] = defaultdict(set)
        for u, v in pairs:
            if v not in self._succ[u]:
                extra[u].add(v)
        if not extra:
            return None
        nodes = sorted(set(self._succ) | set(extra)
                       | {w for s in (*self._succ.values(), *extra.values()) for w in s})
        arcs = [(u, w) for u in nodes for w in sorted(self._succ.get(u, set()) | extra.get(u, set()))]
        return find_cycle(Digraph.from_arcs(nodes, arcs))

    def _add_pairs(self, pairs: Iterable[Arc]) -> None:
        for u, v in pairs:
            self.relation.add((u, v))
            self._succ[u].add(v)

    # registration --------------------------------------------------------

    def _check(self, s: Structure, pending: Mapping[str, Structure]) -> None:
        def lookup(cid: str) -> Structure:
            child = pending.get(cid) or self.structures.get(cid)
            if child is None:
                raise MissingChild(f"{s.id} references unregistered {cid}")
            return child

        old = self.structures.get(s.id)
        if old is not None and old != s:
            raise DuplicateStructure(f"{s.id} already registered with different content")
        if s.kind is Kind.CHAIN and len(s.vertex_order) > self.max_chain_size:
            raise ChainTooLarge(
                f"{s.id} has {len(s.vertex_order)} vertices (max {self.max_chain_size})")
        kids = [lookup(c) for c in s.children]
        for k in kids:
            if k.level != s.level + 1:
                raise MalformedStructure(f"{k.id} is not one level below {s.id}")
        if s.kind is Kind.ARC:
            if kids:
                raise MalformedStructure("an arc cannot contain other structures")
            if self.digraph is not None and not self.digraph.has_arc(s.tail, s.head):
                raise MalformedStructure(f"{s.tail}{s.head} is not an arc of the digraph")
        elif s.kind is Kind.VARC:
            at = s.tail
            for k in kids:
                if k.tail != at:
                    raise MalformedStructure(f"{s.id} children do not form a path")
                at = k.head
            if not kids or at != s.head:
                raise MalformedStructure(f"{s.id} children do not reach {s.head}")
        else:
            want = list(itertools.combinations(s.vertex_order, 2))
            if [k.endpoints for k in kids] != want:
                raise MalformedStructure(f"{s.id} segments do not cover its order")

    def register(self, s: Structure) -> str:
        """Admit one structure whose children are already registered."""
        return self.register_all([s])[0]

    def register_blueprint(self, bp: Blueprint, level: int = 0) -> str:
        return self.register_all(bp.materialize(level))[0]

    def register_all(self, items: Sequence[Structure]) -> list[str]:
        """Admit a batch atomically: all structures or none."""
        pending = {s.id: s for s in items}
        for s in items:
            self._check(s, pending)
        new = [s for s in items if s.id not in self.structures]
        if not new:
            return [s.id for s in items]
        children_lookup = {**self.structures, **pending}
        pairs: set[Arc] = set()
        for s in new:
            if s.kind is Kind.VARC:
                pts = [s.tail] + [children_lookup[c].head for c in s.children]
                pairs.update(itertools.combinations(pts, 2))
            elif s.kind is Kind.CHAIN:
                pairs.update(itertools.combinations(s.vertex_order, 2))
        cycle = self.find_cycle_with(pairs)
        if cycle is not None:
            raise CycleRejected(items[0].id, cycle)
        for s in new:
            self.structures[s.id] = s
            self.by_level[s.level].append(s.id)
            self.by_endpoints[s.endpoints].append(s.id)
        self._add_pairs(pairs)
        return [s.id for s in items]

    # reading back --------------------------------------------------------

    def _child(self, parent: Structure, cid: str) -> Structure:
        try:
            return self.structures[cid]
        except KeyError:
            raise IntegrityError(f"{parent.id} references missing {cid}") from None

    def blueprint(self, sid: str) -> Blueprint:
        s = self.structures.get(sid)
        if s is None:
            raise IntegrityError(f"unknown structure {sid}")
        return self._blueprint(s)

    def _blueprint(self, s: Structure) -> Blueprint:
        parts = tuple(self._blueprint(self._child(s, c)) for c in s.children)
        if s.kind is Kind.ARC:
            return arc(s.tail, s.head)
        if s.kind is Kind.VARC:
            return Blueprint(Kind.VARC, s.tail, s.head, parts)
        return Blueprint(Kind.CHAIN, s.tail, s.head, parts, s.vertex_order)

    def dumps(self) -> str:
        rows = sorted(self.structures.values(), key=lambda s: (s.level, s.id))
        return "".join(s.to_line() + "\n" for s in rows)

    @classmethod
    def loads(cls, text: str, max_chain_size: int = MAX_CHAIN_SIZE) -> "ChainStore":
        items = [Structure.from_line(ln) for ln in text.splitlines() if ln.strip()]
        store = cls(max_chain_size)
        # children first so every batch member can be checked
        store.register_all(sorted(items, key=lambda s: -s.level))
        return store


def resolve(store: ChainStore, s: Structure | str) -> Resolution:
    """Expand a stored structure into concrete arc sequences.

    Arcs and Varcs give one sequence; a chain gives one per canonical
    disjoint path.  Chains nested as segments contribute their direct
    segment's route.
    """
    sid = s if isinstance(s, str) else s.id
    return resolve_blueprint(store.blueprint(sid))


def resolve_blueprint(bp: Blueprint) -> Resolution:
    if bp.kind is Kind.CHAIN:
        paths = tuple(
            tuple(a for u, v in zip(p, p[1:]) for a in bp.segment(u, v).primary_route())
            for p in canonical_disjoint_paths(bp)
        )
    else:
        paths = (tuple(bp.primary_route()),)
    return Resolution(paths, frozenset(shared_arcs(bp)))


def shared_arcs(bp: Blueprint) -> set[Arc]:
    """Arcs backing two or more segments of one chain, anywhere in the tree."""
    out: set[Arc] = set()
    for node in bp.walk():
        if node.kind is not Kind.CHAIN:
            continue
        seen: set[Arc] = set()
        for _, seg in node.segments():
            route = set(seg.primary_route())
            out |= route & seen
            seen |= route
    return out


def canonical_routes(bp: Blueprint) -> list[list[Arc]]:
    """Concrete arcs of each canonical path of a chain blueprint."""
    return [list(p) for p in resolve_blueprint(bp).paths]


def routes_disjoint(routes: Sequence[Sequence[Arc]]) -> bool:
    seen: set[Arc] = set()
    for r in routes:
        for a in r:
            if a in seen:
                return False
            seen.add(a)
    return True


__all__ = [
    "MAX_CHAIN_SIZE", "Kind", "Blueprint", "Structure", "ChainStore", "ChainMetrics",
    "Resolution", "arc", "varc", "path_varc", "chain", "chain_metrics", "is_complete_order",
    "transmitter_receiver", "canonical_disjoint_paths", "chains_conflict", "shrink", "grow",
    "resolve", "resolve_blueprint", "shared_arcs", "segment_digraph", "ChainError",
    "ContractError", "IntegrityError", "RegistrationError", "DuplicateStructure",
    "MissingChild", "ChainTooLarge", "MalformedStructure", "CycleRejected", "GrowRejected",
    "DigraphError",
]
