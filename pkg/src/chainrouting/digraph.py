"""Labelled digraphs: representation, adjacency-matrix I/O, traversal,
acyclicity, transitive closure and the arc-disjoint path oracle.

Vertices are addressed by label at the public API.  Internally arcs are
pairs of indices into ``labels``; every iteration follows label order so
that all downstream output is reproducible.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from . import kernels


class Role(enum.Enum):
    ANNOUNCEMENT = "announcement"
    DESTINATION = "destination"
    GENERIC = "generic"


class DigraphError(ValueError):
    pass


class VertexNotFound(DigraphError, LookupError):
    def __init__(self, label: str) -> None:
        super().__init__(f"unknown vertex {label!r}")
        self.label = label


class ParseError(DigraphError):
    """Adjacency text rejected; ``line`` is 1-based."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class HeaderError(ParseError):
    pass


class ShapeError(ParseError):
    pass


class DuplicateLabelError(ParseError):
    pass


class LoopError(ParseError):
    pass


@dataclass(frozen=True)
class Digraph:
    labels: tuple[str, ...]
    arcs: frozenset[tuple[int, int]]
    role: Role = Role.GENERIC

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise DigraphError("vertex labels must be unique")
        n = len(self.labels)
        for u, v in self.arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise DigraphError(f"arc ({u}, {v}) out of range")
            if u == v:
                raise DigraphError(f"loop at {self.labels[u]!r}")

    @classmethod
    def from_arcs(
        cls,
        labels: Iterable[str],
        arcs: Iterable[tuple[str, str]],
        role: Role = Role.GENERIC,
    ) -> "Digraph":
        labels = tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        try:
            pairs = frozenset((index[u], index[v]) for u, v in arcs)
        except KeyError as exc:
            raise VertexNotFound(exc.args[0]) from None
        return cls(labels, pairs, role)

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def _succ(self) -> tuple[tuple[int, ...], ...]:
        rows: list[list[int]] = [[] for _ in self.labels]
        for u, v in self.arcs:
            rows[u].append(v)
        return tuple(tuple(sorted(r)) for r in rows)

    @cached_property
    def _pred(self) -> tuple[tuple[int, ...], ...]:
        rows: list[list[int]] = [[] for _ in self.labels]
        for u, v in self.arcs:
            rows[v].append(u)
        return tuple(tuple(sorted(r)) for r in rows)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise VertexNotFound(label) from None

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def has_arc(self, u: str, v: str) -> bool:
        return (self.index(u), self.index(v)) in self.arcs

    def successors(self, label: str) -> list[str]:
        return [self.labels[j] for j in self._succ[self.index(label)]]

    def predecessors(self, label: str) -> list[str]:
        return [self.labels[j] for j in self._pred[self.index(label)]]

    def out_degree(self, label: str) -> int:
        return len(self._succ[self.index(label)])

    def in_degree(self, label: str) -> int:
        return len(self._pred[self.index(label)])

    def arc_list(self) -> list[tuple[str, str]]:
        """Arcs as label pairs, sorted by (tail, head) index."""
        return [(self.labels[u], self.labels[v]) for u, v in sorted(self.arcs)]

    def converse(self) -> "Digraph":
        role = {
            Role.ANNOUNCEMENT: Role.DESTINATION,
            Role.DESTINATION: Role.ANNOUNCEMENT,
        }.get(self.role, Role.GENERIC)
        return Digraph(self.labels, frozenset((v, u) for u, v in self.arcs), role)

    def with_role(self, role: Role) -> "Digraph":
        return Digraph(self.labels, self.arcs, role)

    def without_arcs(self, arcs: Iterable[tuple[str, str]]) -> "Digraph":
        drop = {(self.index(u), self.index(v)) for u, v in arcs}
        return Digraph(self.labels, self.arcs - drop, self.role)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)


def complete_order(labels: Sequence[str], role: Role = Role.GENERIC) -> Digraph:
    """The complete order v1 < v2 < ... < vn on ``labels``."""
    n = len(labels)
    return Digraph(tuple(labels), frozenset((i, j) for i in range(n) for j in range(i + 1, n)), role)


# ---- adjacency matrix I/O -------------------------------------------------

def parse_adjacency(text: str, role: Role = Role.GENERIC) -> Digraph:
    """Parse the adjacency-matrix text format (see docs/FORMATS.md)."""
    lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body))
    if not lines:
        raise HeaderError("empty input", 1)

    lineno, first = lines[0]
    try:
        n = int(first)
    except ValueError:
        raise HeaderError(f"expected vertex count, got {first!r}", lineno) from None
    if n < 1:
        raise HeaderError(f"vertex count must be positive, got {n}", lineno)
    if len(lines) < 2:
        raise HeaderError("missing label line", lineno)

    lineno, label_line = lines[1]
    labels = label_line.split()
    if len(labels) != n:
        raise HeaderError(f"expected {n} labels, got {len(labels)}", lineno)
    seen: set[str] = set()
    for lab in labels:
        if lab in seen:
            raise DuplicateLabelError(f"duplicate label {lab!r}", lineno)
        seen.add(lab)

    rows = lines[2:]
    if len(rows) != n:
        where = rows[n][0] if len(rows) > n else (rows[-1][0] if rows else lineno) + 1
        raise ShapeError(f"expected {n} matrix rows, got {len(rows)}", where)
    arcs = set()
    for i, (lineno, row) in enumerate(rows):
        cells = row.split()
        if len(cells) != n:
            raise ShapeError(f"row {i + 1} has {len(cells)} entries, expected {n}", lineno)
        for j, cell in enumerate(cells):
            if cell == "1":
                if i == j:
                    raise LoopError(f"loop at {labels[i]!r} (diagonal entry)", lineno)
                arcs.add((i, j))
            elif cell != "0":
                raise ShapeError(f"entry {cell!r} is not 0 or 1", lineno)
    return Digraph(tuple(labels), frozenset(arcs), role)


def serialize_adjacency(d: Digraph) -> str:
    out = [str(d.n), " ".join(d.labels)]
    for i in range(d.n):
        out.append(" ".join("1" if (i, j) in d.arcs else "0" for j in range(d.n)))
    return "\n".join(out) + "\n"


def load_adjacency(path: str, role: Role = Role.GENERIC) -> Digraph:
    with open(path, encoding="utf-8") as fh:
        return parse_adjacency(fh.read(), role)


# ---- structure queries ----------------------------------------------------

def find_cycle(d: Digraph) -> list[str] | None:
    """A directed cycle as ``[v0, v1, ..., v0]``, or None when acyclic."""
    WHITE, GREY, BLACK = 0, 1, 2
    colour = [WHITE] * d.n
    succ = d._succ
    for root in range(d.n):
        if colour[root] != WHITE:
            continue
        stack = [(root, 0)]
        path = [root]
        colour[root] = GREY
        while stack:
            u, k = stack[-1]
            if k < len(succ[u]):
                stack[-1] = (u, k + 1)
                v = succ[u][k]
                if colour[v] == GREY:
                    cyc = path[path.index(v):] + [v]
                    return [d.labels[i] for i in cyc]
                if colour[v] == WHITE:
                    colour[v] = GREY
                    stack.append((v, 0))
                    path.append(v)
            else:
                colour[u] = BLACK
                stack.pop()
                path.pop()
    return None


def is_acyclic(d: Digraph) -> bool:
    return find_cycle(d) is None


def transitive_closure(d: Digraph) -> Digraph:
    # a closed walk would put loops on the diagonal; those are not arcs
    pairs = frozenset(p for p in kernels.transitive_closure(d.n, sorted(d.arcs)) if p[0] != p[1])
    return Digraph(d.labels, pairs, d.role)


def reachable(d: Digraph, source: str) -> list[str]:
    """Vertices reachable from ``source`` (excluding it), in BFS order."""
    s = d.index(source)
    seen = {s}
    order = []
    frontier = [s]
    while frontier:
        nxt = []
        for u in frontier:
            for v in d._succ[u]:
                if v not in seen:
                    seen.add(v)
                    order.append(d.labels[v])
                    nxt.append(v)
        frontier = nxt
    return order


def delete_vertex(d: Digraph, v: str) -> Digraph:
    """``d - v``: drop the vertex and every arc touching it."""
    k = d.index(v)
    keep = [i for i in range(d.n) if i != k]
    remap = {old: new for new, old in enumerate(keep)}
    arcs = frozenset((remap[a], remap[b]) for a, b in d.arcs if a != k and b != k)
    return Digraph(tuple(d.labels[i] for i in keep), arcs, d.role)


# ---- arc-disjoint paths ---------------------------------------------------

@dataclass(frozen=True)
class PathSet:
    """A family of directed paths, each a vertex sequence source -> sink.

    ``no_safe_path`` marks the empty result of a failover computation that
    excluded every candidate (as opposed to a pair with no path at all).
    """

    paths: tuple[tuple[str, ...], ...] = ()
    disjoint: bool = True
    no_safe_path: bool = False

    def __post_init__(self) -> None:
        if not self.disjoint:
            return
        seen: set[tuple[str, str]] = set()
        for p in self.paths:
            for arc in zip(p, p[1:]):
                if arc in seen:
                    raise DigraphError(f"paths share arc {arc[0]}->{arc[1]}")
                seen.add(arc)

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self) -> Iterator[tuple[str, ...]]:
        return iter(self.paths)

    def arc_paths(self) -> list[list[tuple[str, str]]]:
        return [list(zip(p, p[1:])) for p in self.paths]

    def used_arcs(self) -> set[tuple[str, str]]:
        return {arc for p in self.paths for arc in zip(p, p[1:])}


def max_arc_disjoint_paths(d: Digraph, s: str, t: str) -> PathSet:
    """Maximum set of pairwise arc-disjoint s->t paths (unit-capacity flow)."""
    si, ti = d.index(s), d.index(t)
    if si == ti:
        raise DigraphError("source and sink must differ")
    raw = kernels.max_flow_paths(d.n, sorted(d.arcs), si, ti)
    return PathSet(tuple(tuple(d.labels[i] for i in p) for p in raw))


def arc_disjoint_count(d: Digraph, s: str, t: str) -> int:
    return len(max_arc_disjoint_paths(d, s, t))
