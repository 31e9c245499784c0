"""Scenario files: topology, destination, preferences, delays and events.

See docs/FORMATS.md for the grammar.  ``load_scenario`` accepts a path or
the name of a bundled scenario (``varadhan-baseline``, ``griffin-chain``,
...).
"""
from __future__ import annotations

import enum
import os
import random
import re
from dataclasses import dataclass, field, replace
from importlib import resources

from .digraph import Digraph, ParseError, parse_adjacency


class ScenarioError(ValueError):
    """Invalid scenario; ``section`` and ``line`` locate the problem."""

    def __init__(self, message: str, section: str = "", line: int = 0) -> None:
        where = f"[{section}] " if section else ""
        where += f"line {line}: " if line else ""
        super().__init__(where + message)
        self.section = section
        self.line = line


class Mode(enum.Enum):
    BASELINE = "baseline"
    CHAIN = "chain"


@dataclass(frozen=True)
class Route:
    """An explicit path ``v1..dest`` or a wildcard ``via <hop> X``."""

    path: tuple[str, ...] = ()
    via: str | None = None

    @property
    def first_hop(self) -> str:
        return self.via if self.via is not None else self.path[1]

    @property
    def wildcard(self) -> bool:
        return self.via is not None

    def __str__(self) -> str:
        return f"via {self.via} X" if self.via is not None else "-".join(self.path)


class EventKind(enum.Enum):
    FAIL_LINK = "fail_link"
    RECOVER_LINK = "recover_link"
    FAIL_NODE = "fail_node"
    RECOVER_NODE = "recover_node"


@dataclass(frozen=True, order=True)
class Event:
    time: int
    kind: EventKind = field(compare=False)
    args: tuple[str, ...] = field(compare=False)

    @property
    def subject(self) -> str:
        if self.kind in (EventKind.FAIL_LINK, EventKind.RECOVER_LINK):
            return "link:" + "-".join(sorted(self.args))
        return "node:" + self.args[0]

    @property
    def is_failure(self) -> bool:
        return self.kind in (EventKind.FAIL_LINK, EventKind.FAIL_NODE)

    def __str__(self) -> str:
        return f"t={self.time} {self.kind.value} {' '.join(self.args)}"


@dataclass(frozen=True)
class ChainSpec:
    """A chain to propose, with optional explicit segment paths."""

    order: tuple[str, ...]
    segments: tuple[tuple[tuple[str, str], tuple[str, ...]], ...] = ()


@dataclass(frozen=True)
class Scenario:
    graph: Digraph
    destination: str
    preferences: dict[str, tuple[Route, ...]] = field(default_factory=dict)
    events: tuple[Event, ...] = ()
    mode: Mode = Mode.BASELINE
    timestamping: bool = False
    delays: dict[tuple[str, str], int] = field(default_factory=dict)
    chains: tuple[ChainSpec, ...] = ()
    name: str = ""

    def delay(self, u: str, v: str) -> int:
        return self.delays.get((u, v), self.delays.get((v, u), 1))

    def neighbors(self, v: str) -> list[str]:
        """Vertices sharing a link with ``v`` in either direction, label order."""
        nb = set(self.graph.successors(v)) | set(self.graph.predecessors(v))
        return [u for u in self.graph.labels if u in nb]

    def with_mode(self, mode: Mode) -> "Scenario":
        return replace(self, mode=mode)

    def validate(self) -> None:
        d = self.graph
        if self.destination not in d:
            raise ScenarioError(f"unknown destination {self.destination!r}", "destination")
        for node, routes in self.preferences.items():
            if node not in d:
                raise ScenarioError(f"unknown node {node!r}", "preferences")
            seen = set()
            for r in routes:
                if str(r) in seen:
                    raise ScenarioError(f"{node}: route {r} listed twice", "preferences")
                seen.add(str(r))
                _check_route(d, node, self.destination, r)
        for e in self.events:
            if e.time < 0:
                raise ScenarioError(f"negative event time in {e}", "events")
            for v in e.args:
                if v not in d:
                    raise ScenarioError(f"unknown vertex {v!r} in {e}", "events")
            if e.kind in (EventKind.FAIL_LINK, EventKind.RECOVER_LINK):
                a, b = e.args
                if not (d.has_arc(a, b) or d.has_arc(b, a)):
                    raise ScenarioError(f"no link {a}-{b} for {e}", "events")
        for (u, v), t in self.delays.items():
            if t < 1:
                raise ScenarioError(f"delay {u} {v} must be >= 1", "delays")
            if u not in d or v not in d or not (d.has_arc(u, v) or d.has_arc(v, u)):
                raise ScenarioError(f"no link {u}-{v}", "delays")
        for spec in self.chains:
            for v in spec.order:
                if v not in d:
                    raise ScenarioError(f"unknown vertex {v!r}", "chains")
            if spec.order[-1] != self.destination:
                raise ScenarioError(f"chain {','.join(spec.order)} must end at the destination", "chains")


def _check_route(d: Digraph, node: str, dest: str, r: Route) -> None:
    if r.wildcard:
        if not d.has_arc(node, r.via):
            raise ScenarioError(f"{node}: {r.via} is not an out-neighbour", "preferences")
        return
    p = r.path
    if p[0] != node or p[-1] != dest or len(p) < 2:
        raise ScenarioError(f"{node}: route {r} must run from {node} to {dest}", "preferences")
    if len(set(p)) != len(p):
        raise ScenarioError(f"{node}: route {r} revisits a vertex", "preferences")
    for u, v in zip(p, p[1:]):
        if u not in d or v not in d or not d.has_arc(u, v):
            raise ScenarioError(f"{node}: route {r} uses missing arc {u}{v}", "preferences")


# ---- parsing --------------------------------------------------------------

_HEADER = re.compile(r"^\[(\w+)\]\s*(.*)$")
_SECTIONS = {"graph", "destination", "preferences", "delays", "events", "mode",
             "timestamping", "chains"}


def _data_dir():
    return resources.files("chainrouting") / "data"


def bundled_scenarios() -> list[str]:
    return sorted(p.name[:-4] for p in _data_dir().iterdir() if p.name.endswith(".scn"))


def _resolve_graph_file(name: str, base_dir: str | None) -> str:
    if base_dir is not None:
        cand = os.path.join(base_dir, name)
        if os.path.exists(cand):
            with open(cand, encoding="utf-8") as fh:
                return fh.read()
    if os.path.exists(name):
        with open(name, encoding="utf-8") as fh:
            return fh.read()
    bundled = _data_dir() / name
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise ScenarioError(f"graph file {name!r} not found", "graph")


def parse_scenario(text: str, base_dir: str | None = None, name: str = "") -> Scenario:
    sections: dict[str, list[tuple[int, str]]] = {}
    header_line: dict[str, int] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        m = _HEADER.match(body)
        if m:
            current = m.group(1).lower()
            if current not in _SECTIONS:
                raise ScenarioError(f"unknown section [{current}]", current, lineno)
            if current in sections:
                raise ScenarioError("section repeated", current, lineno)
            sections[current] = []
            header_line[current] = lineno
            if m.group(2):
                sections[current].append((lineno, m.group(2).strip()))
            continue
        if current is None:
            raise ScenarioError("content before the first section", "", lineno)
        sections[current].append((lineno, body))

    for required in ("graph", "destination"):
        if required not in sections or not sections[required]:
            raise ScenarioError("missing section", required)

    graph = _parse_graph(sections["graph"], base_dir)
    dest = _single(sections, "destination")
    prefs = _parse_prefs(sections.get("preferences", []))
    delays = _parse_delays(sections.get("delays", []))
    events = _parse_events(sections.get("events", []))
    mode_s = _single(sections, "mode", "baseline")
    try:
        mode = Mode(mode_s)
    except ValueError:
        raise ScenarioError(f"mode must be baseline or chain, got {mode_s!r}", "mode") from None
    ts = _single(sections, "timestamping", "off")
    if ts not in ("on", "off"):
        raise ScenarioError(f"timestamping must be on or off, got {ts!r}", "timestamping")
    chains = _parse_chains(sections.get("chains", []))
    scn = Scenario(graph, dest, prefs, tuple(sorted(events)), mode, ts == "on", delays, chains, name)
    try:
        scn.validate()
    except ScenarioError as exc:
        if exc.line or exc.section not in header_line:
            raise
        msg = str(exc).split("] ", 1)[-1]
        raise ScenarioError(msg, exc.section, header_line[exc.section]) from None
    return scn


def _single(sections: dict, key: str, default: str | None = None) -> str:
    lines = sections.get(key)
    if not lines:
        if default is None:
            raise ScenarioError("missing value", key)
        return default
    if len(lines) != 1 or len(lines[0][1].split()) != 1:
        raise ScenarioError("expected a single value", key, lines[0][0])
    return lines[0][1]


def _parse_graph(lines: list[tuple[int, str]], base_dir: str | None) -> Digraph:
    first = lines[0][1].split()
    if first[0] == "file":
        if len(first) != 2 or len(lines) != 1:
            raise ScenarioError("expected 'file <path>'", "graph", lines[0][0])
        text = _resolve_graph_file(first[1], base_dir)
        offset = 0
    else:
        text = "\n".join(body for _, body in lines)
        offset = lines[0][0] - 1
    try:
        return parse_adjacency(text)
    except ParseError as exc:
        raise ScenarioError(str(exc).split(": ", 1)[-1], "graph", exc.line + offset) from None


def _parse_prefs(lines: list[tuple[int, str]]) -> dict[str, tuple[Route, ...]]:
    prefs: dict[str, tuple[Route, ...]] = {}
    for lineno, body in lines:
        node, sep, rest = body.partition(":")
        node = node.strip()
        if not sep or not node or not rest.strip():
            raise ScenarioError("expected 'node: path > path ...'", "preferences", lineno)
        if node in prefs:
            raise ScenarioError(f"{node} listed twice", "preferences", lineno)
        routes = []
        for item in rest.split(">"):
            words = item.split()
            if len(words) == 3 and words[0] == "via" and words[2] == "X":
                routes.append(Route(via=words[1]))
            elif len(words) == 1 and "-" in words[0]:
                routes.append(Route(path=tuple(words[0].split("-"))))
            else:
                raise ScenarioError(f"bad route {item.strip()!r}", "preferences", lineno)
        prefs[node] = tuple(routes)
    return prefs


def _parse_delays(lines: list[tuple[int, str]]) -> dict[tuple[str, str], int]:
    out = {}
    for lineno, body in lines:
        words = body.split()
        if len(words) != 3:
            raise ScenarioError("expected 'a b <ticks>'", "delays", lineno)
        try:
            t = int(words[2])
        except ValueError:
            raise ScenarioError(f"delay {words[2]!r} is not an integer", "delays", lineno) from None
        out[(words[0], words[1])] = t
    return out


_EVENT_ARITY = {EventKind.FAIL_LINK: 2, EventKind.RECOVER_LINK: 2,
                EventKind.FAIL_NODE: 1, EventKind.RECOVER_NODE: 1}


def _parse_events(lines: list[tuple[int, str]]) -> list[Event]:
    out = []
    for lineno, body in lines:
        words = body.split()
        if len(words) < 2 or not words[0].startswith("t="):
            raise ScenarioError("expected 't=<int> <event> <args>'", "events", lineno)
        try:
            t = int(words[0][2:])
            kind = EventKind(words[1])
        except ValueError:
            raise ScenarioError(f"bad event {body!r}", "events", lineno) from None
        args = tuple(words[2:])
        if len(args) != _EVENT_ARITY[kind]:
            raise ScenarioError(f"{kind.value} takes {_EVENT_ARITY[kind]} vertices", "events", lineno)
        out.append(Event(t, kind, args))
    return out


def _parse_chains(lines: list[tuple[int, str]]) -> tuple[ChainSpec, ...]:
    out = []
    for lineno, body in lines:
        parts = [p.strip() for p in body.split(";")]
        order = tuple(parts[0].split(","))
        if len(order) < 2:
            raise ScenarioError("a chain needs at least two vertices", "chains", lineno)
        segs = []
        for item in parts[1:]:
            pair, sep, path = item.partition("=")
            ends = tuple(pair.split(","))
            if not sep or len(ends) != 2:
                raise ScenarioError(f"bad segment {item!r}; expected 'u,v=u-...-v'", "chains", lineno)
            p = tuple(path.strip().split("-"))
            if (p[0], p[-1]) != ends:
                raise ScenarioError(f"segment path {path} does not join {pair}", "chains", lineno)
            segs.append((ends, p))
        out.append(ChainSpec(order, tuple(segs)))
    return tuple(out)


def load_scenario(path_or_name: str) -> Scenario:
    """Load a scenario file, or a bundled scenario by name."""
    if os.path.exists(path_or_name):
        with open(path_or_name, encoding="utf-8") as fh:
            text = fh.read()
        base = os.path.dirname(os.path.abspath(path_or_name))
        name = os.path.splitext(os.path.basename(path_or_name))[0]
        return parse_scenario(text, base, name)
    bundled = _data_dir() / f"{path_or_name}.scn"
    if bundled.is_file():
        return parse_scenario(bundled.read_text(encoding="utf-8"), None, path_or_name)
    raise ScenarioError(f"no scenario file or bundled scenario named {path_or_name!r}")


# ---- random scenarios -----------------------------------------------------

def random_scenario(seed: int, n: int = 6, mode: Mode = Mode.CHAIN,
                    events: int = 2, p_arc: float = 0.45) -> Scenario:
    """A seeded random scenario with symmetric links towards vertex ``v0``.

    Every node gets up to three explicit loop-free preference paths and
    the script fails and recovers random links.
    """
    rng = random.Random(seed)
    labels = [f"v{i}" for i in range(n)]
    links = set()
    for i in range(1, n):
        links.add((rng.randrange(i), i))  # spanning tree keeps it connected
    for i, j in ((i, j) for i in range(n) for j in range(i + 1, n)):
        if rng.random() < p_arc:
            links.add((i, j))
    arcs = set()
    for i, j in links:
        if j != 0:
            arcs.add((labels[i], labels[j]))
        if i != 0:
            arcs.add((labels[j], labels[i]))
    # the destination never forwards, so drop its outgoing arcs
    arcs = {(u, v) for u, v in arcs if u != labels[0]}
    for i, j in links:
        if i == 0:
            arcs.add((labels[j], labels[0]))
    g = Digraph.from_arcs(labels, sorted(arcs))
    dest = labels[0]
    prefs = {}
    for v in labels[1:]:
        paths = _simple_paths(g, v, dest, limit=12, max_len=5)
        rng.shuffle(paths)
        if paths:
            prefs[v] = tuple(Route(path=tuple(p)) for p in paths[:3])
    evs: list[Event] = []
    link_list = sorted(links)
    for k in range(events):
        i, j = link_list[rng.randrange(len(link_list))]
        t = 12 + 6 * k
        evs.append(Event(t, EventKind.FAIL_LINK, (labels[i], labels[j])))
        evs.append(Event(t + 3, EventKind.RECOVER_LINK, (labels[i], labels[j])))
    scn = Scenario(g, dest, prefs, tuple(sorted(evs)), mode, True, {}, (), f"random-{seed}")
    scn.validate()
    return scn


def _simple_paths(g: Digraph, s: str, t: str, limit: int, max_len: int) -> list[list[str]]:
    out: list[list[str]] = []

    def walk(path: list[str]) -> None:
        if len(out) >= limit:
            return
        u = path[-1]
        if u == t:
            out.append(list(path))
            return
        if len(path) >= max_len:
            return
        for w in g.successors(u):
            if w not in path:
                path.append(w)
                walk(path)
                path.pop()

    walk([s])
    return out


__all__ = [
    "Scenario", "ScenarioError", "Mode", "Route", "Event", "EventKind", "ChainSpec",
    "parse_scenario", "load_scenario", "bundled_scenarios", "random_scenario",
]
