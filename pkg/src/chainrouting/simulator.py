"""Deterministic tick-based routing simulator.

Two control planes share one event loop:

* baseline: a greedy path-vector protocol.  Each node keeps the latest
  path every neighbour announced, selects its most preferred available
  route and re-announces on change.
* chain: sources establish chains with the three-round protocol (cycle veto
  at every intermediary), then forward over failover-safe paths, switching
  chains only when the active one has no safe path left.

In both modes the neighbours of a failed link or node report the event,
optionally stamped with its origination time, and nodes relay reports
that change their view.

Each tick: deliver due messages, apply scripted events, advance the chain
protocol, re-select routes (label order, from a common snapshot), then
check the forwarding digraph for loops and the whole state for
convergence or recurrence.
"""
from __future__ import annotations

import enum
import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .chains import Blueprint, ChainError, ChainStore, Kind, arc, chain, path_varc
from .rules import (
    ChainProposal,
    EstablishmentOutcome,
    SegState,
    SegmentStatus,
    establish_chain,
    reinstate,
    rule2_failover,
)
from .scenario import Event, EventKind, Mode, Route, Scenario

Path = tuple[str, ...]


class Outcome(enum.Enum):
    CONVERGED = "converged"
    OSCILLATION = "oscillation"
    EXHAUSTED = "exhausted"


EXIT_CODES = {Outcome.CONVERGED: 0, Outcome.OSCILLATION: 3, Outcome.EXHAUSTED: 4}


@dataclass(frozen=True)
class Record:
    tick: int
    actor: str
    kind: str
    detail: str = ""

    def line(self) -> str:
        return f"{self.tick} {self.actor} {self.kind} {self.detail}".rstrip()


@dataclass
class EventTrace:
    header: list[str] = field(default_factory=list)
    records: list[Record] = field(default_factory=list)
    footer: list[str] = field(default_factory=list)

    def add(self, tick: int, actor: str, kind: str, detail: str = "") -> None:
        self.records.append(Record(tick, actor, kind, detail))

    def of_kind(self, kind: str, actor: str | None = None) -> list[Record]:
        return [r for r in self.records if r.kind == kind and (actor is None or r.actor == actor)]

    def dumps(self) -> str:
        lines = [f"# {h}" for h in self.header]
        lines += [r.line() for r in self.records]
        lines += [f"# {f}" for f in self.footer]
        return "\n".join(lines) + "\n"


@dataclass
class RunResult:
    outcome: Outcome
    tick: int
    trace: EventTrace
    routes: dict[str, Path | None]
    views: dict[str, dict[str, str]]
    period: int | None = None
    loops: list[tuple[int, tuple[str, ...]]] = field(default_factory=list)
    established: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.outcome]

    def summary(self) -> str:
        if self.outcome is Outcome.CONVERGED:
            return f"converged at tick {self.tick}"
        if self.outcome is Outcome.OSCILLATION:
            return f"oscillation with period {self.period} detected at tick {self.tick}"
        return f"exhausted after {self.tick} ticks"


# ---- event views ----------------------------------------------------------

@dataclass(frozen=True)
class Report:
    subject: str
    state: str  # "up" | "down"
    origin: int
    sender: str


@dataclass(frozen=True)
class ViewEntry:
    state: str
    origin: int
    sender: str


def apply_timestamped_view(view: dict[str, ViewEntry], msg: Report,
                           timestamping: bool = True) -> str:
    """Fold a report into ``view``; returns what happened.

    With timestamping a report wins only if it originated later than the
    stored one; equal times keep the state reported by the lower sender
    label.  Without it the latest arrival wins.  Results are
    ``view_change``, ``ignored_stale`` or ``ignored_duplicate``.
    """
    cur = view.get(msg.subject)
    new = ViewEntry(msg.state, msg.origin, msg.sender)
    if cur is None:
        view[msg.subject] = new
        return "view_change"
    if not timestamping:
        if cur.state == msg.state:
            return "ignored_duplicate"
        view[msg.subject] = new
        return "view_change"
    if msg.origin < cur.origin:
        return "ignored_stale"
    if msg.origin == cur.origin:
        if cur.state == msg.state or cur.sender <= msg.sender:
            return "ignored_duplicate"
        view[msg.subject] = new
        return "view_change"
    changed = cur.state != msg.state
    view[msg.subject] = new
    return "view_change" if changed else "ignored_duplicate"


def detect_loop(next_hop: Mapping[str, str | None]) -> list[str] | None:
    """A forwarding cycle ``[v0, ..., v0]`` in the next-hop map, or None."""
    done: set[str] = set()
    for start in sorted(next_hop):
        path: list[str] = []
        on_path: dict[str, int] = {}
        v: str | None = start
        while v is not None and v not in done:
            if v in on_path:
                cyc = path[on_path[v]:] + [v]
                return cyc
            on_path[v] = len(path)
            path.append(v)
            v = next_hop.get(v)
        done.update(path)
    return None


# ---- messages -------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Message:
    due: int
    seq: int
    sender: str = field(compare=False)
    receiver: str = field(compare=False)
    kind: str = field(compare=False)  # "route" | "event"
    payload: object = field(compare=False)


@dataclass
class ProposalRun:
    proposal: ChainProposal
    start: int
    outcome: EstablishmentOutcome

    @property
    def finish(self) -> int:
        return self.start + self.outcome.rounds


def _fmt_path(p: Path | None) -> str:
    return "-".join(p) if p else "none"


def _fmt_chain(c: Blueprint) -> str:
    return f"C({','.join(c.order)})"


# ---- the simulation -------------------------------------------------------

class Simulation:
    def __init__(self, scn: Scenario, stop_on_oscillation: bool = True) -> None:
        scn.validate()
        self.scn = scn
        self.g = scn.graph
        self.dest = scn.destination
        self.labels = self.g.labels
        self.stop_on_oscillation = stop_on_oscillation
        self.trace = EventTrace()
        self.t = 0
        self._seq = itertools.count()
        self.queue: list[Message] = []
        self.down_links: set[frozenset[str]] = set()
        self.down_nodes: set[str] = set()
        self.views: dict[str, dict[str, ViewEntry]] = {v: {} for v in self.labels}
        self.nbrs = {v: scn.neighbors(v) for v in self.labels}
        self.succ = {v: self.g.successors(v) for v in self.labels}
        self.pred = {v: self.g.predecessors(v) for v in self.labels}
        self.arcs = set(self.g.arc_list())
        self.events = deque(scn.events)
        self.loops: list[tuple[int, tuple[str, ...]]] = []
        # baseline
        self.rib: dict[str, dict[str, Path | None]] = {v: {} for v in self.labels}
        self.selected: dict[str, Path | None] = {v: None for v in self.labels}
        # chain mode
        self.stores = {v: ChainStore(digraph=None) for v in self.labels}
        self.established: list[Blueprint] = []
        self.status: dict[tuple[str, str], SegmentStatus] = {}
        self.active: dict[str, str | None] = {v: None for v in self.labels}
        self.pending: list[tuple[str, ChainProposal | None, object]] = []
        self.run_: ProposalRun | None = None
        self.confirm_at: dict[tuple[str, str], int] = {}
        self.changed = False
        self._init_header()
        if scn.mode is Mode.CHAIN:
            self._queue_initial_proposals()

    # -- bookkeeping ------------------------------------------------------

    def _init_header(self) -> None:
        s = self.scn
        h = self.trace.header
        h.append(f"scenario {s.name or '-'}")
        h.append(f"mode {s.mode.value}")
        h.append(f"destination {s.destination}")
        h.append(f"timestamping {'on' if s.timestamping else 'off'}")
        if s.mode is Mode.CHAIN:
            h.append("chain search reruns only on topology change events")

    def record(self, actor: str, kind: str, detail: str = "") -> None:
        self.trace.add(self.t, actor, kind, detail)

    def send(self, u: str, v: str, kind: str, payload: object) -> None:
        due = self.t + self.scn.delay(u, v)
        heapq.heappush(self.queue, Message(due, next(self._seq), u, v, kind, payload))
        self.record(u, "message_sent", f"{self._describe(kind, payload)} to {v}")

    @staticmethod
    def _describe(kind: str, payload: object) -> str:
        if kind == "route":
            return f"route {_fmt_path(payload)}" if payload else "withdraw"
        r: Report = payload  # type: ignore[assignment]
        return f"event {r.subject} {r.state} t={r.origin}"

    def node_up(self, v: str) -> bool:
        return v not in self.down_nodes

    def arc_up(self, u: str, v: str) -> bool:
        if (u, v) not in self.arcs:
            return False
        if not self.down_nodes and not self.down_links:
            return True
        return (u not in self.down_nodes and v not in self.down_nodes
                and frozenset((u, v)) not in self.down_links)

    # -- event plane ------------------------------------------------------

    def _excluded(self, subject: str) -> set[str]:
        kind, _, name = subject.partition(":")
        if kind == "link":
            return set(name.split("-"))
        return {name} | set(self.nbrs[name])

    def _detect(self, ev: Event) -> None:
        state = "down" if ev.is_failure else "up"
        subject = ev.subject
        if ev.kind in (EventKind.FAIL_LINK, EventKind.RECOVER_LINK):
            detectors = sorted(ev.args)
        else:
            detectors = [u for u in self.nbrs[ev.args[0]] if self.node_up(u)]
        excluded = self._excluded(subject)
        for u in detectors:
            if not self.node_up(u):
                continue
            self.views[u][subject] = ViewEntry(state, self.t, u)
            self.record(u, "view_change", f"{subject} {state} t={self.t} detected")
            for w in self.nbrs[u]:
                if w not in excluded and self.node_up(w):
                    self.send(u, w, "event", Report(subject, state, self.t, u))

    def _receive_report(self, m: Message) -> None:
        r: Report = m.payload  # type: ignore[assignment]
        v = m.receiver
        what = apply_timestamped_view(self.views[v], r, self.scn.timestamping)
        self.record(v, what, f"{r.subject} {r.state} t={r.origin} from {r.sender}")
        if what != "view_change":
            return
        excluded = self._excluded(r.subject)
        for w in self.nbrs[v]:
            if w != m.sender and w not in excluded and self.node_up(w):
                self.send(v, w, "event", Report(r.subject, r.state, r.origin, v))

    def believed_failures(self, v: str) -> frozenset[tuple[str, str]]:
        out = set()
        for subject, entry in self.views[v].items():
            if entry.state != "down":
                continue
            kind, _, name = subject.partition(":")
            if kind == "link":
                a, b = name.split("-")
                out |= {(a, b), (b, a)}
            else:
                out |= {(name, w) for w in self.nbrs[name]} | {(w, name) for w in self.nbrs[name]}
        return frozenset(out)

    # -- scripted events --------------------------------------------------

    def _apply_event(self, ev: Event) -> None:
        self.record("net", ev.kind.value, " ".join(ev.args))
        if ev.kind is EventKind.FAIL_LINK:
            self.down_links.add(frozenset(ev.args))
            a, b = ev.args
            self.rib[a].pop(b, None)
            self.rib[b].pop(a, None)
        elif ev.kind is EventKind.RECOVER_LINK:
            self.down_links.discard(frozenset(ev.args))
            a, b = sorted(ev.args)
            for x, y in ((a, b), (b, a)):
                if self.selected[x] and self.arc_up(y, x):
                    self.send(x, y, "route", self.selected[x])
        elif ev.kind is EventKind.FAIL_NODE:
            v = ev.args[0]
            self.down_nodes.add(v)
            self.rib[v] = {}
            for w in self.nbrs[v]:
                self.rib[w].pop(v, None)
        else:
            v = ev.args[0]
            self.down_nodes.discard(v)
            for w in self.nbrs[v]:
                if self.selected[w] and self.arc_up(v, w):
                    self.send(w, v, "route", self.selected[w])
        self._detect(ev)
        if self.scn.mode is Mode.CHAIN:
            self._queue_reproposals()

    # -- baseline plane ---------------------------------------------------

    def _baseline_choice(self, v: str) -> Path | None:
        if not self.node_up(v):
            return None
        if v == self.dest:
            return (v,)
        usable = [n for n in self.succ[v] if self.arc_up(v, n)]
        return baseline_select(v, self.rib[v], self.scn.preferences.get(v), usable)

    def _baseline_step(self) -> dict[str, str | None]:
        new = {v: self._baseline_choice(v) for v in self.labels}
        for v in self.labels:
            if new[v] == self.selected[v]:
                continue
            self.changed = True
            self.selected[v] = new[v]
            if v != self.dest or new[v] is None:
                self.record(v, "route_selected", _fmt_path(new[v]))
            for x in self.pred[v]:
                if self.arc_up(x, v):
                    self.send(v, x, "route", new[v])
        return {v: (p[1] if p and len(p) > 1 else None) for v, p in self.selected.items()}

    def _deliver_route(self, m: Message) -> None:
        v = m.receiver
        if not self.arc_up(v, m.sender):
            self.record(v, "message_dropped", f"{self._describe(m.kind, m.payload)} from {m.sender}")
            return
        self.record(v, "message_received", f"{self._describe(m.kind, m.payload)} from {m.sender}")
        self.rib[v][m.sender] = m.payload  # type: ignore[assignment]

    # -- chain plane: establishment --------------------------------------

    def _queue_initial_proposals(self) -> None:
        if self.scn.chains:
            for spec in self.scn.chains:
                self.pending.append((spec.order[0], None, spec))
            return
        for v in self.labels:
            top = self._top_path(v)
            if top is not None:
                self.pending.append((v, None, top))

    def _top_path(self, v: str) -> Path | None:
        prefs = self.scn.preferences.get(v, ())
        if prefs and not prefs[0].wildcard and len(prefs[0].path) >= 3:
            return prefs[0].path
        return None

    def _queue_reproposals(self) -> None:
        have = {c.order[0] for c in self.established}
        waiting = {p[0] for p in self.pending}
        if self.run_ is not None:
            waiting.add(self.run_.proposal.proposer)
        for v in self.labels:
            if v in have or v in waiting:
                continue
            top = self._top_path(v)
            if top is not None:
                self.pending.append((v, None, top))

    def _segment_for(self, u: str, w: str, members: set[str]) -> Blueprint | None:
        nested = [c for c in self.established if (c.tail, c.head) == (u, w)]
        if nested:
            return min(nested, key=lambda c: (-c.height, c.order))
        if self.arc_up(u, w):
            return arc(u, w)
        # shortest detour that keeps clear of the other chain vertices
        prev = {u: None}
        frontier = deque([u])
        while frontier:
            x = frontier.popleft()
            for y in self.g.successors(x):
                if y in prev or not self.arc_up(x, y):
                    continue
                if y != w and y in members:
                    continue
                prev[y] = x
                if y == w:
                    path = [w]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    return path_varc(*reversed(path))
                frontier.append(y)
        return None

    def _build_proposal(self, item) -> ChainProposal | None:
        _, _, what = item
        if isinstance(what, tuple):
            order, explicit = what, {}
        else:
            order = what.order
            explicit = {pair: path_varc(*p) for pair, p in what.segments}
        members = set(order)
        segs = {}
        for u, w in itertools.combinations(order, 2):
            seg = explicit.get((u, w)) or self._segment_for(u, w, members)
            if seg is None:
                self.record(order[0], "chain_unavailable",
                            f"C({','.join(order)}) has no segment {u}{w}")
                return None
            segs[(u, w)] = seg
        try:
            return ChainProposal(chain(order, segs))
        except ChainError as exc:
            self.record(order[0], "chain_unavailable", f"C({','.join(order)}): {exc}")
            return None

    def _next_pending(self) -> int | None:
        if not self.pending:
            return None
        heads = {c.order[0] for c in self.established}
        for i, (v, _, what) in enumerate(self.pending):
            order = what if isinstance(what, tuple) else what.order
            if order[1] in heads:
                return i
        return min(range(len(self.pending)), key=lambda i: self.labels.index(self.pending[i][0]))

    def _advance_protocol(self) -> None:
        run = self.run_
        if run is not None:
            r = self.t - run.start
            for m in run.outcome.messages:
                if m.round == r:  # delivered this tick
                    self.record(m.receiver, "message_received",
                                f"{m.kind} {_fmt_chain(run.proposal.chain)} from {m.sender}")
            if self.t == run.finish:
                self._finish(run)
                self.run_ = None
            else:
                for m in run.outcome.messages:
                    if m.round == r + 1:
                        self.record(m.sender, "message_sent",
                                    f"{m.kind} {_fmt_chain(run.proposal.chain)} to {m.receiver}")
                return
        while self.run_ is None:
            i = self._next_pending()
            if i is None:
                return
            item = self.pending.pop(i)
            prop = self._build_proposal(item)
            if prop is None:
                continue
            outcome = establish_chain(prop, {v: self.stores[v] for v in prop.intermediaries})
            self.changed = True
            self.record(prop.proposer, "chain_proposed", self._describe_chain(prop.chain))
            if outcome.rounds == 0:
                self._finish(ProposalRun(prop, self.t, outcome))
                continue
            self.run_ = ProposalRun(prop, self.t, outcome)
            for m in outcome.messages:
                if m.round == 1:
                    self.record(m.sender, "message_sent",
                                f"{m.kind} {_fmt_chain(prop.chain)} to {m.receiver}")

    @staticmethod
    def _describe_chain(c: Blueprint) -> str:
        segs = " ".join(f"{u}{v}={_fmt_seg(s)}" for (u, v), s in c.segments())
        return f"{_fmt_chain(c)} {segs}"

    def _finish(self, run: ProposalRun) -> None:
        c = run.proposal.chain
        self.changed = True
        if not run.outcome.established:
            cyc = ",".join(run.outcome.cycle)
            self.record(c.order[0], "chain_rejected",
                        f"{_fmt_chain(c)} by {run.outcome.rejected_by} cycle {cyc}")
            return
        for v in self.labels:
            try:
                self.stores[v].register_blueprint(c, 0)
            except ChainError as exc:
                self.record(v, "store_warning", f"{_fmt_chain(c)}: {exc}")
        self.established.append(c)
        self.record(c.order[0], "chain_established", f"{_fmt_chain(c)} messages={run.outcome.messages_sent}")
        for v in c.order[:-1]:
            self.status[(v, c.key)] = SegmentStatus(c)

    # -- chain plane: forwarding -----------------------------------------

    def _refresh_status(self, v: str, c: Blueprint) -> SegmentStatus:
        key = (v, c.key)
        st = self.status[key]
        now = self.believed_failures(v)
        added = now - st.failed_arcs
        removed = st.failed_arcs - now
        if added:
            st = st.fail(added)
        if removed:
            st = st.recover(removed)
            self.confirm_at[key] = self.t + 1
        if key in self.confirm_at and self.confirm_at[key] <= self.t and not removed:
            del self.confirm_at[key]
            explicit_unconfirmed = [p for p, s in st.explicit if s is SegState.UNCONFIRMED]
            if explicit_unconfirmed:
                st = reinstate(c, st, explicit_unconfirmed)
                pairs = " ".join(f"{a}{b}" for a, b in explicit_unconfirmed)
                self.record(v, "segment_confirmed", f"{_fmt_chain(c)} {pairs}")
        self.status[key] = st
        return st

    def _resolve_path(self, c: Blueprint, p: Path) -> Path:
        verts = [p[0]]
        for u, w in zip(p, p[1:]):
            verts += [b for _, b in c.segment(u, w).primary_route()]
        return tuple(verts)

    def _pick(self, v: str, routes: list[Path]) -> Path:
        for r in self.scn.preferences.get(v, ()):
            for cand in routes:
                if (r.wildcard and cand[1] == r.via) or (not r.wildcard and cand == r.path):
                    return cand
        return routes[0]

    def _chain_choice(self, v: str) -> Path | None:
        if not self.node_up(v):
            return None
        if v == self.dest:
            return (v,)
        failed = self.believed_failures(v)
        own = [c for c in self.established if c.order[0] == v]
        for c in own:
            self._refresh_status(v, c)
        ranked = sorted(own, key=lambda c: c.key != self.active[v])
        for c in ranked:
            safe = rule2_failover(c, self.status[(v, c.key)])
            if safe.no_safe_path:
                continue
            if self.active[v] != c.key:
                if self.active[v] is not None:
                    self.record(v, "chain_switched", f"{self.active[v]} -> {c.key}")
                self.active[v] = c.key
            return self._pick(v, [self._resolve_path(c, p) for p in safe])
        for c in self.established:
            if v in c.order[1:-1]:
                self._refresh_status(v, c)
                route = c.segment(v, c.head).primary_route()
                if not failed & set(route):
                    return (v,) + tuple(b for _, b in route)
        if self.g.has_arc(v, self.dest) and (v, self.dest) not in failed:
            return (v, self.dest)
        return None

    def _chain_step(self) -> dict[str, str | None]:
        new = {v: self._chain_choice(v) for v in self.labels}
        for v in self.labels:
            if new[v] == self.selected[v]:
                continue
            self.changed = True
            self.selected[v] = new[v]
            if v != self.dest:
                self.record(v, "route_selected" if new[v] else "unreachable", _fmt_path(new[v]))
        return {v: (p[1] if p and len(p) > 1 else None) for v, p in self.selected.items()}

    # -- state ------------------------------------------------------------

    def _state_key(self) -> tuple:
        msgs = tuple(sorted((m.due - self.t, m.sender, m.receiver, m.kind, repr(m.payload))
                            for m in self.queue))
        views = tuple((v, tuple(sorted((s, e.state) for s, e in self.views[v].items())))
                      for v in self.labels)
        rib = tuple((v, tuple(sorted(self.rib[v].items(), key=lambda kv: kv[0])))
                    for v in self.labels)
        status = tuple(sorted((k, st.explicit, tuple(sorted(st.failed_arcs)))
                              for k, st in self.status.items()))
        return (tuple(self.selected.items()), rib, msgs, views, status,
                tuple(sorted(self.active.items(), key=lambda kv: kv[0])),
                tuple(sorted(map(tuple, map(sorted, self.down_links)))),
                tuple(sorted(self.down_nodes)), len(self.established))

    def _quiet(self) -> bool:
        return (not self.queue and not self.events and not self.pending and self.run_ is None
                and not self.confirm_at and not self.changed)

    # -- main loop --------------------------------------------------------

    def run(self, max_ticks: int) -> RunResult:
        seen: dict[tuple, int] = {}
        outcome: Outcome | None = None
        period = None
        end_tick = max_ticks
        for t in range(max_ticks):
            self.t = t
            self.changed = False
            while self.queue and self.queue[0].due <= t:
                m = heapq.heappop(self.queue)
                if not self.node_up(m.receiver):
                    continue
                if m.kind == "route":
                    self._deliver_route(m)
                else:
                    self._receive_report(m)
                if m.kind == "route":
                    self.changed = True
            while self.events and self.events[0].time == t:
                self._apply_event(self.events.popleft())
                self.changed = True
            if self.scn.mode is Mode.CHAIN:
                self._advance_protocol()
                hops = self._chain_step()
            else:
                hops = self._baseline_step()
            cyc = detect_loop(hops)
            if cyc is not None:
                self.loops.append((t, tuple(cyc)))
                self.record("net", "loop_detected", ",".join(cyc))
            if self._quiet():
                outcome, end_tick = Outcome.CONVERGED, t
                self.record("net", "converged")
                break
            if outcome is None and not self.events and self.run_ is None and not self.pending:
                key = self._state_key()
                if key in seen:
                    period = t - seen[key]
                    outcome, end_tick = Outcome.OSCILLATION, t
                    self.record("net", "oscillation_detected", f"period {period}")
                    if self.stop_on_oscillation:
                        break
                seen.setdefault(key, t)
        if outcome is None:
            outcome = Outcome.EXHAUSTED
            self.t = max_ticks
            self.record("net", "exhausted")
        result = RunResult(
            outcome, end_tick, self.trace,
            routes=dict(self.selected),
            views={v: {s: e.state for s, e in sorted(self.views[v].items())} for v in self.labels},
            period=period, loops=self.loops,
            established=[c.key for c in self.established],
        )
        self._footer(result)
        return result

    def _footer(self, res: RunResult) -> None:
        f = self.trace.footer
        f.append(f"result {res.outcome.value} tick {res.tick}"
                 + (f" period {res.period}" if res.period else ""))
        for v in self.labels:
            if v != self.dest:
                f.append(f"route {v} {_fmt_path(res.routes[v])}")
        for c in self.established:
            f.append(f"chain {self._describe_chain(c)}")
        for v in self.labels:
            for s, state in res.views[v].items():
                f.append(f"view {v} {s} {state}")


def _fmt_seg(s: Blueprint) -> str:
    if s.kind is Kind.ARC:
        return "arc"
    if s.kind is Kind.CHAIN:
        return _fmt_chain(s)
    return "V(" + "+".join(_fmt_seg_part(p) for p in s.parts) + ")"


def _fmt_seg_part(p: Blueprint) -> str:
    if p.kind is Kind.ARC:
        return f"{p.tail}{p.head}"
    return _fmt_seg(p)


def run(scn: Scenario, max_ticks: int = 1000, stop_on_oscillation: bool = True) -> RunResult:
    """Simulate ``scn`` for at most ``max_ticks`` ticks."""
    return Simulation(scn, stop_on_oscillation).run(max_ticks)


def baseline_select(v: str, rib: Mapping[str, Path | None], preferences: Iterable[Route] | None,
                    usable: Iterable[str] | None = None) -> Path | None:
    """Most preferred available route for ``v`` given the paths its
    neighbours currently announce.  ``usable`` limits the first hops that
    are up (all announcing neighbours by default)."""
    ok = set(rib) if usable is None else set(usable)
    if preferences is None:
        options = [(v,) + p for n, p in sorted(rib.items()) if p and v not in p and n in ok]
        return min(options, key=lambda p: (len(p), p)) if options else None
    for r in preferences:
        got = rib.get(r.first_hop)
        if r.first_hop not in ok or got is None or v in got:
            continue
        if r.wildcard or got == r.path[1:]:
            return (v,) + got
    return None


__all__ = [
    "Outcome", "EXIT_CODES", "Record", "EventTrace", "RunResult", "Report", "ViewEntry",
    "apply_timestamped_view", "detect_loop", "Simulation", "run", "baseline_select",
]
