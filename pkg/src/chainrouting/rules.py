"""Safety rules for chain routing.

The cycle veto (``rule1_check``) refuses any chain whose vertex order
would close a cycle with the structures an AS already holds.  The
failover rule (``rule2_failover``) restricts forwarding inside a chain to
canonical paths that cannot touch a failed segment.  The establishment
protocol counts the request / reply / confirm messages a source spends to
set a chain up.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Union

from .chains import (
    MAX_CHAIN_SIZE,
    Arc,
    Blueprint,
    ChainStore,
    ChainTooLarge,
    ContractError,
    Kind,
    MalformedStructure,
    canonical_disjoint_paths,
    chain,
)
from .digraph import PathSet


# ---- proposals and the cycle veto -----------------------------------------

@dataclass(frozen=True)
class ChainProposal:
    """A source's request to establish ``chain`` with its intermediaries."""

    chain: Blueprint

    def __post_init__(self) -> None:
        if self.chain.kind is not Kind.CHAIN:
            raise MalformedStructure("a proposal must carry a chain")
        if self.chain.size > MAX_CHAIN_SIZE:
            raise ChainTooLarge(f"proposal has {self.chain.size} vertices (max {MAX_CHAIN_SIZE})")

    @classmethod
    def of(cls, order: Iterable[str], segments: Mapping[Arc, Blueprint] | None = None) -> "ChainProposal":
        return cls(chain(tuple(order), segments))

    @property
    def proposer(self) -> str:
        return self.chain.order[0]

    @property
    def vertex_order(self) -> tuple[str, ...]:
        return self.chain.order

    @property
    def intermediaries(self) -> tuple[str, ...]:
        return self.chain.order[1:-1]

    @property
    def required_segments(self) -> list[tuple[Arc, Blueprint]]:
        return list(self.chain.segments())

    def implied_pairs(self) -> set[Arc]:
        """Vertex order plus the ordering inside every Varc and nested chain."""
        return self.chain.relation()


@dataclass(frozen=True)
class Rule1Result:
    accepted: bool
    cycle: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.accepted


def rule1_check(local: ChainStore, p: ChainProposal) -> Rule1Result:
    """Accept iff the proposal's pairs keep ``local.relation`` acyclic."""
    cycle = local.find_cycle_with(p.implied_pairs())
    if cycle is None:
        return Rule1Result(True)
    return Rule1Result(False, tuple(cycle))


# ---- establishment protocol -----------------------------------------------

class Outcome(enum.Enum):
    ESTABLISHED = "established"
    REJECTED = "rejected"


@dataclass(frozen=True)
class Message:
    round: int
    kind: str  # request | accept | reject | confirm
    sender: str
    receiver: str


@dataclass(frozen=True)
class EstablishmentOutcome:
    status: Outcome
    messages_sent: int
    rounds: int
    rejected_by: str | None = None
    cycle: tuple[str, ...] = ()
    messages: tuple[Message, ...] = field(default=(), repr=False)

    @property
    def established(self) -> bool:
        return self.status is Outcome.ESTABLISHED


Policy = Union[ChainStore, Callable[[ChainProposal], Union[bool, Rule1Result]], bool]


def _decide(policy: Policy | None, p: ChainProposal) -> Rule1Result:
    if policy is None:
        return Rule1Result(True)  # nothing stored yet, nothing to conflict with
    if isinstance(policy, bool):
        return Rule1Result(policy)
    if isinstance(policy, ChainStore):
        return rule1_check(policy, p)
    verdict = policy(p)
    return verdict if isinstance(verdict, Rule1Result) else Rule1Result(bool(verdict))


def establish_chain(p: ChainProposal, responders: Mapping[str, Policy],
                    commit: bool = False) -> EstablishmentOutcome:
    """Run the three-round exchange between the source and intermediaries.

    Round 1 sends one request per intermediary, round 2 collects one reply
    each, and round 3 confirms to everyone only if all accepted.  A store
    responder answers with the cycle veto; with ``commit`` the established chain
    is registered in every store responder (and the proposer's, if given).
    """
    src = p.proposer
    mids = p.intermediaries
    msgs: list[Message] = []
    if not mids:
        return EstablishmentOutcome(Outcome.ESTABLISHED, 0, 0)
    for v in mids:
        msgs.append(Message(1, "request", src, v))
    verdicts = {v: _decide(responders.get(v), p) for v in mids}
    for v in mids:
        msgs.append(Message(2, "accept" if verdicts[v] else "reject", v, src))
    refusals = [v for v in mids if not verdicts[v]]
    if refusals:
        first = refusals[0]
        return EstablishmentOutcome(Outcome.REJECTED, len(msgs), 2, first,
                                    verdicts[first].cycle, tuple(msgs))
    for v in mids:
        msgs.append(Message(3, "confirm", src, v))
    if commit:
        for v in p.vertex_order:
            store = responders.get(v)
            if isinstance(store, ChainStore):
                store.register_blueprint(p.chain, 0)
    return EstablishmentOutcome(Outcome.ESTABLISHED, len(msgs), 3, messages=tuple(msgs))


def message_cost(n: int) -> int:
    """Messages to establish an n-vertex chain when every intermediary accepts."""
    return 3 * max(n - 2, 0)


# ---- failover -------------------------------------------------------------

class SegState(enum.Enum):
    UP = "up"
    DOWN = "down"
    UNCONFIRMED = "unconfirmed"


@dataclass(frozen=True)
class SegmentStatus:
    """Per-segment state of one chain.

    ``explicit`` holds states set by failure detection or confirmation;
    every other segment is Up unless it joins an intermediate vertex to the
    receiver and that vertex sits at or before the tail of a segment that is
    not Up.  Such a segment is implicitly Unconfirmed: it may itself be
    realised through the failed one.
    """

    chain: Blueprint
    explicit: tuple[tuple[Arc, SegState], ...] = ()
    failed_arcs: frozenset[Arc] = frozenset()

    def __post_init__(self) -> None:
        pairs = set(itertools.combinations(self.chain.order, 2))
        for pair, _ in self.explicit:
            if pair not in pairs:
                raise ContractError(f"{pair[0]}{pair[1]} is not a segment of {self.chain.key}")

    @classmethod
    def all_up(cls, c: Blueprint) -> "SegmentStatus":
        return cls(c)

    @classmethod
    def from_failures(cls, c: Blueprint, failed: Iterable[Arc]) -> "SegmentStatus":
        """Down exactly where a segment's resolved route uses a failed arc."""
        failed = frozenset(failed)
        down = [(pair, SegState.DOWN) for pair, seg in c.segments()
                if failed & set(seg.primary_route())]
        return cls(c, tuple(down), failed)

    @property
    def _map(self) -> dict[Arc, SegState]:
        return dict(self.explicit)

    def state(self, u: str, v: str) -> SegState:
        m = self._map
        if (u, v) in m:
            return m[(u, v)]
        order = self.chain.order
        last = order[-1]
        if v == last and u != order[0]:
            pos = order.index(u)
            for (a, _), st in m.items():
                if st is not SegState.UP and pos <= order.index(a):
                    return SegState.UNCONFIRMED
        return SegState.UP

    def states(self) -> dict[Arc, SegState]:
        return {pair: self.state(*pair) for pair, _ in self.chain.segments()}

    def down(self) -> list[Arc]:
        return [p for p, s in self.states().items() if s is SegState.DOWN]

    def with_states(self, updates: Mapping[Arc, SegState]) -> "SegmentStatus":
        m = self._map
        m.update(updates)
        order = {p: i for i, (p, _) in enumerate(self.chain.segments())}
        return SegmentStatus(self.chain, tuple(sorted(m.items(), key=lambda kv: order[kv[0]])),
                             self.failed_arcs)

    def fail(self, arcs: Iterable[Arc]) -> "SegmentStatus":
        """Mark segments Down whose routes use any of ``arcs``."""
        failed = self.failed_arcs | frozenset(arcs)
        downs = {pair: SegState.DOWN for pair, seg in self.chain.segments()
                 if failed & set(seg.primary_route())}
        st = self.with_states(downs)
        return SegmentStatus(st.chain, st.explicit, failed)

    def recover(self, arcs: Iterable[Arc]) -> "SegmentStatus":
        """Underlying arcs came back: Down segments no longer touching a
        failed arc become Unconfirmed (still excluded until confirmed)."""
        failed = self.failed_arcs - frozenset(arcs)
        m = self._map
        upd = {}
        for pair, seg in self.chain.segments():
            if m.get(pair) is SegState.DOWN and not failed & set(seg.primary_route()):
                upd[pair] = SegState.UNCONFIRMED
        st = self.with_states(upd)
        return SegmentStatus(st.chain, st.explicit, failed)


def rule2_failover(c: Blueprint, status: SegmentStatus) -> PathSet:
    """Canonical paths of ``c`` that use only Up segments.

    Returns a ``no_safe_path`` PathSet when every path is excluded.
    """
    if status.chain.order != c.order:
        raise ContractError("status belongs to a different chain")
    safe = tuple(p for p in canonical_disjoint_paths(c)
                 if all(status.state(u, v) is SegState.UP for u, v in zip(p, p[1:])))
    return PathSet(safe, no_safe_path=not safe)


def reinstate(c: Blueprint, status: SegmentStatus, confirmed: Iterable[Arc]) -> SegmentStatus:
    """Return confirmed segments to Up.

    Confirming a segment that is still Down (its arcs have not recovered)
    is a contract error; confirming an Up segment changes nothing.
    """
    if status.chain.order != c.order:
        raise ContractError("status belongs to a different chain")
    upd = {}
    for pair in confirmed:
        st = status.state(*pair)
        if st is SegState.DOWN:
            raise ContractError(f"segment {pair[0]}{pair[1]} is down; it cannot be confirmed")
        if st is SegState.UNCONFIRMED:
            upd[pair] = SegState.UP
    return status.with_states(upd) if upd else status


__all__ = [
    "ChainProposal", "Rule1Result", "rule1_check", "Outcome", "Message",
    "EstablishmentOutcome", "establish_chain", "message_cost", "SegState", "SegmentStatus",
    "rule2_failover", "reinstate",
]
