"""Chain routing: complete orders over announcement digraphs.

Discovery builds chains (complete orders) out of arcs and virtual arcs,
the safety rules keep the union of chains acyclic, and the simulator
compares chain forwarding with a greedy path-vector baseline.
"""
from __future__ import annotations

from .chains import (
    MAX_CHAIN_SIZE,
    Blueprint,
    ChainStore,
    arc,
    chain,
    chain_metrics,
    grow,
    is_complete_order,
    resolve,
    shrink,
    varc,
)
from .digraph import (
    Digraph,
    PathSet,
    Role,
    arc_disjoint_count,
    complete_order,
    is_acyclic,
    load_adjacency,
    parse_adjacency,
)
from .discovery import ReachabilityClass, build_report, discover, modified_bfs
from .kernels import BACKEND
from .rules import ChainProposal, establish_chain, rule1_check, rule2_failover
from .scenario import Scenario, load_scenario
from .simulator import Outcome, run
from .verify import verify_laws

__version__ = "0.1.0"

__all__ = [
    "MAX_CHAIN_SIZE", "Blueprint", "ChainStore", "arc", "chain", "chain_metrics", "grow",
    "is_complete_order", "resolve", "shrink", "varc",
    "Digraph", "PathSet", "Role", "arc_disjoint_count", "complete_order", "is_acyclic",
    "load_adjacency", "parse_adjacency",
    "ReachabilityClass", "build_report", "discover", "modified_bfs",
    "BACKEND", "ChainProposal", "establish_chain", "rule1_check", "rule2_failover",
    "Scenario", "load_scenario", "Outcome", "run", "verify_laws",
]
