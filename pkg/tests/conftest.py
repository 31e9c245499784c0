from __future__ import annotations

import itertools
import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from chainrouting.digraph import Digraph

DATA = Path(__file__).resolve().parents[1] / "src" / "chainrouting" / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"


def random_dag(n: int, p: float, rng: random.Random) -> Digraph:
    """Random acyclic digraph; arcs go from lower to higher index of a
    shuffled order so labels carry no hint of the topological order."""
    labels = [f"v{i}" for i in range(n)]
    perm = labels[:]
    rng.shuffle(perm)
    arcs = [(perm[i], perm[j]) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
    return Digraph.from_arcs(labels, arcs)


@st.composite
def dags(draw, max_n: int = 7):
    n = draw(st.integers(2, max_n))
    order = draw(st.permutations(range(n)))
    pairs = [(order[i], order[j]) for i, j in itertools.combinations(range(n), 2)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    labels = tuple(f"v{i}" for i in range(n))
    return Digraph(labels, frozenset(p for p, k in zip(pairs, keep) if k))


@st.composite
def digraphs(draw, max_n: int = 7):
    """Arbitrary loop-free digraphs, cycles allowed."""
    n = draw(st.integers(2, max_n))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Digraph(tuple(f"v{i}" for i in range(n)), frozenset(p for p, k in zip(pairs, keep) if k))


@pytest.fixture
def data_dir() -> Path:
    return DATA
