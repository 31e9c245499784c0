"""Pure-Python graph kernels.

Reference implementation of the two hot loops (unit-capacity max-flow with
path decomposition, and transitive closure).  ``_kernels_c`` mirrors this
module function for function; both must return identical values.
"""
from __future__ import annotations

from collections import deque
from typing import Sequence


def _succ_lists(n: int, arcs: Sequence[tuple[int, int]]) -> list[list[int]]:
    succ: list[list[int]] = [[] for _ in range(n)]
    for u, v in arcs:
        succ[u].append(v)
    for row in succ:
        row.sort()
    return succ


def max_flow_paths(
    n: int, arcs: Sequence[tuple[int, int]], s: int, t: int
) -> list[list[int]]:
    """Maximum family of arc-disjoint s-t paths, as vertex sequences.

    Edmonds-Karp on unit capacities.  Neighbours are scanned in index
    order so the result is fully deterministic.
    """
    succ = _succ_lists(n, arcs)
    pred: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in succ[u]:
            pred[v].append(u)
    flow: dict[tuple[int, int], int] = {}

    while True:
        parent: list[tuple[int, int] | None] = [None] * n
        seen = [False] * n
        seen[s] = True
        queue = deque([s])
        while queue and not seen[t]:
            u = queue.popleft()
            for v in succ[u]:
                if not seen[v] and flow.get((u, v), 0) == 0:
                    seen[v] = True
                    parent[v] = (u, 1)
                    queue.append(v)
            for v in pred[u]:
                # residual of a saturated arc v->u
                if not seen[v] and flow.get((v, u), 0) == 1:
                    seen[v] = True
                    parent[v] = (u, -1)
                    queue.append(v)
        if not seen[t]:
            break
        v = t
        while v != s:
            u, sign = parent[v]  # type: ignore[misc]
            if sign == 1:
                flow[(u, v)] = 1
            else:
                flow[(v, u)] = 0
            v = u

    used = {arc for arc, f in flow.items() if f == 1}
    return _decompose(n, succ, used, s, t)


def _decompose(
    n: int, succ: list[list[int]], used: set[tuple[int, int]], s: int, t: int
) -> list[list[int]]:
    paths: list[list[int]] = []
    while any(u == s for u, _ in used):
        path = [s]
        where = {s: 0}
        u = s
        while u != t:
            v = next(w for w in succ[u] if (u, w) in used)
            if v in where:
                # circulation: drop the cycle and keep walking
                cut = where[v]
                for a, b in zip(path[cut:], path[cut + 1:] + [v]):
                    used.discard((a, b))
                for w in path[cut + 1:]:
                    del where[w]
                del path[cut + 1:]
                u = v
                continue
            where[v] = len(path)
            path.append(v)
            u = v
        for a, b in zip(path, path[1:]):
            used.discard((a, b))
        paths.append(path)
    return paths


def transitive_closure(n: int, arcs: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Sorted arc list of the transitive closure (Warshall over bitsets)."""
    rows = [0] * n
    for u, v in arcs:
        rows[u] |= 1 << v
    for k in range(n):
        bit = 1 << k
        rk = rows[k]
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= rk
    out = []
    for i in range(n):
        r = rows[i]
        for j in range(n):
            if r >> j & 1:
                out.append((i, j))
    return out
