# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_kernels_py``; same signatures, same results."""
from libc.stdlib cimport malloc, calloc, free
from libc.string cimport memset


cdef int _build_csr(int n, arcs, int** off_out, int** adj_out) except -1:
    cdef int m = len(arcs)
    cdef int* off = <int*> calloc(n + 1, sizeof(int))
    cdef int* adj = <int*> malloc((m if m else 1) * sizeof(int))
    cdef int i, u, v
    if off == NULL or adj == NULL:
        free(off); free(adj)
        raise MemoryError()
    for u, v in arcs:
        off[u + 1] += 1
    for i in range(n):
        off[i + 1] += off[i]
    cdef int* fill = <int*> calloc(n, sizeof(int))
    for u, v in sorted(arcs):
        adj[off[u] + fill[u]] = v
        fill[u] += 1
    free(fill)
    off_out[0] = off
    adj_out[0] = adj
    return 0


cdef inline int _find(int* off, int* adj, int u, int v):
    cdef int k
    for k in range(off[u], off[u + 1]):
        if adj[k] == v:
            return k
    return -1


def max_flow_paths(int n, arcs, int s, int t):
    cdef int *off
    cdef int *adj
    cdef int *roff
    cdef int *radj
    arcs = list(arcs)
    _build_csr(n, arcs, &off, &adj)
    _build_csr(n, [(v, u) for u, v in arcs], &roff, &radj)
    cdef int m = off[n]
    cdef char* flow = <char*> calloc(m if m else 1, 1)
    cdef int* par = <int*> malloc(n * sizeof(int))
    cdef int* parsign = <int*> malloc(n * sizeof(int))
    cdef char* seen = <char*> malloc(n)
    cdef int* queue = <int*> malloc(n * sizeof(int))
    cdef int head, tail, u, v, k, j
    try:
        while True:
            memset(seen, 0, n)
            seen[s] = 1
            head = 0
            tail = 0
            queue[tail] = s
            tail += 1
            while head < tail and not seen[t]:
                u = queue[head]
                head += 1
                for k in range(off[u], off[u + 1]):
                    v = adj[k]
                    if not seen[v] and flow[k] == 0:
                        seen[v] = 1
                        par[v] = u
                        parsign[v] = 1
                        queue[tail] = v
                        tail += 1
                for k in range(roff[u], roff[u + 1]):
                    v = radj[k]
                    if not seen[v] and flow[_find(off, adj, v, u)] == 1:
                        seen[v] = 1
                        par[v] = u
                        parsign[v] = -1
                        queue[tail] = v
                        tail += 1
            if not seen[t]:
                break
            v = t
            while v != s:
                u = par[v]
                if parsign[v] == 1:
                    flow[_find(off, adj, u, v)] = 1
                else:
                    flow[_find(off, adj, v, u)] = 0
                v = u

        paths = []
        where = {}
        while True:
            k = -1
            for j in range(off[s], off[s + 1]):
                if flow[j]:
                    k = j
                    break
            if k < 0:
                break
            path = [s]
            where.clear()
            where[s] = 0
            u = s
            while u != t:
                v = -1
                for j in range(off[u], off[u + 1]):
                    if flow[j]:
                        v = adj[j]
                        break
                if v in where:
                    cut = where[v]
                    cyc = path[cut:] + [v]
                    for a in range(len(cyc) - 1):
                        flow[_find(off, adj, cyc[a], cyc[a + 1])] = 0
                    for w in path[cut + 1:]:
                        del where[w]
                    del path[cut + 1:]
                    u = v
                    continue
                where[v] = len(path)
                path.append(v)
                u = v
            for a in range(len(path) - 1):
                flow[_find(off, adj, path[a], path[a + 1])] = 0
            paths.append(path)
        return paths
    finally:
        free(off); free(adj); free(roff); free(radj)
        free(flow); free(par); free(parsign); free(seen); free(queue)


def transitive_closure(int n, arcs):
    cdef unsigned char* m = <unsigned char*> calloc(n * n if n else 1, 1)
    cdef int i, j, k, u, v
    cdef unsigned char* rk
    cdef unsigned char* ri
    try:
        for u, v in arcs:
            m[u * n + v] = 1
        for k in range(n):
            rk = m + k * n
            for i in range(n):
                ri = m + i * n
                if ri[k]:
                    for j in range(n):
                        if rk[j]:
                            ri[j] = 1
        out = []
        for i in range(n):
            for j in range(n):
                if m[i * n + j]:
                    out.append((i, j))
        return out
    finally:
        free(m)
