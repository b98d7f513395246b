"""JIT-compiled kernels."""

import numpy as np
from numba import njit

from . import _loops

walk_steps = njit(cache=True)(_loops.walk_steps)
weak_component_labels = njit(cache=True)(_loops.union_find_labels)


@njit(cache=True)
def _ahead(r1, t1, n1, r2, t2, n2):
    # rank desc, then tie-break attribute desc, then node index asc
    if r1 != r2:
        return r1 > r2
    if t1 != t2:
        return t1 > t2
    return n1 < n2


@njit(cache=True)
def top_k_row(indptr, nbr, rank, tie, node, k):
    lo = indptr[node]
    hi = indptr[node + 1]
    m = min(k, hi - lo)
    buf = np.empty(m, dtype=np.int64)
    filled = 0
    for e in range(lo, hi):
        if filled < m:
            pos = filled
            filled += 1
        elif _ahead(rank[e], tie[e], nbr[e],
                    rank[buf[m - 1]], tie[buf[m - 1]], nbr[buf[m - 1]]):
            pos = m - 1
        else:
            continue
        while pos > 0 and _ahead(rank[e], tie[e], nbr[e],
                                 rank[buf[pos - 1]], tie[buf[pos - 1]], nbr[buf[pos - 1]]):
            buf[pos] = buf[pos - 1]
            pos -= 1
        buf[pos] = e
    out = np.empty(m, dtype=np.int64)
    for i in range(m):
        out[i] = nbr[buf[i]]
    return out


@njit(cache=True)
def ego_expand(indptr, nbr, rank, tie, center, k, hops, mark, stamp):
    cap = 16
    visited = np.empty(cap, dtype=np.int64)
    visited[0] = center
    count = 1
    mark[center] = stamp
    start = 0
    for _ in range(hops):
        stop = count
        for f in range(start, stop):
            chosen = top_k_row(indptr, nbr, rank, tie, visited[f], k)
            for v in chosen:
                if mark[v] != stamp:
                    mark[v] = stamp
                    if count == cap:
                        cap *= 2
                        grown = np.empty(cap, dtype=np.int64)
                        grown[:count] = visited[:count]
                        visited = grown
                    visited[count] = v
                    count += 1
        start = stop
        if start == count:
            break
    return visited[:count].copy()
