"""Reference kernels in numpy/scipy, used when JIT compilation is disabled."""

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _loops

walk_steps = _loops.walk_steps


def weak_component_labels(n, src, dst):
    adj = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n)).tocsr()
    _, labels = connected_components(adj, directed=True, connection="weak")
    return labels.astype(np.int64)


def top_k_row(indptr, nbr, rank, tie, node, k):
    lo, hi = indptr[node], indptr[node + 1]
    cand = nbr[lo:hi]
    order = np.lexsort((cand, -tie[lo:hi], -rank[lo:hi]))[:k]
    return cand[order].astype(np.int64)


def ego_expand(indptr, nbr, rank, tie, center, k, hops, mark, stamp):
    visited = [int(center)]
    mark[center] = stamp
    start = 0
    for _ in range(hops):
        stop = len(visited)
        for u in visited[start:stop]:
            for v in top_k_row(indptr, nbr, rank, tie, u, k):
                if mark[v] != stamp:
                    mark[v] = stamp
                    visited.append(int(v))
        start = stop
        if start == len(visited):
            break
    return np.asarray(visited, dtype=np.int64)
