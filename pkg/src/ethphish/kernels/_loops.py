"""Inherently sequential loops written once in nopython-compatible Python.

The numba backend compiles these with ``njit``; the numpy backend calls them
as plain Python. Keeping a single source guarantees both backends consume the
random draws identically.
"""

import numpy as np


def walk_steps(indptr, nbr, visited, order, count, current, target, draws):
    """Advance a random walk until ``count == target`` or ``draws`` run out.

    ``visited`` is a per-node flag array and ``order[:count]`` the visited
    nodes in discovery order; both are updated in place. One draw is consumed
    per step. Returns ``(count, current, draws_used)``.
    """
    used = 0
    n_draws = draws.shape[0]
    while count < target and used < n_draws:
        u = draws[used]
        used += 1
        lo = indptr[current]
        deg = indptr[current + 1] - lo
        if deg == 0:
            j = int(u * count)
            if j >= count:
                j = count - 1
            current = order[j]
            continue
        j = int(u * deg)
        if j >= deg:
            j = deg - 1
        current = nbr[lo + j]
        if not visited[current]:
            visited[current] = True
            order[count] = current
            count += 1
    return count, current, used


def union_find_labels(n, src, dst):
    parent = np.arange(n)
    for e in range(src.shape[0]):
        a = src[e]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = dst[e]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    for v in range(n):
        r = v
        while parent[r] != r:
            r = parent[r]
        parent[v] = r
    return parent
