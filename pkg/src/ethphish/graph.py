"""Immutable directed transaction graph and the structural queries built on it."""

from __future__ import annotations

from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from . import container, kernels
from .errors import FormatError, GraphError

ATTRIBUTES = ("a", "t")


class TransactionGraph:
    """Directed graph with one aggregated edge per ordered account pair.

    Edges are held in COO arrays sorted by ``(src, dst)``, which doubles as the
    out-adjacency in CSR form. Every edge carries the summed amount ``a`` and
    the transaction count ``t``. Instances are treated as read-only after
    construction; all derived structures are cached lazily.
    """

    def __init__(self, node_ids: Sequence[str], src, dst, a, t, phishing):
        n = len(node_ids)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        a = np.asarray(a, dtype=np.float64)
        t = np.asarray(t, dtype=np.int64)
        phishing = np.asarray(phishing, dtype=bool)
        if not (len(src) == len(dst) == len(a) == len(t)):
            raise GraphError("edge arrays differ in length")
        if len(phishing) != n:
            raise GraphError("phishing flags must align with node_ids")
        if len(src):
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise GraphError("edge endpoint out of range")
            if np.any(src == dst):
                raise GraphError("self-loops are not allowed")
            if np.any(t < 1) or np.any(a < 0) or not np.all(np.isfinite(a)):
                raise GraphError("edge attributes require t >= 1 and finite a >= 0")
        order = np.lexsort((dst, src))
        src, dst, a, t = src[order], dst[order], a[order], t[order]
        if len(src) > 1 and np.any((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])):
            raise GraphError("duplicate ordered pair")

        self.node_ids = tuple(node_ids)
        self.src, self.dst, self.a, self.t = src, dst, a, t
        self.phishing = phishing
        for arr in (self.src, self.dst, self.a, self.t, self.phishing):
            arr.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def __repr__(self):
        return (f"TransactionGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges}, "
                f"phishing={int(self.phishing.sum())})")

    def __eq__(self, other):
        if not isinstance(other, TransactionGraph):
            return NotImplemented
        return (self.node_ids == other.node_ids
                and np.array_equal(self.src, other.src) and np.array_equal(self.dst, other.dst)
                and np.array_equal(self.a, other.a) and np.array_equal(self.t, other.t)
                and np.array_equal(self.phishing, other.phishing))

    __hash__ = None

    @cached_property
    def index(self) -> dict[str, int]:
        return {acc: i for i, acc in enumerate(self.node_ids)}

    def find(self, account: str) -> int | None:
        """Index of ``account`` (exact, then stripped, then lower-cased as ingest does), or None."""
        for key in (account, account.strip(), account.strip().lower()):
            idx = self.index.get(key)
            if idx is not None:
                return idx
        return None

    def index_of(self, account: str) -> int:
        idx = self.find(account)
        if idx is None:
            raise GraphError(f"unknown account {account!r}")
        return idx

    def edge_attr(self, name: str) -> np.ndarray:
        if name not in ATTRIBUTES:
            raise GraphError(f"edge attribute must be one of {ATTRIBUTES}, got {name!r}")
        return self.a if name == "a" else self.t

    @cached_property
    def out_indptr(self) -> np.ndarray:
        return np.searchsorted(self.src, np.arange(self.n_nodes + 1)).astype(np.int64)

    @cached_property
    def _in_order(self) -> np.ndarray:
        return np.lexsort((self.src, self.dst))

    @cached_property
    def in_indptr(self) -> np.ndarray:
        return np.searchsorted(self.dst[self._in_order], np.arange(self.n_nodes + 1)).astype(np.int64)

    @cached_property
    def in_indices(self) -> np.ndarray:
        """In-neighbours, row-aligned with ``in_indptr``; sorted within each row."""
        return self.src[self._in_order]

    @cached_property
    def in_edge_ids(self) -> np.ndarray:
        return self._in_order

    def out_neighbors(self, node: int) -> np.ndarray:
        return self.dst[self.out_indptr[node]:self.out_indptr[node + 1]]

    def in_neighbors(self, node: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[node]:self.in_indptr[node + 1]]

    @cached_property
    def undirected(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Merged undirected adjacency ``(indptr, nbr, a_sum, t_sum)``.

        Each unordered pair appears once per endpoint with both directions'
        attributes summed; rows are sorted by neighbour index.
        """
        n = self.n_nodes
        rows = np.concatenate([self.src, self.dst])
        cols = np.concatenate([self.dst, self.src])
        a = np.concatenate([self.a, self.a])
        t = np.concatenate([self.t, self.t]).astype(np.float64)
        key = rows * max(n, 1) + cols
        order = np.argsort(key, kind="stable")
        key = key[order]
        if len(key):
            starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
            a_sum = np.add.reduceat(a[order], starts)
            t_sum = np.add.reduceat(t[order], starts)
            ukey = key[starts]
        else:
            a_sum = t_sum = np.zeros(0)
            ukey = np.zeros(0, dtype=np.int64)
        r = ukey // max(n, 1)
        indptr = np.searchsorted(r, np.arange(n + 1)).astype(np.int64)
        return indptr, ukey % max(n, 1), a_sum, t_sum

    @cached_property
    def bidirectional(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Per-node list of incident directed edges, both directions kept apart.

        Returns ``(indptr, nbr, a, t)``; a neighbour linked in both directions
        appears twice in its row. Rows hold out-edges then in-edges.
        """
        n = self.n_nodes
        rows = np.concatenate([self.src, self.dst])
        cols = np.concatenate([self.dst, self.src])
        a = np.concatenate([self.a, self.a])
        t = np.concatenate([self.t, self.t]).astype(np.float64)
        order = np.argsort(rows, kind="stable")
        indptr = np.searchsorted(rows[order], np.arange(n + 1)).astype(np.int64)
        return indptr, cols[order], a[order], t[order]

    def induced_subgraph(self, nodes) -> "TransactionGraph":
        """Subgraph on ``nodes`` (indices or a boolean mask), keeping original relative order."""
        nodes = np.asarray(nodes)
        if nodes.dtype == bool:
            mask = nodes
        else:
            mask = np.zeros(self.n_nodes, dtype=bool)
            mask[nodes] = True
        remap = np.cumsum(mask) - 1
        keep = mask[self.src] & mask[self.dst]
        ids = [acc for acc, m in zip(self.node_ids, mask) if m]
        return TransactionGraph(ids, remap[self.src[keep]], remap[self.dst[keep]],
                                self.a[keep], self.t[keep], self.phishing[mask])

    # -- snapshot -------------------------------------------------------------

    def to_bytes(self) -> bytes:
        blob, offsets = container.pack_strings(self.node_ids)
        meta = {"n_nodes": self.n_nodes, "n_edges": self.n_edges}
        return container.encode("graph", meta, {
            "node_blob": blob, "node_offsets": offsets,
            "src": self.src, "dst": self.dst, "a": self.a, "t": self.t,
            "phishing": self.phishing.astype(np.uint8),
        })

    @classmethod
    def from_bytes(cls, raw: bytes) -> "TransactionGraph":
        meta, arr = container.decode(raw, "graph")
        ids = container.unpack_strings(arr["node_blob"], arr["node_offsets"])
        if len(ids) != meta["n_nodes"] or len(arr["src"]) != meta["n_edges"]:
            raise FormatError("graph snapshot header disagrees with payload")
        return cls(ids, arr["src"], arr["dst"], arr["a"], arr["t"], arr["phishing"].astype(bool))

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "TransactionGraph":
        return cls.from_bytes(Path(path).read_bytes())


def weakly_connected_components(g: TransactionGraph) -> list[np.ndarray]:
    """Node index arrays of each WCC, largest first; equal sizes ordered by smallest member."""
    if g.n_nodes == 0:
        return []
    labels = kernels.weak_component_labels(g.n_nodes, g.src, g.dst)
    order = np.argsort(labels, kind="stable")
    sorted_labels = labels[order]
    cuts = np.flatnonzero(np.diff(sorted_labels)) + 1
    comps = np.split(order, cuts)
    comps.sort(key=lambda c: (-len(c), int(c[0])))
    return comps


def largest_wcc(g: TransactionGraph) -> TransactionGraph:
    if g.n_nodes == 0:
        raise GraphError("largest_wcc of an empty graph")
    return g.induced_subgraph(weakly_connected_components(g)[0])


def average_degree(g: TransactionGraph) -> float:
    if g.n_nodes == 0:
        raise GraphError("average degree of an empty graph")
    return 2 * g.n_edges / g.n_nodes


def density(g: TransactionGraph) -> float:
    n = g.n_nodes
    if n < 2:
        raise GraphError("density needs at least two nodes")
    return 2 * g.n_edges / (n * (n - 1))


def symmetrize(g: TransactionGraph, attribute: str = "a") -> csr_matrix:
    """Undirected weighted view: entry (i, j) = w(i->j) + w(j->i)."""
    w = g.edge_attr(attribute).astype(np.float64)
    n = g.n_nodes
    mat = coo_matrix((np.concatenate([w, w]),
                      (np.concatenate([g.src, g.dst]), np.concatenate([g.dst, g.src]))),
                     shape=(n, n)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat
