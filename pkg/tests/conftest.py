import numpy as np
import pytest

from ethphish.graph import TransactionGraph
from ethphish.kernels import load_backend
from ethphish.sampler import AccountSubgraph, node_features


def graph_from_edges(edges, nodes=None, phishing=()):
    """Graph from ``[(src, dst, a, t), ...]`` with string node names."""
    names = sorted(set(nodes or ()) | {e[0] for e in edges} | {e[1] for e in edges})
    idx = {n: i for i, n in enumerate(names)}
    return TransactionGraph(
        names,
        [idx[e[0]] for e in edges], [idx[e[1]] for e in edges],
        [e[2] for e in edges], [e[3] for e in edges],
        [n in set(phishing) for n in names],
    )


def random_graph(rng, n, m, n_phishing=0):
    """Random simple directed graph with ``n`` nodes and up to ``m`` edges."""
    src = rng.integers(0, n, m)
    dst = rng.integers(0, n, m)
    keep = src != dst
    pairs = np.unique(np.stack([src[keep], dst[keep]], axis=1), axis=0)
    a = np.round(rng.exponential(3.0, len(pairs)), 3)
    t = rng.integers(1, 6, len(pairs))
    flags = np.zeros(n, dtype=bool)
    flags[rng.choice(n, size=n_phishing, replace=False)] = True
    return TransactionGraph([f"0x{i:05x}" for i in range(n)], pairs[:, 0], pairs[:, 1], a, t, flags)


def random_subgraph(rng, n, p=0.3, directed=None, weight_attribute=None, label=None):
    """Random AccountSubgraph with ``n`` nodes, edge probability ``p``, features filled in."""
    directed = bool(rng.integers(2)) if directed is None else directed
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    if not directed:
        mask = np.triu(mask | mask.T, 1)
    src, dst = np.nonzero(mask)
    sub = AccountSubgraph(
        center=int(rng.integers(10**6)),
        nodes=rng.choice(10**6, size=n, replace=False).astype(np.int64),
        src=src.astype(np.int64), dst=dst.astype(np.int64),
        a=np.round(rng.exponential(5.0, len(src)), 4),
        t=rng.integers(1, 8, len(src)).astype(np.int64),
        weight_attribute=weight_attribute or ("a", "t")[int(rng.integers(2))],
        directed=directed,
        label=int(rng.integers(2)) if label is None else label,
    )
    sub.center = int(sub.nodes[0])
    sub.features = node_features(sub)
    return sub


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    return load_backend(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def finite_difference_check(model, batch, h=1e-5):
    """Largest relative error between analytic and central-difference gradients.

    The error of each parameter tensor is ``|g - g_fd| / max(|g| + |g_fd|, 1e-8)``
    with Euclidean norms, so near-zero entries cannot dominate.
    """
    model.forward(batch)
    grads = {k: v.copy() for k, v in model.backward().items()}
    worst = {}
    for name, p in model.parameters().items():
        fd = np.zeros_like(p)
        flat, gflat = p.reshape(-1), fd.reshape(-1)
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + h
            up = model.loss(batch)
            flat[i] = old - h
            down = model.loss(batch)
            flat[i] = old
            gflat[i] = (up - down) / (2 * h)
        num = np.linalg.norm(grads[name] - fd)
        worst[name] = num / max(np.linalg.norm(grads[name]) + np.linalg.norm(fd), 1e-8)
    return worst


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
