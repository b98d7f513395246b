"""Numba vs numpy kernel timings on a random transaction graph.

    python benchmarks/bench_kernels.py [--nodes 200000] [--edges 1000000] [--repeat 3]

Each kernel runs once untimed on both backends (JIT warm-up), then the best of
``--repeat`` runs is reported. Outputs are compared for equality as well.
"""

import argparse
import time

import numpy as np

from ethphish.graph import TransactionGraph
from ethphish.kernels import load_backend
from ethphish.sampler import k_from_counts


def random_graph(n, m, seed):
    rng = np.random.default_rng(seed)
    src, dst = rng.integers(0, n, m), rng.integers(0, n, m)
    keep = src != dst
    pairs = np.unique(np.stack([src[keep], dst[keep]], axis=1), axis=0)
    return TransactionGraph([f"0x{i:08x}" for i in range(n)], pairs[:, 0], pairs[:, 1],
                            rng.exponential(3.0, len(pairs)), rng.integers(1, 9, len(pairs)),
                            np.zeros(n, dtype=bool))


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=200_000)
    ap.add_argument("--edges", type=int, default=1_000_000)
    ap.add_argument("--centers", type=int, default=2_000)
    ap.add_argument("--walk", type=int, default=50_000, help="random-walk target size")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = random_graph(args.nodes, args.edges, args.seed)
    indptr, nbr, a, t = g.undirected
    k = k_from_counts(g.n_nodes, g.n_edges)
    centers = np.random.default_rng(1).choice(g.n_nodes, args.centers, replace=False)
    draws = np.random.default_rng(2).random(40 * args.walk)
    print(f"graph: {g.n_nodes} nodes, {g.n_edges} edges, k={k}")

    def components(impl):
        return lambda: impl.weak_component_labels(g.n_nodes, g.src, g.dst)

    def walk(impl):
        def run():
            visited = np.zeros(g.n_nodes, dtype=np.bool_)
            order = np.empty(args.walk, dtype=np.int64)
            visited[0], order[0] = True, 0
            count, _, _ = impl.walk_steps(indptr, nbr, visited, order, 1, 0, args.walk, draws)
            return order[:count].copy()
        return run

    def ego(impl):
        def run():
            mark = np.zeros(g.n_nodes, dtype=np.int64)
            return [impl.ego_expand(indptr, nbr, t, a, int(c), k, 2, mark, i + 1)
                    for i, c in enumerate(centers)]
        return run

    print(f"{'kernel':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speed-up':>10}  same")
    for name, make in (("weak components", components), ("random walk", walk),
                       ("ego expansion x" + str(args.centers), ego)):
        t_jit, out_jit = best_of(make(load_backend("numba")), args.repeat)
        t_np, out_np = best_of(make(load_backend("numpy")), args.repeat)
        if name == "weak components":
            same = len({(int(x), int(y)) for x, y in zip(out_jit, out_np)}) == len(set(out_np.tolist()))
        elif isinstance(out_jit, list):
            same = all(np.array_equal(x, y) for x, y in zip(out_jit, out_np))
        else:
            same = np.array_equal(out_jit, out_np)
        print(f"{name:<22}{t_jit:>12.4f}{t_np:>12.4f}{t_np / t_jit:>9.1f}x  {same}")


if __name__ == "__main__":
    main()
