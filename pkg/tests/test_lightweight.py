import numpy as np
import pytest

from ethphish.errors import ConfigError, GraphError
from ethphish.graph import largest_wcc, weakly_connected_components
from ethphish.lightweight import (RescaleConfig, first_order_neighborhood, lighten,
                                  random_walk_rescale)

from conftest import graph_from_edges, random_graph


def test_star_neighbourhood():
    g = graph_from_edges([("X", "S", 1, 1), ("S", "Y", 1, 1), ("U", "V", 1, 1), ("Y", "Z", 1, 1)])
    out = first_order_neighborhood(g, [" S "])
    assert out.node_ids == ("S", "X", "Y")
    assert {(out.node_ids[s], out.node_ids[d]) for s, d in zip(out.src, out.dst)} == \
        {("X", "S"), ("S", "Y")}


def test_isolated_seed_keeps_only_itself():
    g = graph_from_edges([("U", "V", 1, 1)], nodes=["S"])
    out = first_order_neighborhood(g, ["S"])
    assert out.node_ids == ("S",) and out.n_edges == 0


def test_all_adjacent_is_identity():
    g = graph_from_edges([("A", "B", 1, 1), ("B", "C", 2, 2), ("C", "A", 3, 3)])
    assert first_order_neighborhood(g, ["A"]) == g


def test_retains_edges_between_non_seeds():
    g = graph_from_edges([("S", "A", 1, 1), ("S", "B", 1, 1), ("A", "B", 5, 2)])
    assert first_order_neighborhood(g, ["S"]).n_edges == 3


def test_missing_seeds_rejected():
    g = graph_from_edges([("A", "B", 1, 1)])
    with pytest.raises(GraphError):
        first_order_neighborhood(g, ["nobody"])


def test_full_scale_walk_returns_graph():
    g = largest_wcc(random_graph(np.random.default_rng(1), 60, 200))
    out = random_walk_rescale(g, RescaleConfig(g.n_nodes, rng_seed=3))
    assert out.node_ids == g.node_ids and out == g


def test_path_from_end_must_step_to_middle():
    g = graph_from_edges([("A", "B", 1, 1), ("B", "C", 1, 1)])
    for seed in range(10):
        out = random_walk_rescale(g, RescaleConfig(2, rng_seed=seed, start_node="A"))
        assert out.node_ids == ("A", "B") and out.n_edges == 1


def test_scale_below_two_rejected():
    with pytest.raises(ConfigError):
        RescaleConfig(1)


def test_scale_above_size_rejected():
    g = graph_from_edges([("A", "B", 1, 1)])
    with pytest.raises(GraphError):
        random_walk_rescale(g, RescaleConfig(3))


def test_disconnected_start_component_rejected():
    g = graph_from_edges([("A", "B", 1, 1), ("C", "D", 1, 1), ("D", "E", 1, 1)])
    with pytest.raises(GraphError):
        random_walk_rescale(g, RescaleConfig(3, start_node="A"))
    assert random_walk_rescale(g, RescaleConfig(3, start_node="C")).node_ids == ("C", "D", "E")


def test_default_start_is_a_phishing_account():
    # two hubs joined by a long path; a size-2 walk always contains the start
    edges = [("P", "n0", 1, 1)] + [(f"n{i}", f"n{i + 1}", 1, 1) for i in range(20)]
    g = graph_from_edges(edges, phishing=["P"])
    for seed in range(5):
        out = random_walk_rescale(g, RescaleConfig(2, rng_seed=seed))
        assert "P" in out.node_ids and out.phishing[out.node_ids.index("P")]


def _undirected_connected(g):
    return len(weakly_connected_components(g)) == 1


@pytest.mark.parametrize("seed", range(8))
def test_walk_invariants(seed):
    rng = np.random.default_rng(seed)
    g = largest_wcc(random_graph(rng, 400, 700, n_phishing=20))
    target = int(rng.integers(2, g.n_nodes + 1))
    cfg = RescaleConfig(target, rng_seed=seed * 7 + 1)
    out = random_walk_rescale(g, cfg)
    assert out.n_nodes == target
    assert _undirected_connected(out)
    assert out.to_bytes() == random_walk_rescale(g, cfg).to_bytes()
    src_flags = dict(zip(g.node_ids, g.phishing))
    assert all(src_flags[n] == f for n, f in zip(out.node_ids, out.phishing))


def test_walk_teleports_from_isolated_node():
    from ethphish.kernels import _loops
    # node 2 is isolated; walk sits there and must teleport to a visited node
    indptr = np.array([0, 1, 2, 2])
    nbr = np.array([1, 0])
    visited = np.array([False, False, True])
    order = np.array([2, -1, -1])
    count, current, used = _loops.walk_steps(indptr, nbr, visited, order, 1, 2, 3,
                                             np.array([0.3, 0.9]))
    assert (count, current, used) == (1, 2, 2)


def test_lighten_pipeline():
    g = graph_from_edges([("P", "A", 1, 1), ("A", "B", 1, 1), ("B", "C", 1, 1), ("X", "Y", 1, 1),
                          ("Q", "Z", 1, 1)], phishing=["P", "Q"])
    # {A, P} and {Q, Z} tie on size; the one holding the smallest account wins
    light = lighten(g, None)
    assert light.node_ids == ("A", "P")
    small = lighten(g, RescaleConfig(2, rng_seed=0))
    assert small.n_nodes == 2
