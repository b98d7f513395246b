import warnings

import numpy as np
import pytest
from scipy import sparse

from ethphish.errors import ConfigError, GraphError
from ethphish.nn.spectral import (DegradedEstimateWarning, hashed_start, lambda_max,
                                  laplacian_from_edges, normalized_laplacian, power_iteration,
                                  scale_operator)

from conftest import random_subgraph


def dense_laplacian_oracle(n, src, dst, w):
    a = np.zeros((n, n))
    for s, d, x in zip(src, dst, w):
        a[s, d] += x
        a[d, s] += x
    np.fill_diagonal(a, 0)
    deg = a.sum(axis=1)
    lap = np.eye(n)
    for i in range(n):
        for j in range(n):
            if deg[i] > 0 and deg[j] > 0:
                lap[i, j] -= a[i, j] / np.sqrt(deg[i] * deg[j])
    return lap


def test_k2():
    lap = laplacian_from_edges(2, [0], [1], [3.0]).toarray()
    np.testing.assert_allclose(lap, [[1, -1], [-1, 1]], atol=1e-15)


def test_isolated_node():
    assert laplacian_from_edges(1, [], [], []).toarray().tolist() == [[1.0]]


def test_triangle():
    lap = laplacian_from_edges(3, [0, 1, 2], [1, 2, 0], [1.0, 1.0, 1.0]).toarray()
    np.testing.assert_allclose(lap, np.eye(3) - 0.5 * (1 - np.eye(3)), atol=1e-15)


def test_rejects_bad_weights_and_empty():
    with pytest.raises(GraphError):
        laplacian_from_edges(2, [0], [1], [-1.0])
    with pytest.raises(GraphError):
        laplacian_from_edges(0, [], [], [])


@pytest.mark.parametrize("seed", range(10))
def test_laplacian_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    sub = random_subgraph(rng, int(rng.integers(1, 30)))
    w = sub.weights if sub.weight_attribute == "t" else np.log1p(sub.a)
    ref = dense_laplacian_oracle(sub.n_nodes, sub.src, sub.dst, w)
    lap = normalized_laplacian(sub).toarray()
    np.testing.assert_allclose(lap, ref, atol=1e-13)
    ev = np.linalg.eigvalsh(lap)
    assert ev.min() >= -1e-12 and ev.max() <= 2 + 1e-9


def test_amount_transform():
    sub = random_subgraph(np.random.default_rng(2), 10, p=0.5, weight_attribute="a")
    raw = normalized_laplacian(sub, amount_transform="raw").toarray()
    ref = dense_laplacian_oracle(10, sub.src, sub.dst, sub.a)
    np.testing.assert_allclose(raw, ref, atol=1e-13)
    with pytest.raises(ConfigError):
        normalized_laplacian(sub, amount_transform="sqrt")
    with pytest.raises(ConfigError):
        normalized_laplacian(sub, direction_mode="sideways")


def test_lambda_examples():
    k2 = laplacian_from_edges(2, [0], [1], [1.0])
    assert lambda_max(k2) == pytest.approx(2.0, abs=1e-6)
    assert lambda_max(sparse.identity(4, format="csr")) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_lambda_matches_eigensolver(seed):
    rng = np.random.default_rng(seed)
    sub = random_subgraph(rng, 20, p=float(rng.uniform(0.05, 0.5)))
    lap = normalized_laplacian(sub)
    assert lambda_max(lap) == pytest.approx(np.linalg.eigvalsh(lap.toarray()).max(), abs=1e-6)


def test_lambda_sparse_path():
    rng = np.random.default_rng(0)
    n = 900
    src = rng.integers(0, n, 3000)
    dst = rng.integers(0, n, 3000)
    keep = src != dst
    lap = laplacian_from_edges(n, src[keep], dst[keep], rng.random(keep.sum()))
    ref = np.linalg.eigvalsh(lap.toarray()).max()
    assert lambda_max(lap) == pytest.approx(ref, abs=1e-6)


def test_plain_iteration_on_general_psd_matrix():
    rng = np.random.default_rng(1)
    q = rng.standard_normal((8, 8))
    m = q @ q.T
    ref = np.linalg.eigvalsh(m).max()
    assert lambda_max(m, spectral_bound=None, max_iters=20000) == pytest.approx(ref, rel=1e-6)


def test_violated_bound_falls_back():
    m = np.diag([1.0, 3.0])
    assert lambda_max(m) == pytest.approx(3.0, abs=1e-6)


def test_degraded_estimate_is_flagged_not_fatal():
    rng = np.random.default_rng(3)
    q = rng.standard_normal((30, 30))
    m = q @ q.T
    with pytest.warns(DegradedEstimateWarning):
        val = lambda_max(m, max_iters=2, spectral_bound=None)
    assert np.isfinite(val) and val > 0
    res = power_iteration(m, max_iters=2)
    assert not res.converged and res.iterations == 2


def test_start_vector_is_keyed_on_ids():
    keys = np.array([17, 3, 99])
    np.testing.assert_array_equal(hashed_start(keys)[[2, 0, 1]], hashed_start(keys[[2, 0, 1]]))
    v = hashed_start(np.arange(1000))
    assert v.min() >= 0.5 and v.max() < 1.5


def test_scale_examples():
    k2 = laplacian_from_edges(2, [0], [1], [1.0])
    assert scale_operator(k2, 2.0).matrix.toarray().tolist() == [[0, -1], [-1, 0]]
    eye = sparse.identity(3, format="csr")
    assert np.array_equal(scale_operator(eye, 1.0).matrix.toarray(), np.eye(3))
    with pytest.warns(DegradedEstimateWarning):
        out = scale_operator(sparse.csr_matrix((2, 2)), 0.0)
    assert out.substituted and out.lambda_max == 2.0
    assert np.array_equal(out.matrix.toarray(), -np.eye(2))


def test_scaled_spectrum_in_unit_interval():
    rng = np.random.default_rng(5)
    for _ in range(10):
        sub = random_subgraph(rng, 25)
        lap = normalized_laplacian(sub)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            op = scale_operator(lap, lambda_max(lap)).matrix.toarray()
        ev = np.linalg.eigvalsh(op)
        assert ev.min() >= -1 - 1e-9 and ev.max() <= 1 + 1e-6
