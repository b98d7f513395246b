import math

import numpy as np
import pytest

from ethphish.errors import ModelError
from ethphish.nn import Batch, ChebNetClassifier, prepare

from conftest import finite_difference_check, random_subgraph


def _batch(rng, sizes, labels=None):
    subs = [random_subgraph(rng, n, label=None if labels is None else labels[i])
            for i, n in enumerate(sizes)]
    return subs, Batch.from_graphs([prepare(s) for s in subs])


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("pooling", ["average", "max"])
def test_gradients_match_finite_differences(seed, pooling):
    rng = np.random.default_rng(seed)
    _, batch = _batch(rng, rng.integers(1, 9, size=3))
    model = ChebNetClassifier(hidden=5, order=int(rng.integers(1, 5)), pooling=pooling, seed=seed)
    model.feature_scale = np.full(8, 3.0)
    errs = finite_difference_check(model, batch)
    assert max(errs.values()) <= 1e-4, errs


def test_zero_weights_give_uniform_prediction():
    rng = np.random.default_rng(0)
    _, batch = _batch(rng, [4, 6, 3, 5], labels=[1, 0, 1, 0])
    model = ChebNetClassifier(hidden=4)
    model.set_parameters({k: np.zeros_like(v) for k, v in model.parameters().items()})
    probs = model.forward(batch)
    assert probs.tolist() == [[0.5, 0.5]] * 4
    grads = model.backward()
    assert grads["fc_b"].tolist() == [0.0, 0.0]
    assert model.loss(batch) == pytest.approx(math.log(2), abs=1e-12)


def test_permutation_invariance_of_output_and_gradients():
    rng = np.random.default_rng(3)
    model = ChebNetClassifier(hidden=6, seed=1)
    for _ in range(5):
        sub = random_subgraph(rng, int(rng.integers(2, 15)))
        perm = rng.permutation(sub.n_nodes)
        b1 = Batch.from_graphs([prepare(sub)])
        b2 = Batch.from_graphs([prepare(sub.permuted(perm))])
        p1, g1 = model.forward(b1), model.backward()
        g1 = {k: v.copy() for k, v in g1.items()}
        p2, g2 = model.forward(b2), model.backward()
        assert np.abs(p1 - p2).max() <= 1e-9
        for k in g1:
            assert np.abs(g1[k] - g2[k]).max() <= 1e-9


def test_gradient_independent_of_batch_order():
    rng = np.random.default_rng(4)
    subs, _ = _batch(rng, [5, 7, 3, 9])
    prepared = [prepare(s) for s in subs]
    model = ChebNetClassifier(hidden=6, seed=2)
    model.forward(Batch.from_graphs(prepared))
    g1 = {k: v.copy() for k, v in model.backward().items()}
    model.forward(Batch.from_graphs(prepared[::-1]))
    g2 = model.backward()
    for k in g1:
        assert np.abs(g1[k] - g2[k]).max() <= 1e-9


def test_backward_needs_forward():
    model = ChebNetClassifier(hidden=3)
    with pytest.raises(ModelError):
        model.backward()
    rng = np.random.default_rng(0)
    _, batch = _batch(rng, [3])
    model.forward(batch)
    model.backward()
    with pytest.raises(ModelError):
        model.backward()
    with pytest.raises(ModelError):
        model.conv1.__class__(2, 2, 2, rng).backward(np.zeros((1, 2)))


def test_checkpoint_roundtrip_bit_identical(tmp_path):
    rng = np.random.default_rng(6)
    subs, batch = _batch(rng, [4, 8, 2])
    model = ChebNetClassifier(hidden=7, order=4, pooling="max", seed=9)
    model.fit_scaler([prepare(s) for s in subs])
    model.save(tmp_path / "m.ckpt", {"note": "x"})
    back, meta = ChebNetClassifier.load(tmp_path / "m.ckpt")
    assert meta["note"] == "x" and meta["pooling"] == "max" and meta["order"] == 4
    assert np.array_equal(model.forward(batch), back.forward(batch))
    assert back.to_bytes({"note": "x"}) == (tmp_path / "m.ckpt").read_bytes()
