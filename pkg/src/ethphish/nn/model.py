"""Two-layer Chebyshev graph classifier over account subgraphs."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from .. import container
from ..errors import ConfigError, FormatError, ModelError
from . import layers
from .spectral import hashed_start, lambda_max, normalized_laplacian, scale_operator

PARAM_NAMES = ("conv1", "conv2", "fc_w", "fc_b")


@dataclass
class PreparedGraph:
    """A subgraph reduced to what the network consumes: scaled operator, features, label."""

    op: sparse.csr_matrix
    x: np.ndarray
    label: int
    lambda_max: float

    @property
    def n_nodes(self) -> int:
        return self.x.shape[0]


def prepare(sub, amount_transform: str = "log1p", tol: float = 1e-8,
            max_iters: int = 1000) -> PreparedGraph:
    """Laplacian, top eigenvalue and rescaled operator for one subgraph.

    Power iteration starts from a vector keyed on the global account indices,
    so the estimate does not depend on the local node order.
    """
    lap = normalized_laplacian(sub, amount_transform=amount_transform)
    lam = lambda_max(lap, tol, max_iters, start=hashed_start(sub.nodes))
    scaled = scale_operator(lap, lam)
    return PreparedGraph(scaled.matrix, np.asarray(sub.features, dtype=np.float64),
                         int(sub.label), scaled.lambda_max)


@dataclass
class Batch:
    op: sparse.csr_matrix
    x: np.ndarray
    offsets: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_graphs(cls, graphs: Sequence[PreparedGraph]) -> "Batch":
        if not graphs:
            raise ModelError("empty batch")
        op = sparse.block_diag([g.op for g in graphs], format="csr")
        offsets = np.zeros(len(graphs) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([g.n_nodes for g in graphs])
        return cls(op, np.vstack([g.x for g in graphs]), offsets,
                   np.array([g.label for g in graphs], dtype=np.float64))


class ChebLayer:
    """Chebyshev filter of order ``K``: one (d_in, d_out) weight matrix per polynomial term."""

    def __init__(self, d_in: int, d_out: int, order: int, rng: np.random.Generator):
        if order < 1:
            raise ConfigError("Chebyshev order must be positive")
        self.weights = layers.glorot_uniform(rng, (order, d_in, d_out), d_in, d_out)
        self.grad = np.zeros_like(self.weights)
        self._cache = None

    @property
    def order(self) -> int:
        return self.weights.shape[0]

    def forward(self, op, x):
        h, self._cache = layers.cheb_forward(self.weights, op, x)
        self._op = op
        return h

    def backward(self, grad_out, need_input_grad=True):
        if self._cache is None:
            raise ModelError("backward called before forward")
        self.grad, grad_in = layers.cheb_backward(self.weights, self._op, self._cache,
                                                  grad_out, need_input_grad)
        return grad_in


class ChebNetClassifier:
    """Chebyshev conv -> Chebyshev conv -> pooling -> linear -> softmax.

    Inputs are standardized with ``feature_mean``/``feature_scale`` (identity
    until ``fit_scaler`` is called).
    """

    def __init__(self, d_in: int = 8, hidden: int = 128, order: int = 3,
                 pooling: str = "average", seed: int = 0):
        if pooling not in layers.POOLING_MODES:
            raise ConfigError(f"pooling must be one of {layers.POOLING_MODES}")
        if hidden < 1 or d_in < 1:
            raise ConfigError("layer sizes must be positive")
        self.d_in, self.hidden, self.order = d_in, hidden, order
        self.pooling = pooling
        self.seed = seed
        rng = np.random.default_rng(seed)
        self.conv1 = ChebLayer(d_in, hidden, order, rng)
        self.conv2 = ChebLayer(hidden, hidden, order, rng)
        self.fc_w = layers.glorot_uniform(rng, (hidden, 2), hidden, 2)
        self.fc_b = np.zeros(2)
        self.feature_mean = np.zeros(d_in)
        self.feature_scale = np.ones(d_in)
        self._cache = None

    # -- parameters ---------------------------------------------------------

    def parameters(self) -> dict[str, np.ndarray]:
        return {"conv1": self.conv1.weights, "conv2": self.conv2.weights,
                "fc_w": self.fc_w, "fc_b": self.fc_b}

    def set_parameters(self, params: dict[str, np.ndarray]) -> None:
        for name in PARAM_NAMES:
            if params[name].shape != self.parameters()[name].shape:
                raise ModelError(f"shape mismatch for {name}")
        self.conv1.weights = np.array(params["conv1"], dtype=np.float64)
        self.conv2.weights = np.array(params["conv2"], dtype=np.float64)
        self.fc_w = np.array(params["fc_w"], dtype=np.float64)
        self.fc_b = np.array(params["fc_b"], dtype=np.float64)

    def fit_scaler(self, graphs: Sequence[PreparedGraph]) -> None:
        x = np.vstack([g.x for g in graphs])
        self.feature_mean = x.mean(axis=0)
        scale = x.std(axis=0)
        self.feature_scale = np.where(scale > 0, scale, 1.0)

    # -- forward / backward -------------------------------------------------

    def forward(self, batch: Batch) -> np.ndarray:
        """Class probabilities, shape (n_graphs, 2). Caches activations for ``backward``."""
        x = (batch.x - self.feature_mean) / self.feature_scale
        h1 = self.conv1.forward(batch.op, x)
        h2 = self.conv2.forward(batch.op, h1)
        z, pool_cache = layers.pool_forward(h2, batch.offsets, self.pooling)
        logits = z @ self.fc_w + self.fc_b
        self._cache = (batch, h2.shape[0], z, pool_cache, logits)
        return layers.softmax(logits)

    def loss(self, batch: Batch) -> float:
        """Mean clamped cross-entropy of the batch; leaves the forward cache for ``backward``."""
        self.forward(batch)
        return layers.cross_entropy_from_logits(self._cache[-1], batch.labels)

    def backward(self) -> dict[str, np.ndarray]:
        """Gradients of the mean batch loss for the most recent ``forward``."""
        if self._cache is None:
            raise ModelError("backward called without a cached forward pass")
        batch, n_rows, z, pool_cache, logits = self._cache
        g_logits = layers.cross_entropy_logit_grad(logits, batch.labels)
        g_fc_w = z.T @ g_logits
        g_fc_b = g_logits.sum(axis=0)
        g_z = g_logits @ self.fc_w.T
        g_h2 = layers.pool_backward(g_z, batch.offsets, self.pooling, pool_cache, n_rows)
        g_h1 = self.conv2.backward(g_h2)
        self.conv1.backward(g_h1, need_input_grad=False)
        self._cache = None
        return {"conv1": self.conv1.grad, "conv2": self.conv2.grad,
                "fc_w": g_fc_w, "fc_b": g_fc_b}

    def predict_proba(self, graphs: Sequence[PreparedGraph], batch_size: int = 256) -> np.ndarray:
        """Phishing-class probability per graph."""
        out = []
        for i in range(0, len(graphs), batch_size):
            out.append(self.forward(Batch.from_graphs(graphs[i:i + batch_size]))[:, 1])
        self._cache = None
        return np.concatenate(out) if out else np.zeros(0)

    # -- checkpoints ----------------------------------------------------------

    def to_bytes(self, extra_meta: dict | None = None) -> bytes:
        meta = {"d_in": self.d_in, "hidden": self.hidden, "order": self.order,
                "pooling": self.pooling, "seed": self.seed, **(extra_meta or {})}
        arrays = dict(self.parameters())
        arrays["feature_mean"] = self.feature_mean
        arrays["feature_scale"] = self.feature_scale
        return container.encode("checkpoint", meta, arrays)

    @classmethod
    def from_bytes(cls, raw: bytes) -> tuple["ChebNetClassifier", dict]:
        meta, arr = container.decode(raw, "checkpoint")
        try:
            model = cls(meta["d_in"], meta["hidden"], meta["order"], meta["pooling"], meta["seed"])
        except KeyError as exc:
            raise FormatError(f"checkpoint header lacks {exc}") from None
        model.set_parameters(arr)
        model.feature_mean = arr["feature_mean"]
        model.feature_scale = arr["feature_scale"]
        return model, meta

    def save(self, path: str | Path, extra_meta: dict | None = None) -> None:
        Path(path).write_bytes(self.to_bytes(extra_meta))

    @classmethod
    def load(cls, path: str | Path) -> tuple["ChebNetClassifier", dict]:
        return cls.from_bytes(Path(path).read_bytes())
