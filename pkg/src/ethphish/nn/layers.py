"""Forward and reverse-mode pieces of the classifier, written against plain arrays.

Every ``*_forward`` returns its output together with whatever the matching
``*_backward`` needs; nothing here holds state.
"""

from __future__ import annotations

import numpy as np

from ..errors import ModelError

POOLING_MODES = ("average", "max")
PROB_EPS = 1e-12


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def chebyshev_basis(op, x: np.ndarray, order: int) -> list[np.ndarray]:
    """``[T_0(L)x, ..., T_{order-1}(L)x]`` via the three-term recursion, never forming T_k."""
    basis = [x]
    if order > 1:
        basis.append(op @ x)
    for _ in range(2, order):
        basis.append(2.0 * (op @ basis[-1]) - basis[-2])
    return basis


def cheb_forward(weights: np.ndarray, op, x: np.ndarray):
    """``relu(sum_k T_k(L) x W_k)`` for ``weights`` of shape (K, d_in, d_out)."""
    order, d_in, _ = weights.shape
    if x.ndim != 2 or x.shape[1] != d_in:
        raise ModelError(f"input has shape {x.shape}, layer expects (*, {d_in})")
    if op.shape != (x.shape[0], x.shape[0]):
        raise ModelError(f"operator shape {op.shape} does not match {x.shape[0]} nodes")
    basis = chebyshev_basis(op, x, order)
    pre = basis[0] @ weights[0]
    for k in range(1, order):
        pre += basis[k] @ weights[k]
    return np.maximum(pre, 0.0), (basis, pre)


def cheb_backward(weights: np.ndarray, op, cache, grad_out: np.ndarray, need_input_grad=True):
    """Gradients w.r.t. the weights and (optionally) the layer input.

    The operator is symmetric, so back-propagating through ``op @ .`` is
    another multiplication by ``op``. ReLU has zero subgradient at 0.
    """
    basis, pre = cache
    order = weights.shape[0]
    g_pre = grad_out * (pre > 0)
    g_w = np.stack([b.T @ g_pre for b in basis])
    if not need_input_grad:
        return g_w, None
    g_basis = [g_pre @ weights[k].T for k in range(order)]
    for k in range(order - 1, 1, -1):
        g_basis[k - 1] += 2.0 * (op @ g_basis[k])
        g_basis[k - 2] -= g_basis[k]
    if order > 1:
        g_basis[0] += op @ g_basis[1]
    return g_w, g_basis[0]


def pool_forward(h: np.ndarray, offsets: np.ndarray, mode: str):
    """Column-wise mean or max over each node segment ``offsets[i]:offsets[i+1]``."""
    if mode not in POOLING_MODES:
        raise ModelError(f"pooling must be one of {POOLING_MODES}, got {mode!r}")
    sizes = np.diff(offsets)
    if np.any(sizes <= 0):
        raise ModelError("cannot pool a graph with zero nodes")
    starts = offsets[:-1]
    if mode == "average":
        return np.add.reduceat(h, starts, axis=0) / sizes[:, None], None
    arg = np.empty((len(sizes), h.shape[1]), dtype=np.int64)
    for i, (s, e) in enumerate(zip(starts, offsets[1:])):
        arg[i] = s + np.argmax(h[s:e], axis=0)
    return np.take_along_axis(h, arg, axis=0), arg


def pool_backward(grad_z: np.ndarray, offsets: np.ndarray, mode: str, cache, n_rows: int):
    sizes = np.diff(offsets)
    if mode == "average":
        return np.repeat(grad_z / sizes[:, None], sizes, axis=0)
    grad_h = np.zeros((n_rows, grad_z.shape[1]))
    cols = np.broadcast_to(np.arange(grad_z.shape[1]), cache.shape)
    np.add.at(grad_h, (cache, cols), grad_z)
    return grad_h


def pool(h: np.ndarray, mode: str = "average") -> np.ndarray:
    """Pool a single graph's node matrix to one vector."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] == 0:
        raise ModelError("pooling needs a non-empty (nodes, features) matrix")
    z, _ = pool_forward(h, np.array([0, h.shape[0]]), mode)
    return z[0]


def softmax(logits: np.ndarray) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def classify(z: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Class probabilities ``softmax(z W + b)``; ``w`` has shape (hidden, 2)."""
    return softmax(np.asarray(z) @ w + b)


def cross_entropy(p_pos, y) -> float:
    """Mean binary cross-entropy on the phishing-class probability, clamped to [eps, 1-eps]."""
    p = np.clip(np.asarray(p_pos, dtype=np.float64), PROB_EPS, 1.0 - PROB_EPS)
    y = np.asarray(y, dtype=np.float64)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log1p(-p))))


def log_softmax(logits: np.ndarray) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def cross_entropy_from_logits(logits: np.ndarray, y) -> float:
    """Same clamped loss as ``cross_entropy(softmax(logits)[:, 1], y)``, without rounding p first.

    ``log(clamp(p))`` equals ``clip(log p)``, and ``1 - clamp(p1)`` equals
    ``clamp(p0)``, so both terms come straight from the log-softmax. Near
    saturation this keeps full relative precision where ``log1p(-p)`` would not.
    """
    lp = np.clip(log_softmax(logits), np.log(PROB_EPS), np.log1p(-PROB_EPS))
    y = np.asarray(y, dtype=np.float64)
    return float(np.mean(-(y * lp[:, 1] + (1.0 - y) * lp[:, 0])))


def cross_entropy_logit_grad(logits: np.ndarray, y: np.ndarray) -> np.ndarray:
    """d(mean loss)/d(logits) for two-class softmax; zero where the clamp is active."""
    lp = log_softmax(logits)
    log_eps = np.log(PROB_EPS)
    active = (lp[:, 0] > log_eps) & (lp[:, 1] > log_eps)
    g1 = np.where(active, (np.exp(lp[:, 1]) - y) / len(y), 0.0)
    return np.stack([-g1, g1], axis=1)
