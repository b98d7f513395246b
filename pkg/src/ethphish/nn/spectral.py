"""Graph operators for the Chebyshev filter: normalized Laplacian, its top eigenvalue, rescaling."""

from __future__ import annotations

import warnings
from typing import NamedTuple

import numpy as np
from scipy import sparse
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.sparse.linalg import splu

from ..errors import ConfigError, GraphError

WEIGHT_TRANSFORMS = ("log1p", "raw")
LAPLACIAN_BOUND = 2.0
SHIFT_MARGIN = 1e-6
DENSE_LIMIT = 600


class DegradedEstimateWarning(RuntimeWarning):
    """Power iteration hit its iteration cap before the stopping rule fired."""


class PowerIterationResult(NamedTuple):
    value: float
    iterations: int
    converged: bool


class ScaledOperator(NamedTuple):
    matrix: sparse.csr_matrix
    lambda_max: float
    substituted: bool = False


def edge_weights(sub, amount_transform: str = "log1p") -> np.ndarray:
    """Weights fed to the adjacency: counts as-is, amounts through ``log1p`` by default."""
    if amount_transform not in WEIGHT_TRANSFORMS:
        raise ConfigError(f"amount_transform must be one of {WEIGHT_TRANSFORMS}")
    w = np.asarray(sub.weights, dtype=np.float64)
    if sub.weight_attribute == "a" and amount_transform == "log1p":
        w = np.log1p(w)
    return w


def laplacian_from_edges(n: int, src, dst, weights) -> sparse.csr_matrix:
    """``I - D^-1/2 (W + W^T) D^-1/2``; isolated nodes keep a unit diagonal."""
    if n < 1:
        raise GraphError("Laplacian of an empty graph")
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise GraphError("edge weights must be finite and non-negative")
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    w = sparse.coo_matrix((weights, (src, dst)), shape=(n, n)).tocsr()
    w_sym = (w + w.T).tocsr()
    w_sym.setdiag(0)
    w_sym.eliminate_zeros()
    deg = np.asarray(w_sym.sum(axis=1)).ravel()
    inv_sqrt = np.zeros(n)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    d = sparse.diags(inv_sqrt)
    lap = (sparse.identity(n, format="csr") - d @ w_sym @ d).tocsr()
    lap.sum_duplicates()
    lap.sort_indices()
    return lap


def normalized_laplacian(sub, direction_mode: str | None = None,
                         amount_transform: str = "log1p") -> sparse.csr_matrix:
    """Normalized Laplacian of a subgraph's symmetrized weighted adjacency.

    Edge weights are transformed per directed edge, then symmetrized as
    ``W + W^T``, so a pair traded both ways gets the sum of both directions.
    ``direction_mode`` is accepted for interface symmetry and only checked;
    the operator is symmetric in either mode.
    """
    if direction_mode is not None and direction_mode not in ("directed", "undirected"):
        raise ConfigError(f"unknown direction_mode {direction_mode!r}")
    return laplacian_from_edges(sub.n_nodes, sub.src, sub.dst, edge_weights(sub, amount_transform))


def hashed_start(keys) -> np.ndarray:
    """Deterministic start vector in [0.5, 1.5) derived from integer keys (splitmix64)."""
    z = np.asarray(keys, dtype=np.uint64) + np.uint64(0x9E3779B97F4A7C15)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return 0.5 + (z >> np.uint64(11)).astype(np.float64) / float(1 << 53)


def _factor(lap, shift):
    """Solver for ``(shift*I - lap) y = v``; raises LinAlgError unless ``shift > lambda_max``."""
    n = lap.shape[0]
    if n > DENSE_LIMIT and sparse.issparse(lap):
        shifted = (shift * sparse.identity(n, format="csc") - lap).tocsc()
        try:
            lu = splu(shifted, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                      options={"SymmetricMode": True})
        except RuntimeError as exc:
            raise LinAlgError(str(exc)) from None
        if np.any(lu.U.diagonal() <= 0):
            raise LinAlgError("shift does not exceed the largest eigenvalue")
        return lu.solve
    shifted = shift * np.eye(n) - (lap.toarray() if sparse.issparse(lap) else np.asarray(lap))
    factor = cho_factor(shifted)  # positive definite iff shift > lambda_max
    return lambda v: cho_solve(factor, v)


def power_iteration(lap, tol: float = 1e-8, max_iters: int = 1000,
                    start: np.ndarray | None = None,
                    shift: float | None = None) -> PowerIterationResult:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Without ``shift`` this is the plain iteration on ``lap``: the Rayleigh
    quotient is returned once two successive estimates differ by less than
    ``tol``.

    With ``shift`` (which must exceed the largest eigenvalue) the iteration
    runs on ``(shift*I - lap)^-1``. Every successful Cholesky factorization
    proves its shift is an upper bound, and every Rayleigh quotient is a lower
    bound, so after each step the shift is pulled down to ``quotient +
    residual`` whenever that still factorizes. This speeds convergence up
    sharply and the loop stops once the certified bracket is narrower than
    ``tol``. Either way ``converged=False`` means ``max_iters`` ran out.
    """
    n = lap.shape[0]
    x = hashed_start(np.arange(n)) if start is None else np.asarray(start, dtype=np.float64).copy()
    x /= np.linalg.norm(x)
    solve = None if shift is None else _factor(lap, shift)
    prev = None
    est = 0.0
    for it in range(1, max_iters + 1):
        lx = lap @ x
        est = float(x @ lx)
        if solve is None:
            if prev is not None and abs(est - prev) < tol:
                return PowerIterationResult(est, it, True)
            y = lx
        else:
            if shift - est < tol:
                return PowerIterationResult(est, it, True)
            candidate = est + float(np.linalg.norm(lx - est * x)) + 0.25 * tol
            if candidate < shift:
                try:
                    solve, shift = _factor(lap, candidate), candidate
                except LinAlgError:
                    pass
            y = solve(x)
        prev = est
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return PowerIterationResult(0.0, it, True)
        x = y / norm
    return PowerIterationResult(est, max_iters, False)


def lambda_max(lap, tol: float = 1e-8, max_iters: int = 1000,
               start: np.ndarray | None = None,
               spectral_bound: float | None = LAPLACIAN_BOUND) -> float:
    """Top eigenvalue of a normalized Laplacian (or any PSD matrix with ``spectral_bound=None``).

    ``spectral_bound`` is a known upper limit on the spectrum (2 for the
    normalized Laplacian); the iteration is shifted just above it. If the
    bound turns out to be violated the plain iteration is used instead.
    """
    res = None
    if spectral_bound is not None:
        try:
            res = power_iteration(lap, tol, max_iters, start, shift=spectral_bound + SHIFT_MARGIN)
        except LinAlgError:
            res = None
    if res is None:
        res = power_iteration(lap, tol, max_iters, start)
    if not res.converged:
        warnings.warn(f"power iteration stopped after {res.iterations} steps; "
                      f"using estimate {res.value:.10g}", DegradedEstimateWarning, stacklevel=2)
    return res.value


def scale_operator(lap, lam: float) -> ScaledOperator:
    """``2 L / lam - I``; a non-positive ``lam`` is replaced by 2, the Laplacian's spectral bound."""
    substituted = not lam > 0
    if substituted:
        warnings.warn(f"lambda_max={lam!r} is not positive; substituting 2.0",
                      DegradedEstimateWarning, stacklevel=2)
        lam = 2.0
    n = lap.shape[0]
    mat = (lap * (2.0 / lam) - sparse.identity(n, format="csr")).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return ScaledOperator(mat, float(lam), substituted)
