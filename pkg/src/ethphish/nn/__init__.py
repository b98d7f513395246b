from .layers import (POOLING_MODES, cheb_backward, cheb_forward, chebyshev_basis, classify,
                     cross_entropy, pool, softmax)
from .model import Batch, ChebLayer, ChebNetClassifier, PreparedGraph, prepare
from .optim import Adam
from .spectral import (DegradedEstimateWarning, ScaledOperator, lambda_max, laplacian_from_edges,
                       normalized_laplacian, power_iteration, scale_operator)

__all__ = [
    "POOLING_MODES", "Adam", "Batch", "ChebLayer", "ChebNetClassifier", "DegradedEstimateWarning",
    "PreparedGraph", "ScaledOperator", "cheb_backward", "cheb_forward", "chebyshev_basis",
    "classify", "cross_entropy", "lambda_max", "laplacian_from_edges", "normalized_laplacian",
    "pool", "power_iteration", "prepare", "scale_operator", "softmax",
]
