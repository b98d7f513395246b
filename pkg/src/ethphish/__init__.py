"""Phishing-account detection on Ethereum transaction graphs with a Chebyshev graph network."""

from .graph import TransactionGraph
from .ingest import TransactionRecord, build_graph, parse_labels, parse_transactions
from .lightweight import RescaleConfig, first_order_neighborhood, lighten, random_walk_rescale
from .sampler import AccountSubgraph, SamplingStrategy, build_dataset, compute_k

__version__ = "0.1.0"

__all__ = [
    "AccountSubgraph", "RescaleConfig", "SamplingStrategy", "TransactionGraph",
    "TransactionRecord", "build_dataset", "build_graph", "compute_k", "first_order_neighborhood",
    "lighten", "parse_labels", "parse_transactions", "random_walk_rescale",
]
