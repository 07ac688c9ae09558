"""Spectral community detection on sparse hypergraph stochastic block models."""

from ._core import (
    Hypergraph,
    ModelParams,
    adjacency_triplets,
    binom_pois_tv,
    bfs_profile,
    canonical_form_of_neighborhood,
    circuit_count,
    derive_rates,
    detect,
    hypergraph_from_json,
    hypergraph_to_json,
    martingale_stats,
    recommended_depth,
    sample_hsbm,
    saw_matrix,
    saw_matrix_dense,
    thresholding_statistic,
    type_probabilities,
)

__all__ = [
    "Hypergraph",
    "ModelParams",
    "adjacency_triplets",
    "binom_pois_tv",
    "bfs_profile",
    "canonical_form_of_neighborhood",
    "circuit_count",
    "derive_rates",
    "detect",
    "hypergraph_from_json",
    "hypergraph_to_json",
    "martingale_stats",
    "recommended_depth",
    "sample_hsbm",
    "saw_matrix",
    "saw_matrix_dense",
    "thresholding_statistic",
    "type_probabilities",
]
