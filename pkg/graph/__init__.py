"""Communication digraphs, mixing matrices and their Perron vectors."""

from graph.digraph import Digraph, generate_digraph, is_strongly_connected, matrix_roots
from graph.mixing import (
    AssumptionReport,
    ConvergenceError,
    MixingPair,
    build_mixing_pair,
    check_assumption_one,
    left_perron_vector,
    mixing_pair_from_matrices,
    right_perron_vector,
)
from graph.spectral import NormConstantSuggestion, suggest_norm_constants

__all__ = [
    "AssumptionReport",
    "ConvergenceError",
    "Digraph",
    "MixingPair",
    "NormConstantSuggestion",
    "build_mixing_pair",
    "check_assumption_one",
    "generate_digraph",
    "is_strongly_connected",
    "left_perron_vector",
    "matrix_roots",
    "mixing_pair_from_matrices",
    "right_perron_vector",
    "suggest_norm_constants",
]
