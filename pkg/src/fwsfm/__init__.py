"""Minimum-norm points via Wolfe's algorithm and exact submodular minimization."""

from .affine import AffineSolution, DegenerateSetError, IncrementalAffine, affine_minimizer
from .functions import (CutOracle, WeightedGraph, concave_cardinality_oracle, cut_oracle,
                        iwata_oracle, modular_oracle, path_instance, random_concave_instance,
                        random_cut_instance, table_oracle)
from .oracle import (BasePolytope, SubmodularOracle, Vertex, VertexPolytope, compute_F,
                     greedy_lo, verify_membership)
from .sfm import SfmResult, edmonds_lower_bound, minimize, prefix_sweep, robust_round
from .verify import brute_min, check_submodular, known_minnorm_cases
from .wolfe import WolfeResult, run, trace_violations

__all__ = [
    "AffineSolution", "BasePolytope", "CutOracle", "DegenerateSetError", "IncrementalAffine",
    "SfmResult", "SubmodularOracle", "Vertex", "VertexPolytope", "WeightedGraph",
    "WolfeResult", "affine_minimizer", "brute_min", "check_submodular", "compute_F",
    "concave_cardinality_oracle", "cut_oracle", "edmonds_lower_bound", "greedy_lo",
    "iwata_oracle", "known_minnorm_cases", "minimize", "modular_oracle", "path_instance",
    "prefix_sweep", "random_concave_instance", "random_cut_instance", "robust_round", "run",
    "table_oracle", "trace_violations", "verify_membership",
]
