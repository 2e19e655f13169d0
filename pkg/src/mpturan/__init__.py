"""Turan numbers of cliques in multipartite hosts, their extremal
constructions, stable partitions, and a brute-force oracle."""

from .calculus import compute_f, compute_g, compute_tau, l_balance_families, size_gap_eta
from .core import (
    ExtremalWitness,
    IndexPartition,
    MultipartiteGraph,
    PartSizes,
    Pattern,
    Vertex,
    VertexPartition,
    validate,
)
from .errors import TuranError
from .graphs import build_complete, complete_induced, contains_clique, contains_disjoint_cliques, realize_witness
from .oracle import Budget, brute_force_ex, certify_theorem
from .stability import (
    classify,
    internalize,
    is_eps_stable,
    is_stable,
    is_x_eps_stable,
    recover_partition,
    stabilize,
    verify_characterization,
)
from .symmetrize import common_neighbors, shift, symmetrize_class

__all__ = [
    "Budget",
    "ExtremalWitness",
    "IndexPartition",
    "MultipartiteGraph",
    "PartSizes",
    "Pattern",
    "TuranError",
    "Vertex",
    "VertexPartition",
    "brute_force_ex",
    "build_complete",
    "certify_theorem",
    "classify",
    "common_neighbors",
    "complete_induced",
    "compute_f",
    "compute_g",
    "compute_tau",
    "contains_clique",
    "contains_disjoint_cliques",
    "internalize",
    "is_eps_stable",
    "is_stable",
    "is_x_eps_stable",
    "l_balance_families",
    "realize_witness",
    "recover_partition",
    "shift",
    "size_gap_eta",
    "stabilize",
    "symmetrize_class",
    "validate",
]
