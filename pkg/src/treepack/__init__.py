"""treepack: packing spanning trees, terminal trees and connectors.

Library surface, by layer: `graphcore` (multigraphs, cuts, splitting-off,
reduction), `matroid` (graphic/hypergraphic oracles, k-fold union,
exchanges), `fractional` (exact-rational polytope checks and rounding),
`packing` (pipelines, verifier, exhaustive oracle), `generate` (seeded
instance models), `cli` (command-line front end).
"""

from .errors import (
    CapacityError,
    GenerationFailureError,
    InstanceParseError,
    InternalInvariantError,
    InvalidArgumentError,
    PreconditionViolationError,
    TreepackError,
)
from .graphcore import (
    Multigraph,
    SplitTrace,
    isolate_even_nonterminal,
    mader_split,
    min_cut,
    parse_instance,
    reduce_instance,
    serialize_instance,
    split_off,
    steiner_connectivity,
    steiner_min_cut,
)
from .matroid import (
    Hypergraph,
    HypergraphicMatroid,
    Matroid,
    Partition,
    UnionBasisFamily,
    adjust_union,
    graphic_independent,
    graphic_matroid,
    hypergraphic_independent,
    hypergraphic_rank,
    iter_partitions,
    pack_bases,
    parse_hypergraph,
    rank_by_partitions,
    serialize_hypergraph,
    serialize_partition,
    serialize_representatives,
    union_rank,
)
from .fractional import (
    ConstraintFamily,
    check_fractional_union_basis,
    check_polytope_membership,
    iter_bases,
    kls_round,
    parse_vector,
    serialize_vector,
)
from .packing import (
    Certificate,
    Packing,
    PackResult,
    Thresholds,
    brute_force_pack,
    build_steiner_hypergraph,
    pack_connectors,
    pack_spanning_trees,
    pack_steiner_trees,
    parse_packing,
    serialize_packing,
    threshold_value,
    verify_packing,
)
from .generate import GeneratedInstance, generate

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
