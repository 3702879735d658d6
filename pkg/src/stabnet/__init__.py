"""Multi-scale community detection by greedy Markov-stability optimisation."""

from .analysis import Plateau, SweepRecord, detect_plateaus, nmi, sweep
from .errors import DomainError, GenerationError, ParseError, StabnetError
from .generators import HParams, RBParams, arenas_h, ravasz_barabasi
from .graph import (
    Graph,
    LeafRecord,
    LineGraphMapping,
    Partition,
    line_graph,
    load_edge_list,
    load_gml,
    project_edge_partition,
    prune_leaves,
    reattach_leaves,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .markov import (
    MarkovModel,
    MarkovTimeGrid,
    ScaledAdjacency,
    ScaledAdjacencyCache,
    build_time_grid,
    default_time_grid,
    matrix_exponential_scaled,
    scaled_adjacency,
    stationary_distribution,
    transition_matrix,
)
from .optimize import (
    OptimizationResult,
    OptimizerConfig,
    gso,
    gso_single_time,
    louvain,
    lso,
    msgso,
    refine_vertex_mover,
    rgso,
)
from .stability import (
    CommunityMatrixSet,
    StabilityScore,
    StabilityVector,
    community_matrices,
    delta_stability,
    evaluate_partition,
    merge_communities,
    stability,
    stability_vector,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "Partition",
    "LineGraphMapping",
    "LeafRecord",
    "load_edge_list",
    "load_gml",
    "line_graph",
    "project_edge_partition",
    "prune_leaves",
    "reattach_leaves",
    "MarkovModel",
    "MarkovTimeGrid",
    "ScaledAdjacency",
    "ScaledAdjacencyCache",
    "transition_matrix",
    "stationary_distribution",
    "scaled_adjacency",
    "matrix_exponential_scaled",
    "build_time_grid",
    "default_time_grid",
    "CommunityMatrixSet",
    "StabilityVector",
    "StabilityScore",
    "community_matrices",
    "stability_vector",
    "stability",
    "delta_stability",
    "merge_communities",
    "evaluate_partition",
    "OptimizerConfig",
    "OptimizationResult",
    "gso",
    "gso_single_time",
    "rgso",
    "msgso",
    "louvain",
    "lso",
    "refine_vertex_mover",
    "nmi",
    "sweep",
    "detect_plateaus",
    "SweepRecord",
    "Plateau",
    "RBParams",
    "HParams",
    "ravasz_barabasi",
    "arenas_h",
    "StabnetError",
    "ParseError",
    "DomainError",
    "GenerationError",
    "KERNEL_BACKEND",
    "__version__",
]
