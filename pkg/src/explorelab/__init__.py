"""Simulation lab for constrained mobile-agent graph exploration."""

from .adversary import (
    AdversaryRun,
    ReplayCursor,
    adversary_behavior,
    check_memory_prefix_equal,
    graph_modification,
)
from .errors import (
    BudgetError,
    InvariantViolation,
    ParameterError,
    PolicyError,
    StructuralError,
)
from .explorers import (
    CautiousBfsPolicy,
    DfsPolicy,
    ExploredView,
    FuelCautiousPolicy,
    make_policy,
)
from .family import (
    FamilyMeta,
    FamilyParams,
    LollipopParams,
    build_family_graph,
    build_lollipop,
    check_eccentricity_properties,
    validate_family_membership,
)
from .graph import (
    EdgeRef,
    LabeledGraph,
    ValidationReport,
    bfs_distance,
    build_regular_bipartite,
    eccentricity,
    konig_edge_coloring,
    validate_consistent_labeling,
)
from .merge import contract_layer_to_bipartite, merge_gadgets, validate_merge_behavior
from .runtime import (
    Instance,
    MemoryRecord,
    Trace,
    execute,
    known_return_distance,
    layer_traversal_stats,
    penalty_before_step,
)
from .surgery import SurgeryResult, move_gadget, switch_edges, switch_ports

__all__ = [
    "AdversaryRun",
    "BudgetError",
    "CautiousBfsPolicy",
    "DfsPolicy",
    "EdgeRef",
    "ExploredView",
    "FamilyMeta",
    "FamilyParams",
    "FuelCautiousPolicy",
    "Instance",
    "InvariantViolation",
    "LabeledGraph",
    "LollipopParams",
    "MemoryRecord",
    "ParameterError",
    "PolicyError",
    "ReplayCursor",
    "StructuralError",
    "SurgeryResult",
    "Trace",
    "ValidationReport",
    "adversary_behavior",
    "bfs_distance",
    "build_family_graph",
    "build_lollipop",
    "build_regular_bipartite",
    "check_eccentricity_properties",
    "check_memory_prefix_equal",
    "contract_layer_to_bipartite",
    "eccentricity",
    "execute",
    "graph_modification",
    "known_return_distance",
    "konig_edge_coloring",
    "layer_traversal_stats",
    "make_policy",
    "merge_gadgets",
    "move_gadget",
    "penalty_before_step",
    "switch_edges",
    "switch_ports",
    "validate_consistent_labeling",
    "validate_family_membership",
    "validate_merge_behavior",
]
