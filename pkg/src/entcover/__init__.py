"""Minimum-entropy covers of polymatroids: greedy solver with full
trace, exact desk-scale optima, flow-based covering coefficients, and a
constructive spanning-tree certificate.
"""

from .core import (LOG2E, Cover, Distribution, GroundSet, PolymatroidOracle,
                   check_polymatroid, entropy, entropy_from_weight, iter_bits,
                   popcount, validate_cover, weight_product)
from .exact import GUARD_MSG, Optimum, exact_assignment_mesc, exact_cover, \
    exact_mest, exact_mest_entropy, exact_orientation
from .flow import (BoundReport, FlowNetwork, FlowResult, approximation_bound,
                   build_alpha_network, check_assignment, extract_assignment,
                   max_flow, min_alpha)
from .greedy import (CoefficientTable, GreedyTrace, coefficients, run_greedy,
                     specialized_coefficients)
from .instances import (GadgetRoles, GraphInstance, OrientationSolution,
                        SetCoverInstance, TreeCoverSolution,
                        complete_mest_solution, generate_random,
                        hardness_gadget, mesc_oracle, meo_oracle, mest_oracle,
                        parse_instance, reduction_entropy_relation,
                        serialize_instance)
from .certify import (MultiLevelFlow, PathOrdering, TreeMove, apply_move,
                      check_admissible, flow_respects_capacities,
                      is_spanning_tree, transform_tree, verify_beta_one)

__version__ = "0.1.0"

__all__ = [
    "LOG2E", "GroundSet", "PolymatroidOracle", "Cover", "Distribution",
    "entropy", "entropy_from_weight", "weight_product", "popcount",
    "iter_bits", "validate_cover", "check_polymatroid",
    "SetCoverInstance", "GraphInstance", "OrientationSolution",
    "TreeCoverSolution", "GadgetRoles", "mesc_oracle", "meo_oracle",
    "mest_oracle", "complete_mest_solution", "hardness_gadget",
    "reduction_entropy_relation", "serialize_instance", "parse_instance",
    "generate_random",
    "GreedyTrace", "CoefficientTable", "run_greedy", "coefficients",
    "specialized_coefficients",
    "GUARD_MSG", "Optimum", "exact_cover", "exact_assignment_mesc",
    "exact_orientation", "exact_mest", "exact_mest_entropy",
    "FlowNetwork", "FlowResult", "max_flow", "build_alpha_network",
    "extract_assignment", "check_assignment", "min_alpha", "BoundReport",
    "approximation_bound",
    "TreeMove", "MultiLevelFlow", "PathOrdering", "apply_move",
    "is_spanning_tree", "transform_tree", "check_admissible",
    "flow_respects_capacities", "verify_beta_one",
    "__version__",
]
