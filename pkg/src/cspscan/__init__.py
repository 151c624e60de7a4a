"""cspscan: analysis of finite constraint networks.

Consistency levels (k, relational, adaptive), constraint tightness,
tree and row convexity, solution-preserving enforcement, and the
guarantee engine that ties local properties to global consistency.
"""

from .consistency import (
    ConsistencyVerdict,
    Witness,
    enforce_k_consistency,
    enforce_relational_m_consistency,
    is_globally_consistent,
    is_k_consistent,
    is_k_consistent_via_lifting,
    is_relationally_m_consistent,
    is_strongly_k_consistent,
    is_strongly_relationally_m_consistent,
)
from .convexity import (
    ConvexityVerdict,
    find_convexity_tree,
    is_tree_convex_constraint,
    is_tree_convex_network,
)
from .engine import AnalysisReport, GuaranteeLine, analyze
from .errors import (
    CapabilityError,
    CspscanError,
    InputError,
    NetworkFormatError,
    SoundnessError,
    UnconstrainedVariableError,
)
from .model import (
    Constraint,
    ConstraintNetwork,
    Variable,
    enumerate_instantiations,
    extension_set,
    is_consistent_instantiation,
    relevant_constraints,
    solutions,
)
from .netfile import format_network, parse_file, parse_network
from .ordered import (
    AdaptiveVerdict,
    OrderedNetworkView,
    SearchTrace,
    backtrack_free_solve,
    backtracking_solve,
    dr_consistent_on,
    enforce_adaptive_consistency,
    enforce_dually_adaptive,
    is_adaptively_consistent,
    is_dually_adaptively_consistent,
    tightest_dr_constraint,
    width,
)
from .tightness import (
    ConstraintTightness,
    TightnessReport,
    WeakTightnessVerdict,
    complete_with_universal_binaries,
    constraint_tightness,
    is_properly_m_tight,
    is_weakly_m_tight,
    minimum_tight_count,
    tightness_report,
    weak_tightness_sufficient_by_degree,
)
from .valuetree import (
    SmallSetIntersection,
    SubtreeWitness,
    ValueTree,
    find_tree_for_family,
    is_subtree,
    labeled_trees,
    pairwise_nonempty,
    small_set_family_intersection,
    subtree_intersection,
    subtree_root,
    total_order_tree,
    tree_convex_family_intersection,
    tree_from_edges,
)

__version__ = "0.1.0"
