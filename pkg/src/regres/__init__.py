"""Random regular graphs at desk scale: uniform samplers, edge switchings,
sparse expander extraction, rotation-extension Hamiltonicity, and
bounded-degree deletion adversaries with checkable certificates.
"""

from .adversary import (
    AdversaryDeletion,
    AttackNotFound,
    CutPartition,
    SwitchingConfigurationPlan,
    UnbalancedBipartite,
    apply_out_switching,
    enumerate_out_switchings,
    exact_max_cut,
    half_set_density_probe,
    intra_cut_deletion,
    local_max_cut,
    maxcut_eps_adversary,
    random_bounded_adversary,
    unbalanced_cut_attack,
    verify_unbalanced_certificate,
)
from .config_model import (
    Configuration,
    PointSet,
    RejectionBudgetExceeded,
    SwitchPlan,
    algorithm_A_step,
    algorithm_A_support,
    algorithm_B_distribution,
    algorithm_B_step,
    apply_switch,
    default_sigma,
    expected_simple_rate,
    hybrid_sample_configuration,
    is_simple,
    project,
    sample_configuration_sequential,
    sample_regular_pairing,
    sample_simple_with_remainder,
)
from .expander import (
    ExpanderVerdict,
    ExpansionParams,
    SparseExpanderResult,
    ThinRetry,
    build_sparse_expander,
    check_three_expander,
    patch_connectivity,
    thin_random_subgraph,
)
from .graphs import (
    DegreeSequence,
    Graph,
    MultiGraph,
    connected_components,
    edge_count_between,
    is_connected,
    is_in_H_alpha,
    neighborhood,
    read_edgelist,
    subtract,
    two_coloring,
    union,
    write_edgelist,
)
from .hamiltonicity import (
    Booster,
    BoosterRun,
    Path,
    RotationState,
    booster_iteration,
    exact_hamiltonian,
    exact_longest_path,
    find_booster_pairs,
    is_booster,
    is_hamilton_cycle,
    rotate,
    rotation_closure,
    rotation_extension_solver,
)
from .rng import derive_seed, make_rng, spawn

__version__ = "0.1.0"
