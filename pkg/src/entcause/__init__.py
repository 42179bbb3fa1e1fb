"""Entropic causal inference over categorical variables.

Greedy minimum-entropy couplings, pairwise direction oracles, source
peeling, entropic enumeration over skeleton orientations, a discrete
additive-noise baseline, synthetic and semi-synthetic data generation, and
an experiment harness with deterministic seeding.
"""

from .bifio import BayesNet, bn_sample, bn_truth, parse_bif, read_bif
from .citest import CiResult, dsep_ci, g_test_ci
from .coupling import Coupling, bruteforce_coupling, greedy_coupling, mec
from .discovery import (
    DiscoveryConfig,
    OracleVerdict,
    PeelResult,
    TruthOracle,
    anm_baseline,
    enumerate_discover,
    mec_oracle,
    peel,
    peel_with_stats,
    percentile,
    percentile_from_counts,
)
from .errors import (
    BifParseError,
    CapacityError,
    ConvergenceFailureError,
    DataFormatError,
    EntcauseError,
    InsufficientDataError,
    InvalidParameterError,
    TargetUnreachableError,
    TooManyOrientationsError,
    UnsupportedSizeError,
)
from .experiments import (
    ExperimentConfig,
    ResultRecord,
    load_config,
    plot,
    run_experiment,
    write_results,
)
from .graphs import (
    Coloring,
    Dag,
    Skeleton,
    complete_graph,
    d_separated,
    dag_from_json,
    dag_to_json,
    diamond_graph,
    enumerate_orientations,
    g1_graph,
    g2_graph,
    g3_graph,
    hall_graph,
    line_graph,
    named_graph,
    orientation_bits,
    random_dag,
    rf_graph_decomposition,
    sample_orientations,
    shd,
    skeleton_from_json,
    skeleton_to_json,
    topological_order,
    triangle_graph,
)
from .probcore import (
    Categorical,
    Dataset,
    JointTable,
    dirichlet_sample,
    empirical_conditionals,
    entropy,
    entropy_targeted_dirichlet,
    joint_conditionals,
    make_rng,
    stable_seed,
)
from .scm import (
    HES_TARGET_BITS,
    NoiseSpec,
    Scm,
    anm_scm,
    exact_joint,
    random_scm,
    sample,
    scm_from_json,
    scm_to_json,
    support_check,
)

__version__ = "0.1.0"

__all__ = [
    "BayesNet", "bn_sample", "bn_truth", "parse_bif", "read_bif",
    "CiResult", "dsep_ci", "g_test_ci",
    "Coupling", "bruteforce_coupling", "greedy_coupling", "mec",
    "DiscoveryConfig", "OracleVerdict", "PeelResult", "TruthOracle",
    "anm_baseline", "enumerate_discover", "mec_oracle", "peel",
    "peel_with_stats", "percentile", "percentile_from_counts",
    "BifParseError", "CapacityError", "ConvergenceFailureError",
    "DataFormatError", "EntcauseError", "InsufficientDataError",
    "InvalidParameterError", "TargetUnreachableError",
    "TooManyOrientationsError", "UnsupportedSizeError",
    "ExperimentConfig", "ResultRecord", "load_config", "plot",
    "run_experiment", "write_results",
    "Coloring", "Dag", "Skeleton", "complete_graph", "d_separated",
    "dag_from_json", "dag_to_json", "diamond_graph",
    "enumerate_orientations", "g1_graph", "g2_graph", "g3_graph", "hall_graph",
    "line_graph", "named_graph", "orientation_bits", "random_dag",
    "rf_graph_decomposition", "sample_orientations", "shd",
    "skeleton_from_json", "skeleton_to_json", "topological_order",
    "triangle_graph",
    "Categorical", "Dataset", "JointTable", "dirichlet_sample",
    "empirical_conditionals", "entropy", "entropy_targeted_dirichlet",
    "joint_conditionals", "make_rng", "stable_seed",
    "HES_TARGET_BITS", "NoiseSpec", "Scm", "anm_scm", "exact_joint",
    "random_scm", "sample", "scm_from_json", "scm_to_json", "support_check",
    "__version__",
]
