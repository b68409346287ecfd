"""Open set domain adaptation with a closed-form kernel classifier.

The package fits score functions for C known classes plus one unknown
class by combining a weighted squared loss, MMD distribution alignment,
graph-manifold smoothing, a ridge penalty, and an open-set term that
separates unknown-looking targets from the source classes. Pseudo-labels
come from a two-nearest-neighbour ratio rule and are refined iteratively.
"""

from .alignment import (AdaptiveFactorReport, AlignmentMatrices, a_distance,
                        adaptive_factor, combine, marginal_mmd_matrix,
                        mmd_conditional, mmd_marginal, mu_from_distances,
                        projected_mmd)
from .core import (ClassPartition, Hyperparams, LabelAssignment, LabeledDataset,
                   TargetDataset, partition_by_class, stack_features, validate_pair)
from .data import (SyntheticConfig, benchmark_config, benchmark_hyperparams,
                   generate_synthetic, load_features, load_labels, load_source,
                   load_target, save_features)
from .estimator import DAOD, OSNNClassifier
from .exceptions import (DaodError, DegenerateInputError, DimensionMismatchError,
                         EmptyKnownTargetsError, InvalidInputError, NonFiniteError,
                         NumericalError)
from .graph import knn_affinity, laplacian
from .kernels import KernelConfig, cross_kernel, kernel_matrix, median_bandwidth
from .metrics import MetricsReport, open_set_metrics
from .osnn import OsnnDecision, label_targets, osnn_classify
from .risk import RiskReport, empirical_risks, squared_loss
from .solver import (RunReport, SolveInfo, SolveSystem, build_system, daod_fit,
                     objective, predict_scores, predict_targets, solve_beta,
                     solve_beta_info)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveFactorReport", "AlignmentMatrices", "ClassPartition", "DAOD",
    "DaodError", "DegenerateInputError", "DimensionMismatchError",
    "EmptyKnownTargetsError", "Hyperparams", "InvalidInputError", "KernelConfig",
    "LabelAssignment", "LabeledDataset", "MetricsReport", "NonFiniteError",
    "NumericalError", "OSNNClassifier", "OsnnDecision", "RiskReport", "RunReport",
    "SolveInfo", "SolveSystem", "SyntheticConfig", "TargetDataset", "a_distance",
    "adaptive_factor", "benchmark_config", "benchmark_hyperparams", "build_system", "combine",
    "cross_kernel", "daod_fit", "empirical_risks", "generate_synthetic",
    "kernel_matrix", "knn_affinity", "label_targets", "laplacian",
    "load_features", "load_labels", "load_source", "load_target",
    "marginal_mmd_matrix", "median_bandwidth", "mmd_conditional", "mmd_marginal",
    "mu_from_distances", "objective", "open_set_metrics", "osnn_classify",
    "partition_by_class", "predict_scores", "predict_targets", "projected_mmd",
    "save_features", "solve_beta", "solve_beta_info", "squared_loss",
    "stack_features", "validate_pair",
]
