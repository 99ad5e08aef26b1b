"""Fair principal component analysis with an embedded conic ADMM solver.

The package reduces data while keeping protected groups statistically
indistinguishable in the reduced space: the mean constraint bounds the
projected gap between group means, the covariance constraint penalizes the
projected gap between group covariances, and both are expressed as a
semidefinite program solved by the bundled operator-splitting solver.
"""

from ._inner import BACKEND
from .errors import FairPcaError
from .fairness import (
    delta_kernel_svm,
    delta_linear_svm,
    delta_threshold_family,
    fairness_report,
    ks_univariate,
    prop2_bound,
)
from .fpca import (
    FpcaConfig,
    FpcaModel,
    GroupStats,
    build_fpca_sdp,
    build_kernel_fpca_sdp,
    build_pca_sdp,
    extract_components,
    fit,
    group_stats,
    kl_fairness_bound,
    transform,
)
from .kernels import KernelSpec, gram, median_bandwidth
from .sdp import ConeSpec, ConicProgram, NonNeg, Psd, SolverSettings, Zero, solve

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FairPcaError",
    "FpcaConfig",
    "FpcaModel",
    "GroupStats",
    "KernelSpec",
    "ConeSpec",
    "ConicProgram",
    "Zero",
    "NonNeg",
    "Psd",
    "SolverSettings",
    "__version__",
    "build_fpca_sdp",
    "build_kernel_fpca_sdp",
    "build_pca_sdp",
    "delta_kernel_svm",
    "delta_linear_svm",
    "delta_threshold_family",
    "extract_components",
    "fairness_report",
    "fit",
    "gram",
    "group_stats",
    "kl_fairness_bound",
    "ks_univariate",
    "median_bandwidth",
    "prop2_bound",
    "solve",
    "transform",
]
