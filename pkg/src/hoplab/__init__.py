"""hoplab: linear Hopfield networks with random couplings, simulated at finite
size and sampled exactly in their Gaussian mean-field limit, with combinatorial
and statistical verification of the limit claims."""

__version__ = "0.1.0"

from .errors import CapacityError, ConfigError, DomainError, HoplabError, NumericalError
from .laws import EntryLaw, InitialLaw, SeedSpec, moment, sample_initial, sample_matrix
from .limits import (
    CovarianceGrid,
    LimitParams,
    LimitPaths,
    drift_cov,
    fluctuation_cov,
    increment_cov,
    limit_params_for,
    noise_fluctuation_cov,
    noise_fluctuation_var,
    noise_kernel,
    noise_kernel_energy,
    ou_cov,
    potential_cov,
    potential_cov_with_noise,
    sample_fluctuation,
    sample_limit_paths,
)
from .network import (
    ModelParams,
    TimeGrid,
    TrajectoryEnsemble,
    evolve_noiseless,
    evolve_noisy,
    matrix_action_exp,
    run_ensemble,
)
from .special import SeriesTolerance, double_factorial, i0, i0m1
from .stats import (
    IncrementReport,
    MomentEstimate,
    TestReport,
    cross_corr,
    cross_cov,
    estimate_cov,
    estimate_moment,
    growth_slope,
    increment_correlation,
    ks_gaussian,
)
from .words import (
    WeightScanReport,
    canonicalize,
    count_equivalents,
    enumerate_w,
    exact_moment,
    exact_moment_via_classes,
    limit_moment,
    max_weight_report,
)

__all__ = [
    "CapacityError",
    "ConfigError",
    "CovarianceGrid",
    "DomainError",
    "EntryLaw",
    "HoplabError",
    "IncrementReport",
    "InitialLaw",
    "LimitParams",
    "LimitPaths",
    "ModelParams",
    "MomentEstimate",
    "NumericalError",
    "SeedSpec",
    "SeriesTolerance",
    "TestReport",
    "TimeGrid",
    "TrajectoryEnsemble",
    "WeightScanReport",
    "canonicalize",
    "count_equivalents",
    "cross_corr",
    "cross_cov",
    "double_factorial",
    "drift_cov",
    "enumerate_w",
    "estimate_cov",
    "estimate_moment",
    "evolve_noiseless",
    "evolve_noisy",
    "exact_moment",
    "exact_moment_via_classes",
    "fluctuation_cov",
    "growth_slope",
    "i0",
    "i0m1",
    "increment_correlation",
    "increment_cov",
    "ks_gaussian",
    "limit_moment",
    "limit_params_for",
    "matrix_action_exp",
    "max_weight_report",
    "moment",
    "noise_fluctuation_cov",
    "noise_fluctuation_var",
    "noise_kernel",
    "noise_kernel_energy",
    "ou_cov",
    "potential_cov",
    "potential_cov_with_noise",
    "run_ensemble",
    "sample_fluctuation",
    "sample_initial",
    "sample_limit_paths",
    "sample_matrix",
]
