"""Chatterjee's rank correlation with m-out-of-n bootstrap inference."""

__version__ = "0.1.0"

from .core import PairedSample, RankProfile, compute_ranks, xi, xi_no_ties, xi_with_ties
from .exceptions import ConfigMismatchError, DegeneracyExhaustedError, DegenerateSampleError, InvalidInputError
from .metrics import EmpiricalDistribution, kolmogorov_distance, kolmogorov_to_normal, wasserstein_p
from .resampling import (
    BootstrapConfig,
    BootstrapDistribution,
    BootstrapEstimate,
    bootstrap_distribution,
    bootstrap_variance,
    confidence_interval,
    draw_subsample,
    is_degenerate,
)
from .selection import BickelSakov, Cluster, FixedPower, SelectionTrace, candidate_ms, select_m
from .simulation import (
    CalibrationResult,
    Gaussian,
    PoissonMixture,
    StudentT,
    StudyConfig,
    StudyReport,
    calibrate_truth,
    generate_sample,
    run_study,
    tau_from_rho,
)
