"""Adaptive bandwidth selection for kernel moment estimators of locally stationary time series."""

from .errors import (
    ConfigError,
    FailureBudgetError,
    InfeasibleBandwidthError,
    StationarityError,
    TvbandError,
    ZeroMassError,
)
from .kernels import (
    Kernel,
    KernelConstants,
    TruncatedKernel,
    constants,
    epanechnikov,
    get_kernel,
    register_kernel,
    scaled_eval,
    truncated_eval,
)
from .processes import (
    CoefficientCurve,
    GroundTruth,
    StationaryPath,
    TimeSeriesPath,
    closed_form_ground_truth,
    get_curve,
    innovation_rng,
    mc_ground_truth,
    simulate_stationary,
    simulate_tvar,
    sin_full,
    sin_scaled,
    step,
    true_char_function,
    true_correlation,
    true_covariance,
)
from .moments import (
    Composition,
    EstimateCurve,
    MomentFunctional,
    char_cos,
    covariance_lag,
    estimate_curve,
    estimate_leaveout,
    estimate_normalized,
    estimate_raw,
    evaluate_series,
    indicator_le,
    lagged_eval,
    lagged_square,
    mean_functional,
    ratio_composition,
    identity_composition,
    stack,
)

__version__ = "0.1.0"
