"""Record statistics for stationary dependent sequences.

The package computes exact (closed-form) and simulated record laws for
sequences whose dependence is a Gaussian copula: the probability that an
observation is a record, the law of record values and arrival times,
joint and multivariate (complete) record events, and the asymptotic
regime governed by the extremal index.  Exact results reduce to Gaussian
orthant probabilities evaluated by randomized quasi-Monte Carlo, so every
returned value carries an error estimate.  Simulation utilities provide
an independent Monte-Carlo check of the same quantities.

Entry points are re-exported here; each submodule documents the
mathematics it implements:

``models``
    correlation structures for the Gaussian copula (temporal and
    cross-sectional).
``records``
    exact univariate record laws (probabilities, CDFs, arrival times,
    increments, expected counts).
``multivariate``
    complete records of vector sequences.
``asymptotic``
    extremal indices and limit laws for records of long sequences.
``simulate``
    path simulation and empirical record statistics.
``mvn`` / ``csn``
    the underlying multivariate normal and closed skew-normal engines.
"""

from .asymptotic import (
    ExtremalIndex,
    GevSpec,
    asymptotic_record_prob,
    chernick_theta,
    gaussian_norming,
    gev_cdf,
    hsing_theta,
    stable_ma_theta,
)
from .csn import CsnParams, csn_affine, csn_cdf, csn_pdf, csn_sample
from .errors import (
    AcceptanceTooLow,
    AllZeroCoefficients,
    DegenerateNormalization,
    DimensionCap,
    InsufficientExceedances,
    InvalidDeltaMatrix,
    InvalidTimes,
    MissingDelta,
    NotPositiveDefinite,
    RecordLabError,
    SubsetExplosion,
    TailNotConverged,
    ValidationError,
)
from .models import CorrelationModel, CrossCorrelationModel
from .multivariate import (
    complete_record_cdf,
    complete_record_probability,
    joint_complete_record_cdf,
    joint_complete_record_prob,
)
from .mvn import MvnProblem, MvnResult, bvn_cdf, mvn_cdf, mvn_sample, orthant
from .records import (
    ExpectedRecords,
    GammaConstruction,
    RecordLaw,
    SeriesResult,
    TailPolicy,
    arrival_times_joint,
    consecutive_joint_record_cdf,
    consecutive_joint_record_prob,
    expected_records,
    first_increment_cdf,
    gamma_multi,
    gamma_single,
    joint_record_cdf,
    joint_record_marginals,
    joint_record_prob,
    record_probability,
    record_value_cdf,
    second_increment_cdf,
    second_record_time_pmf,
)
from .simulate import (
    ChernickProcess,
    EmpiricalRecordStats,
    Process,
    SimStudy,
    StableMaProcess,
    empirical_extremal_index,
    sample_stable,
    simulate_chernick,
    simulate_records,
    simulate_stable_ma,
)

__version__ = "0.1.0"

__all__ = [
    "AcceptanceTooLow",
    "AllZeroCoefficients",
    "ChernickProcess",
    "CorrelationModel",
    "CrossCorrelationModel",
    "CsnParams",
    "DegenerateNormalization",
    "DimensionCap",
    "EmpiricalRecordStats",
    "ExpectedRecords",
    "ExtremalIndex",
    "GammaConstruction",
    "GevSpec",
    "InsufficientExceedances",
    "InvalidDeltaMatrix",
    "InvalidTimes",
    "MissingDelta",
    "MvnProblem",
    "MvnResult",
    "NotPositiveDefinite",
    "Process",
    "RecordLabError",
    "RecordLaw",
    "SeriesResult",
    "SimStudy",
    "StableMaProcess",
    "SubsetExplosion",
    "TailNotConverged",
    "TailPolicy",
    "ValidationError",
    "arrival_times_joint",
    "asymptotic_record_prob",
    "bvn_cdf",
    "chernick_theta",
    "complete_record_cdf",
    "complete_record_probability",
    "consecutive_joint_record_cdf",
    "consecutive_joint_record_prob",
    "csn_affine",
    "csn_cdf",
    "csn_pdf",
    "csn_sample",
    "empirical_extremal_index",
    "expected_records",
    "first_increment_cdf",
    "gamma_multi",
    "gamma_single",
    "gaussian_norming",
    "gev_cdf",
    "hsing_theta",
    "joint_complete_record_cdf",
    "joint_complete_record_prob",
    "joint_record_cdf",
    "joint_record_marginals",
    "joint_record_prob",
    "mvn_cdf",
    "mvn_sample",
    "orthant",
    "record_probability",
    "record_value_cdf",
    "sample_stable",
    "second_increment_cdf",
    "second_record_time_pmf",
    "simulate_chernick",
    "simulate_records",
    "simulate_stable_ma",
    "stable_ma_theta",
]
