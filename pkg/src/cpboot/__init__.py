"""Bootstrap changepoint detection and the interval-length changepoint test."""

from .bootstrap import (
    BootstrapConfig,
    BootstrapDistribution,
    ConfidenceInterval,
    bootstrap_changepoint_distribution,
    empirical_quantile,
    lambda_distribution,
    percentile_interval,
    resample_pairs,
)
from .nulls import DeltaEstimate, demean_null, estimate_delta, permute_null
from .power import (
    PowerCurve,
    TestConfig,
    TestReport,
    ci_length_test,
    generate_amoc,
    power_curve,
    power_estimate,
    simulate_power,
)
from .rng import Stream
from .scan import (
    ScanResult,
    SegmentFit,
    fit_segment,
    gaussian_loglik,
    lrt_statistic_at,
    scan_changepoint,
)
from .series import Kind, SeriesError, SeriesProvenance, TimeSeries, load_csv, validate, write_csv

__version__ = "0.1.0"
