"""Pair bootstrap of the changepoint estimate and percentile interval lengths."""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .parallel import pmap
from .rng import Stream, as_stream
from .scan import scan_changepoint, weighted_changepoints
from .series import Kind, SeriesProvenance, TimeSeries, validate

MAX_REDRAWS = 1000


@dataclass(frozen=True)
class BootstrapConfig:
    b_inner: int = 1000
    r_outer: int = 200
    alpha_ci: float = 0.05
    seed: int = 0
    min_segment: int = 3
    # execution only, never changes results
    workers: int = 1

    def __post_init__(self):
        if self.b_inner < 2:
            raise ValueError(f"b_inner must be >= 2, got {self.b_inner}")
        if self.r_outer < 2:
            raise ValueError(f"r_outer must be >= 2, got {self.r_outer}")
        if not 0.0 < self.alpha_ci < 1.0:
            raise ValueError(f"alpha_ci must lie in (0, 1), got {self.alpha_ci}")
        if self.min_segment < 1:
            raise ValueError(f"min_segment must be positive, got {self.min_segment}")

    def stream(self, rng=None) -> Stream:
        return as_stream(self.seed if rng is None else rng)


@dataclass(frozen=True, eq=False)
class BootstrapDistribution:
    values: np.ndarray  # sorted bootstrap changepoints, original 1-based indexing
    n: int
    min_segment: int

    def __len__(self):
        return int(self.values.size)


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float

    @property
    def length(self) -> float:
        return self.upper - self.lower


def empirical_quantile(values, p: float) -> float:
    """Quantile with linear interpolation between order statistics.

    With sorted ``v_1..v_B`` and ``h = (B - 1) p + 1``,
    ``Q(p) = v_floor(h) + (h - floor(h)) (v_floor(h)+1 - v_floor(h))``.
    """
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if v.size == 0:
        raise ValueError("quantile of an empty sample")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    h = (v.size - 1) * p + 1.0
    lo = int(np.floor(h))
    if lo >= v.size:
        return float(v[-1])
    return float(v[lo - 1] + (h - lo) * (v[lo] - v[lo - 1]))


def resample_pairs(series: TimeSeries, rng=None) -> TimeSeries:
    """Draw ``n`` pairs with replacement and put them back in time order.

    Pairs are never split. Drawn indices are sorted, which orders the pairs
    by ``t`` and keeps ties in their original order.
    """
    stream = as_stream(rng)
    n = series.n
    idx = np.sort(stream.generator().integers(0, n, size=n))
    prov = SeriesProvenance(Kind.BOOTSTRAP_REPLICATE, seed=stream.seed)
    return TimeSeries(series.t[idx], series.y[idx], prov)


def _counts(idx: np.ndarray, n: int) -> np.ndarray:
    rows = idx.shape[0]
    flat = (idx + n * np.arange(rows)[:, None]).ravel()
    return np.bincount(flat, minlength=rows * n).reshape(rows, n).astype(np.float64)


def bootstrap_changepoints(series: TimeSeries, b: int, min_segment: int, rng=None) -> np.ndarray:
    """Changepoint of each of ``b`` pair-bootstrap replicates, in replicate order.

    Replicate ``j`` is row ``j`` of a ``(b, n)`` index draw from the stream, so
    replicate 0 coincides with :func:`resample_pairs` on the same stream. Each
    changepoint is reported as the original index of the replicate's last
    left-segment observation. A replicate with too few distinct time points to
    admit any split is redrawn.
    """
    n = series.n
    gen = as_stream(rng).generator()
    idx = gen.integers(0, n, size=(b, n))
    c = weighted_changepoints(series, _counts(idx, n), min_segment)
    for _ in range(MAX_REDRAWS):
        bad = np.flatnonzero(c == 0)
        if bad.size == 0:
            return c
        idx = gen.integers(0, n, size=(bad.size, n))
        c[bad] = weighted_changepoints(series, _counts(idx, n), min_segment)
    raise ValueError(
        f"could not draw bootstrap replicates with {2 * min_segment} distinct time points; "
        f"series of n={n} is too short"
    )


def bootstrap_changepoint_distribution(
    series: TimeSeries, cfg: BootstrapConfig, rng=None
) -> BootstrapDistribution:
    validate(series, cfg.min_segment)
    c = bootstrap_changepoints(series, cfg.b_inner, cfg.min_segment, cfg.stream(rng))
    values = np.sort(c)
    values.flags.writeable = False
    return BootstrapDistribution(values, series.n, cfg.min_segment)


def percentile_interval(dist: BootstrapDistribution, alpha_ci: float = 0.05) -> ConfidenceInterval:
    values = dist.values if isinstance(dist, BootstrapDistribution) else np.asarray(dist)
    if np.size(values) == 0:
        raise ValueError("empty bootstrap distribution")
    lower = empirical_quantile(values, alpha_ci / 2)
    upper = empirical_quantile(values, 1 - alpha_ci / 2)
    return ConfidenceInterval(lower, upper, 1 - alpha_ci)


def _one_length(series: TimeSeries, cfg: BootstrapConfig, stream: Stream, r: int) -> float:
    c = bootstrap_changepoints(series, cfg.b_inner, cfg.min_segment, stream.child("outer", r))
    return percentile_interval(np.sort(c), cfg.alpha_ci).length


def lambda_distribution(series: TimeSeries, cfg: BootstrapConfig, rng=None) -> np.ndarray:
    """``r_outer`` interval lengths, each from a fresh set of ``b_inner`` replicates."""
    validate(series, cfg.min_segment)
    fn = functools.partial(_one_length, series, cfg, cfg.stream(rng))
    return np.array(pmap(fn, range(cfg.r_outer), cfg.workers), dtype=np.float64)


def changepoint_interval(series: TimeSeries, cfg: BootstrapConfig, rng=None):
    """Point estimate, bootstrap distribution and percentile interval in one call."""
    scan = scan_changepoint(series, cfg.min_segment)
    dist = bootstrap_changepoint_distribution(series, cfg, rng)
    return scan, dist, percentile_interval(dist, cfg.alpha_ci)
