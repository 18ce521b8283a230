"""Estimated no-changepoint versions of an observed series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import as_stream
from .scan import fit_segment, scan_changepoint
from .series import Kind, SeriesProvenance, TimeSeries


@dataclass(frozen=True)
class DeltaEstimate:
    """Fitted right-minus-left mean difference, an affine function of ``t``."""

    c_hat: int
    d0: float
    d1: float

    def delta_at(self, t):
        return self.d0 + self.d1 * np.asarray(t, dtype=float)


def delta_at_split(series: TimeSeries, c: int, min_segment: int = 3) -> DeltaEstimate:
    left = fit_segment(series, 0, c - 1, min_segment)
    right = fit_segment(series, c, series.n - 1, min_segment)
    return DeltaEstimate(c, right.beta0 - left.beta0, right.beta1 - left.beta1)


def estimate_delta(series: TimeSeries, min_segment: int = 3) -> DeltaEstimate:
    return delta_at_split(series, scan_changepoint(series, min_segment).c_hat, min_segment)


def demean_null(series: TimeSeries, min_segment: int = 3) -> TimeSeries:
    """Subtract the fitted mean difference from every observation after the changepoint.

    Observations up to and including the changepoint are left untouched, so
    the residual pattern of the input survives.
    """
    est = estimate_delta(series, min_segment)
    y = series.y.copy()
    c = est.c_hat
    y[c:] = y[c:] - est.delta_at(series.t[c:])
    prov = SeriesProvenance(Kind.DEMEANED_NULL, parent_digest=series.digest())
    return series.with_y(y, prov)


def permute_null(series: TimeSeries, rng=None) -> TimeSeries:
    """Shuffle ``y`` against fixed ``t``."""
    stream = as_stream(rng)
    y = stream.generator().permutation(series.y)
    prov = SeriesProvenance(Kind.PERMUTED_NULL, seed=stream.seed, parent_digest=series.digest())
    return series.with_y(y, prov)
