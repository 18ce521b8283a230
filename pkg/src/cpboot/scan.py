"""Segment OLS fits and the Gaussian likelihood-ratio changepoint scan.

Convention: a split ``k`` puts observations ``1..k`` in the left segment and
``k+1..n`` in the right one, so the estimated changepoint is the (1-based)
index of the last left observation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .series import SeriesError, TimeSeries, validate

LOG_2PI = float(np.log(2.0 * np.pi))
FLOOR_ABS = 1e-12
FLOOR_REL = 1e-12

_BLOCK_CELLS = 1 << 20


def variance_floor(y) -> float:
    return max(FLOOR_ABS, FLOOR_REL * float(np.var(y)))


@dataclass(frozen=True)
class SegmentFit:
    beta0: float
    beta1: float
    sigma2_mle: float
    m: int

    def mean_at(self, t):
        return self.beta0 + self.beta1 * np.asarray(t, dtype=float)


@dataclass(frozen=True, eq=False)
class ScanResult:
    """Per-split log-LRT values for ``k = min_segment .. n - min_segment``.

    ``statistic[i]`` belongs to split ``ks[i]``; splits that would cut through a
    group of tied time points are not admissible and hold NaN.
    """

    ks: np.ndarray
    statistic: np.ndarray
    c_hat: int
    max_statistic: float
    left_fit: SegmentFit
    right_fit: SegmentFit
    full_fit: SegmentFit


def fit_segment(series: TimeSeries, lo: int, hi: int, min_segment: int = 3) -> SegmentFit:
    """OLS line through observations ``lo..hi`` (0-based, inclusive).

    Falls back to an intercept-only fit when every ``t`` in range is equal.
    """
    n = series.n
    if not (0 <= lo <= hi < n):
        raise SeriesError(f"segment [{lo}, {hi}] out of range for n={n}")
    m = hi - lo + 1
    if m < min_segment:
        raise SeriesError(f"segment of {m} points is shorter than min_segment={min_segment}")
    t = series.t[lo : hi + 1]
    y = series.y[lo : hi + 1]
    tbar, ybar = t.mean(), y.mean()
    dt, dy = t - tbar, y - ybar
    stt = float(dt @ dt)
    if t[0] == t[-1] or stt == 0.0:
        beta1 = 0.0
    else:
        beta1 = float(dt @ dy) / stt
    beta0 = float(ybar - beta1 * tbar)
    resid = y - beta0 - beta1 * t
    sigma2 = max(float(resid @ resid) / m, variance_floor(series.y))
    return SegmentFit(beta0, beta1, sigma2, m)


def gaussian_loglik(fit: SegmentFit) -> float:
    """Normal log-likelihood maximised over the mean line and the variance."""
    if fit.m < 1 or not (fit.sigma2_mle > 0 and np.isfinite(fit.sigma2_mle)):
        raise ValueError(f"invalid fit: {fit}")
    return -0.5 * fit.m * (np.log(fit.sigma2_mle) + LOG_2PI + 1.0)


def _check_split(n: int, k: int, min_segment: int) -> None:
    if not (min_segment <= k <= n - min_segment):
        raise SeriesError(
            f"split k={k} outside admissible range [{min_segment}, {n - min_segment}]"
        )


def lrt_statistic_at(series: TimeSeries, k: int, min_segment: int = 3) -> float:
    """Log likelihood ratio of the two-segment model split after ``k`` vs one segment."""
    n = series.n
    _check_split(n, k, min_segment)
    left = fit_segment(series, 0, k - 1, min_segment)
    right = fit_segment(series, k, n - 1, min_segment)
    full = fit_segment(series, 0, n - 1, min_segment)
    return gaussian_loglik(left) + gaussian_loglik(right) - gaussian_loglik(full)


@numba.njit(cache=True, inline="always")
def _seg_ll(w, ctt, cty, cyy, single, floor):
    rss = cyy if single else cyy - cty * cty / ctt
    s2 = max(max(rss, 0.0) / w, floor)
    return -0.5 * w * (np.log(s2) + LOG_2PI + 1.0)


@numba.njit(cache=True)
def _split_statistics(t, y, w, min_segment):
    """Log-LRT for every split ``c = 1..n-1`` of each weighted row.

    ``w`` has shape (B, n); row ``b`` is the series with observation ``i``
    repeated ``w[b, i]`` times, which is exactly a pair bootstrap replicate
    when ``w`` holds multinomial counts. A split is admissible when it falls
    between distinct time points and leaves at least ``min_segment`` distinct
    time points with positive weight on each side; all others get ``-inf``.

    Segment moments are accumulated with weighted Welford updates, left to
    right for prefixes and right to left for suffixes.
    """
    B, n = w.shape
    out = np.full((B, n - 1), -np.inf)
    # suffix moments over indices c..n-1: weight, Ctt, Cty, Cyy, distinct count
    suf = np.empty((5, n + 1))
    for b in range(B):
        W = 0.0
        mt = 0.0
        my = 0.0
        ctt = 0.0
        cty = 0.0
        cyy = 0.0
        d = 0.0
        suf[:, n] = 0.0
        counted = False  # current time group already counted
        for i in range(n - 1, -1, -1):
            if i == n - 1 or t[i] < t[i + 1]:
                counted = False
            wi = w[b, i]
            if wi > 0:
                W += wi
                dt = t[i] - mt
                dy = y[i] - my
                f = wi / W
                mt += f * dt
                my += f * dy
                ctt += wi * dt * (t[i] - mt)
                cty += wi * dt * (y[i] - my)
                cyy += wi * dy * (y[i] - my)
                if not counted:
                    d += 1.0
                    counted = True
            suf[0, i] = W
            suf[1, i] = ctt
            suf[2, i] = cty
            suf[3, i] = cyy
            suf[4, i] = d
        d_total = d
        floor = max(FLOOR_ABS, FLOOR_REL * cyy / W)
        full = _seg_ll(W, ctt, cty, cyy, d_total <= 1, floor)
        W = 0.0
        mt = 0.0
        my = 0.0
        ctt = 0.0
        cty = 0.0
        cyy = 0.0
        d_left = 0.0
        counted = False
        for c in range(1, n):
            i = c - 1
            if i == 0 or t[i] > t[i - 1]:
                counted = False
            wi = w[b, i]
            if wi > 0:
                W += wi
                dt = t[i] - mt
                dy = y[i] - my
                f = wi / W
                mt += f * dt
                my += f * dy
                ctt += wi * dt * (t[i] - mt)
                cty += wi * dt * (y[i] - my)
                cyy += wi * dy * (y[i] - my)
                if not counted:
                    d_left += 1.0
                    counted = True
            d_right = d_total - d_left
            if not (t[c] > t[i]) or c < min_segment or n - c < min_segment:
                continue
            if d_left < min_segment or d_right < min_segment:
                continue
            out[b, i] = (
                _seg_ll(W, ctt, cty, cyy, d_left <= 1, floor)
                + _seg_ll(suf[0, c], suf[1, c], suf[2, c], suf[3, c], d_right <= 1, floor)
                - full
            )
    return out


def weighted_changepoints(series: TimeSeries, weights, min_segment: int = 3) -> np.ndarray:
    """Argmax split of each weighted row, in the original series' indexing.

    Returns 0 for rows with no admissible split.
    """
    w = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    n = series.n
    out = np.zeros(w.shape[0], dtype=np.int64)
    block = max(1, _BLOCK_CELLS // max(n, 1))
    for start in range(0, w.shape[0], block):
        stat = _split_statistics(series.t, series.y, w[start : start + block], min_segment)
        best = np.argmax(stat, axis=1)
        found = np.isfinite(stat[np.arange(stat.shape[0]), best])
        out[start : start + block] = np.where(found, best + 1, 0)
    return out


def scan_changepoint(series: TimeSeries, min_segment: int = 3) -> ScanResult:
    """Evaluate the log-LRT at every admissible split and return the argmax.

    Uses prefix sums, so the whole scan costs O(n). Ties go to the smallest
    split.
    """
    validate(series, min_segment)
    n = series.n
    stat = _split_statistics(series.t, series.y, np.ones((1, n)), min_segment)[0]
    ks = np.arange(min_segment, n - min_segment + 1)
    values = stat[ks - 1]
    if not np.any(np.isfinite(values)):
        raise SeriesError("no admissible split: too few distinct time points")
    best = int(np.argmax(values))
    c_hat = int(ks[best])
    values = np.where(np.isfinite(values), values, np.nan)
    values.flags.writeable = False
    return ScanResult(
        ks=ks,
        statistic=values,
        c_hat=c_hat,
        max_statistic=float(values[best]),
        left_fit=fit_segment(series, 0, c_hat - 1, min_segment),
        right_fit=fit_segment(series, c_hat, n - 1, min_segment),
        full_fit=fit_segment(series, 0, n - 1, min_segment),
    )
