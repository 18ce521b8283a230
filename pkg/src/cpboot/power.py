"""Interval-length test for changepoint existence, and its Monte Carlo power.

A series with a real changepoint yields a short bootstrap interval for the
changepoint location. The test compares interval lengths from the observed
series against lengths from an estimated no-change version of it. The
critical value is the ``alpha_test`` quantile of the null lengths; observed
lengths strictly below it count as evidence of a changepoint.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .bootstrap import (
    BootstrapConfig,
    bootstrap_changepoints,
    empirical_quantile,
    lambda_distribution,
    percentile_interval,
)
from .nulls import demean_null, permute_null
from .parallel import pmap
from .rng import Stream
from .scan import scan_changepoint
from .series import Kind, SeriesProvenance, TimeSeries, validate

NULL_METHODS = ("demean", "permute")
DESIGNS = ("fresh", "fixed")


@dataclass(frozen=True)
class TestConfig:
    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)
    alpha_test: float = 0.05
    null_method: str = "demean"

    __test__ = False  # keep pytest from collecting this

    def __post_init__(self):
        if not 0.0 < self.alpha_test < 1.0:
            raise ValueError(f"alpha_test must lie in (0, 1), got {self.alpha_test}")
        if self.null_method not in NULL_METHODS:
            raise ValueError(f"null_method must be one of {NULL_METHODS}, got {self.null_method!r}")


@dataclass(frozen=True, eq=False)
class TestReport:
    lambda1_samples: np.ndarray
    lambda0_samples: np.ndarray
    t_star: float
    lambda1_point: float
    reject: bool
    q_hat: float
    power: float
    c_hat: int
    null_method: str

    __test__ = False


@dataclass(frozen=True, eq=False)
class SimulatedPower:
    """Power at one effect size, each outer repetition on a freshly simulated series."""

    effect_m: float
    lambda1_samples: np.ndarray
    lambda0_samples: np.ndarray
    t_star: float
    power: float


@dataclass(frozen=True, eq=False)
class PowerCurve:
    effect_grid: np.ndarray
    power: np.ndarray
    n: int
    sigma: float
    c0: int
    null_method: str
    seed: int
    design: str
    repeats: int
    points: tuple = ()


def generate_amoc(
    n: int,
    c0: int,
    effect_m: float,
    sigma: float = 1.0,
    beta0: float = 0.0,
    beta1: float = 0.0,
    rng=None,
    min_segment: int = 3,
) -> TimeSeries:
    """Linear mean plus a shift of ``effect_m * sigma`` after ``c0``, i.i.d. normal noise."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not (min_segment <= c0 <= n - min_segment):
        raise ValueError(f"c0={c0} outside [{min_segment}, {n - min_segment}]")
    stream = rng if isinstance(rng, Stream) else Stream(0 if rng is None else int(rng))
    t = np.arange(1, n + 1, dtype=np.float64)
    y = beta0 + beta1 * t + effect_m * sigma * (t > c0) + stream.generator().normal(0.0, sigma, n)
    return TimeSeries(t, y, SeriesProvenance(Kind.SYNTHETIC, seed=stream.seed))


def build_null(series: TimeSeries, method: str, rng, min_segment: int = 3) -> TimeSeries:
    if method == "demean":
        return demean_null(series, min_segment)
    if method == "permute":
        return permute_null(series, rng)
    raise ValueError(f"unknown null method {method!r}")


def power_estimate(report) -> float:
    """Share of observed-series lengths strictly below the critical value."""
    lam1 = np.asarray(report.lambda1_samples, dtype=np.float64)
    return float(np.mean(lam1 < report.t_star))


def decide(lambda1, lambda0, alpha_test: float):
    """Critical value (alpha quantile of null lengths) and share of observed lengths below it.

    The comparison is strict: lengths pile up on a few values near the
    maximum for series without a change, and counting ties as rejections
    would reject most of them.
    """
    lambda1 = np.asarray(lambda1, dtype=np.float64)
    t_star = empirical_quantile(lambda0, alpha_test)
    power = float(np.mean(lambda1 < t_star))
    return t_star, power


def ci_length_test(series: TimeSeries, cfg: TestConfig, rng=None) -> TestReport:
    bcfg = cfg.bootstrap
    validate(series, bcfg.min_segment)
    stream = bcfg.stream(rng)
    c_hat = scan_changepoint(series, bcfg.min_segment).c_hat
    null = build_null(series, cfg.null_method, stream.child("null"), bcfg.min_segment)
    lam1 = lambda_distribution(series, bcfg, stream.child("lambda1"))
    lam0 = lambda_distribution(null, bcfg, stream.child("lambda0"))
    t_star, power = decide(lam1, lam0, cfg.alpha_test)
    point = float(np.median(lam1))
    med0 = float(np.median(lam0))
    return TestReport(
        lambda1_samples=lam1,
        lambda0_samples=lam0,
        t_star=t_star,
        lambda1_point=point,
        reject=bool(point < t_star),
        q_hat=point / med0 if med0 > 0 else float("inf"),
        power=power,
        c_hat=c_hat,
        null_method=cfg.null_method,
    )


def _fresh_pair(effect_m, n, c0, sigma, cfg: TestConfig, stream: Stream, r: int):
    bcfg = cfg.bootstrap
    rep = stream.child("rep", r)
    x = generate_amoc(n, c0, effect_m, sigma, rng=rep.child("data"), min_segment=bcfg.min_segment)
    null = build_null(x, cfg.null_method, rep.child("null"), bcfg.min_segment)
    lengths = []
    for series, key in ((x, "lambda1"), (null, "lambda0")):
        c = bootstrap_changepoints(series, bcfg.b_inner, bcfg.min_segment, rep.child(key))
        lengths.append(percentile_interval(np.sort(c), bcfg.alpha_ci).length)
    return lengths


def simulate_power(
    effect_m: float, n: int, sigma: float, cfg: TestConfig, rng=None, c0: int | None = None
) -> SimulatedPower:
    """Monte Carlo power with a new synthetic series on every outer repetition.

    Each repetition contributes one observed-series length and one null
    length; the critical value comes from the pooled null lengths.
    """
    bcfg = cfg.bootstrap
    c0 = n // 2 if c0 is None else c0
    fn = functools.partial(_fresh_pair, effect_m, n, c0, sigma, cfg, bcfg.stream(rng))
    pairs = np.array(pmap(fn, range(bcfg.r_outer), bcfg.workers), dtype=np.float64)
    lam1, lam0 = pairs[:, 0], pairs[:, 1]
    t_star, power = decide(lam1, lam0, cfg.alpha_test)
    return SimulatedPower(float(effect_m), lam1, lam0, t_star, power)


def power_curve(
    effect_grid,
    n: int = 100,
    sigma: float = 1.0,
    cfg: TestConfig | None = None,
    rng=None,
    c0: int | None = None,
    design: str = "fresh",
    repeats: int = 1,
) -> PowerCurve:
    """Power over effect sizes given in multiples of ``sigma``.

    ``design="fresh"`` simulates a new series for every outer repetition (see
    :func:`simulate_power`). ``design="fixed"`` simulates ``repeats`` series per
    grid point, runs :func:`ci_length_test` on each, and averages the powers.
    """
    cfg = cfg or TestConfig()
    grid = np.asarray(list(effect_grid), dtype=np.float64)
    if grid.size == 0:
        raise ValueError("effect grid is empty")
    if design not in DESIGNS:
        raise ValueError(f"design must be one of {DESIGNS}, got {design!r}")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    bcfg = cfg.bootstrap
    c0 = n // 2 if c0 is None else c0
    stream = bcfg.stream(rng)
    points, power = [], []
    for i, m in enumerate(grid.tolist()):
        gs = stream.child("grid", i)
        if design == "fresh":
            pt = simulate_power(m, n, sigma, cfg, gs, c0)
            points.append(pt)
            power.append(pt.power)
        else:
            reports = []
            for rep in range(repeats):
                x = generate_amoc(n, c0, m, sigma, rng=gs.child("rep", rep, "data"),
                                  min_segment=bcfg.min_segment)
                reports.append(ci_length_test(x, cfg, gs.child("rep", rep, "test")))
            points.append(tuple(reports))
            power.append(float(np.mean([r.power for r in reports])))
    return PowerCurve(
        effect_grid=grid,
        power=np.array(power),
        n=n,
        sigma=float(sigma),
        c0=c0,
        null_method=cfg.null_method,
        seed=stream.seed,
        design=design,
        repeats=repeats,
        points=tuple(points),
    )
