"""Descriptive statistics and the sampler check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..bgn import BgnParams, bgn_cdf, bgn_pdf, bgn_sample
from ..errors import DomainError, EmptyRegionError
from .io import IntensityRegion

__all__ = ["Descriptive", "RngCheck", "describe", "ks_statistic", "rng_check"]


@dataclass(frozen=True)
class Descriptive:
    n: int
    mean: float
    median: float
    sd: float
    cv: float


@dataclass(frozen=True)
class RngCheck:
    ks_stat: float
    n: int
    edges: np.ndarray = field(repr=False)
    histogram: np.ndarray = field(repr=False)
    centers: np.ndarray = field(repr=False)
    density_curve: np.ndarray = field(repr=False)


def describe(region: IntensityRegion | np.ndarray) -> Descriptive:
    """Mean, median, sample sd (n - 1) and cv in percent."""
    x = region.values if isinstance(region, IntensityRegion) else np.asarray(region, dtype=np.float64).ravel()
    n = int(x.size)
    if n == 0:
        raise EmptyRegionError("cannot describe an empty region")
    mean = float(np.mean(x))
    median = float(np.median(x))
    # a constant region has sd exactly 0; np.std would leave rounding residue
    sd = float(np.std(x, ddof=1)) if n > 1 and np.ptp(x) > 0.0 else 0.0
    cv = 100.0 * sd / mean if sd > 0.0 else 0.0
    return Descriptive(n, mean, median, sd, cv)


def ks_statistic(sample: np.ndarray, cdf_values_sorted: np.ndarray) -> float:
    """sup |F_n - F| given the model cdf at the sorted sample."""
    n = sample.size
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(max(np.max(i / n - cdf_values_sorted), np.max(cdf_values_sorted - (i - 1.0) / n)))


def rng_check(p: BgnParams, n: int = 100_000, bins: int = 50, seed: int = 0) -> RngCheck:
    """KS distance of a fresh sample to the exact cdf, plus histogram and density data."""
    if n < 1000:
        raise DomainError("rng_check needs n >= 1000")
    if bins < 1:
        raise DomainError("bins must be positive")
    x = np.sort(bgn_sample(n, p, seed).values)
    ks = ks_statistic(x, np.asarray(bgn_cdf(x, p)))
    hist, edges = np.histogram(x, bins=bins, range=(x[0], x[-1]), density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    curve = np.asarray(bgn_pdf(centers, p), dtype=np.float64)
    if not math.isfinite(ks):
        raise DomainError("cdf evaluation failed")
    return RngCheck(ks, n, edges, hist, centers, curve)
