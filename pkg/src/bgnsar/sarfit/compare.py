"""Fit BGN and the three rival models to one region and rank them."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import BgnError, DomainError
from ..mle import FitOptions, fit_bgn
from ..rivals import N_PARAMS, CriteriaTriple, criteria, fit_g0, fit_gamma, fit_k
from .io import IntensityRegion
from .stats import Descriptive, describe

__all__ = ["ModelRecord", "ComparisonReport", "compare", "winners"]

CRITERIA = ("aic", "aicc", "bic")


@dataclass(frozen=True)
class ModelRecord:
    name: str
    params: dict[str, float]
    loglik: float
    k_params: int
    criteria: CriteriaTriple
    converged: bool
    error: str = ""


@dataclass(frozen=True)
class ComparisonReport:
    n: int
    models: tuple[ModelRecord, ...]
    winner_by: dict[str, str]
    descriptive: Descriptive
    source: str = ""
    channel: str = ""
    extra: dict = field(default_factory=dict)

    def model(self, name: str) -> ModelRecord:
        for m in self.models:
            if m.name == name:
                return m
        raise KeyError(name)


def winners(models: tuple[ModelRecord, ...]) -> dict[str, str]:
    """Per criterion, the converged model with the smallest value (first listed wins ties)."""
    out = {}
    for crit in CRITERIA:
        best = None
        for m in models:
            v = getattr(m.criteria, crit)
            if not m.converged or v is None or not math.isfinite(v):
                continue
            if best is None or v < best[1]:
                best = (m.name, v)
        if best is not None:
            out[crit] = best[0]
    return out


def _failed(name: str, n: int, exc: Exception) -> ModelRecord:
    nan = float("nan")
    return ModelRecord(name, {}, -math.inf, N_PARAMS[name], CriteriaTriple(nan, nan, nan), False, str(exc))


def compare(region: IntensityRegion | np.ndarray, opts: FitOptions = FitOptions()) -> ComparisonReport:
    """Fit BGN, Gamma, K and G0; criteria use k = 5, 2, 3, 3."""
    x = region.values if isinstance(region, IntensityRegion) else np.asarray(region, dtype=np.float64).ravel()
    n = int(x.size)
    if n < 30:
        raise DomainError("compare needs at least 30 values")
    if not np.all(x > 0.0):
        raise DomainError("intensities must be positive")
    records = []
    fitters = (("BGN", fit_bgn), ("Gamma", fit_gamma), ("K", fit_k), ("G0", fit_g0))
    for name, fitter in fitters:
        try:
            res = fitter(x, opts)
        except BgnError as exc:
            records.append(_failed(name, n, exc))
            continue
        k = N_PARAMS[name]
        records.append(ModelRecord(name, asdict(res.params), float(res.loglik), k,
                                   criteria(res.loglik, k, n), bool(res.converged)))
    models = tuple(records)
    src = region.source if isinstance(region, IntensityRegion) else ""
    chan = region.channel if isinstance(region, IntensityRegion) else ""
    return ComparisonReport(n, models, winners(models), describe(x), src, chan)
