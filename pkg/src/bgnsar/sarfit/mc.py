"""Monte Carlo study of how the shape parameters affect the fitted density's error."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from ..bgn import BgnParams, bgn_pdf, bgn_quantile, bgn_sample
from ..errors import BgnError, DomainError
from ..mle import FitOptions, fit_bgn

__all__ = ["SCENARIOS", "McConfig", "McRow", "McTable", "mc_study", "ise", "default_sweep", "parse_sweep"]

# scenario name -> (parameter swept, stream code)
SCENARIOS = {"vary_s": ("s", 1), "vary_beta": ("beta", 2), "vary_alpha": ("alpha", 3)}
_ALIASES = {"s": "vary_s", "beta": "vary_beta", "alpha": "vary_alpha"}


def default_sweep() -> tuple[float, ...]:
    return tuple(1.0 + 0.5 * i for i in range(9))


@dataclass(frozen=True)
class McConfig:
    replications: int = 1000
    sample_sizes: tuple[int, ...] = (49, 121, 400)
    scenario: str = "vary_s"
    sweep: tuple[float, ...] = field(default_factory=default_sweep)
    base: BgnParams | None = None
    grid_points: int = 512
    seed: int = 0
    fit: FitOptions = FitOptions(n_starts=2)

    def __post_init__(self) -> None:
        scen = _ALIASES.get(self.scenario, self.scenario)
        if scen not in SCENARIOS:
            raise DomainError(f"unknown scenario {self.scenario!r}")
        object.__setattr__(self, "scenario", scen)
        if self.base is None:
            # alpha = beta = s = 1, mu = 0, sigma = 1; the swept entry is replaced
            object.__setattr__(self, "base", BgnParams(1.0, 1.0, 0.0, 1.0, 1.0))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "sweep", tuple(float(v) for v in self.sweep))
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        if not self.sample_sizes or min(self.sample_sizes) < 10:
            raise DomainError("sample sizes must be >= 10")
        if not self.sweep or min(self.sweep) <= 0.0:
            raise DomainError("sweep values must be positive")
        if self.grid_points < 2:
            raise DomainError("grid_points must be >= 2")

    def params_at(self, value: float) -> BgnParams:
        return replace(self.base, **{SCENARIOS[self.scenario][0]: value})


@dataclass(frozen=True)
class McRow:
    value: float
    size: int
    mse: float
    used: int
    excluded: int


@dataclass(frozen=True)
class McTable:
    scenario: str
    replications: int
    rows: tuple[McRow, ...]

    def mse(self, value: float, size: int) -> float:
        for r in self.rows:
            if r.value == value and r.size == size:
                return r.mse
        raise KeyError((value, size))


Fitter = Callable[[np.ndarray, BgnParams, FitOptions], object]


def _default_fitter(data: np.ndarray, truth: BgnParams, opts: FitOptions):
    return fit_bgn(data, opts)


def ise(truth: BgnParams, fitted: BgnParams, grid_points: int = 512) -> float:
    """Trapezoid integral of (f - f_hat)^2 over the central 99.8% of the true law."""
    lo, hi = bgn_quantile(np.array([0.001, 0.999]), truth)
    x = np.linspace(lo, hi, grid_points)
    diff = np.asarray(bgn_pdf(x, truth)) - np.asarray(bgn_pdf(x, fitted))
    sq = diff * diff
    dx = (hi - lo) / (grid_points - 1)
    return float(dx * (np.sum(sq) - 0.5 * (sq[0] + sq[-1])))


def _cell(task: tuple) -> tuple[int, int, list[float], int]:
    cfg, fitter, vi, ni = task
    truth = cfg.params_at(cfg.sweep[vi])
    size = cfg.sample_sizes[ni]
    code = SCENARIOS[cfg.scenario][1]
    errs = []
    excluded = 0
    for rep in range(cfg.replications):
        data = bgn_sample(size, truth, cfg.seed, (code, vi, ni, rep)).values
        try:
            res = fitter(np.array(data), truth, cfg.fit)
        except BgnError:
            excluded += 1
            continue
        if not res.converged:
            excluded += 1
            continue
        errs.append(ise(truth, res.params, cfg.grid_points))
    return vi, ni, errs, excluded


def mc_study(cfg: McConfig, fitter: Fitter | None = None, workers: int = 1) -> McTable:
    """Rows ordered by sweep value then sample size; identical for any ``workers``.

    Each replication draws from its own stream keyed by (seed, scenario, sweep
    index, size index, replication). Non-converged fits are excluded and
    counted. ``fitter(data, truth, opts)`` replaces the ML fit (test hook).
    """
    fitter = fitter or _default_fitter
    tasks = [(cfg, fitter, vi, ni) for vi in range(len(cfg.sweep)) for ni in range(len(cfg.sample_sizes))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell, tasks))
    else:
        results = [_cell(t) for t in tasks]
    rows = []
    for vi, ni, errs, excluded in results:
        mse = math.fsum(errs) / len(errs) if errs else math.nan
        rows.append(McRow(cfg.sweep[vi], cfg.sample_sizes[ni], mse, len(errs), excluded))
    return McTable(cfg.scenario, cfg.replications, tuple(rows))


def parse_sweep(text: str) -> tuple[float, ...]:
    """'a:b:step' range (inclusive) or comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise DomainError(f"sweep range must be start:stop:step, got {text!r}")
        a, b, st = (float(p) for p in parts)
        if st <= 0.0 or b < a:
            raise DomainError(f"bad sweep range {text!r}")
        count = int(math.floor((b - a) / st + 1e-9)) + 1
        return tuple(round(a + i * st, 12) for i in range(count))
    return tuple(float(p) for p in text.split(",") if p.strip())

