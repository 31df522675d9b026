"""Beta generalised normal distribution: density, cdf, quantile, sampler."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import ConvergenceError, DomainError
from .gn import GnParams, _as_array, _quantile_from_pair, _shape_out

__all__ = [
    "BgnParams",
    "SampleBatch",
    "bgn_pdf",
    "bgn_logpdf",
    "bgn_cdf",
    "bgn_sf",
    "bgn_quantile",
    "bgn_sample",
    "limiting_beta_pdf",
    "make_rng",
    "log_gamma_variates",
]


@dataclass(frozen=True)
class BgnParams:
    alpha: float = 1.0
    beta: float = 1.0
    mu: float = 0.0
    sigma: float = 1.0
    s: float = 2.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "sigma", "s"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu}")

    @property
    def gn(self) -> GnParams:
        return GnParams(self.mu, self.sigma, self.s)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.alpha, self.beta, self.mu, self.sigma, self.s)


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray = field(repr=False)
    seed: int
    params: BgnParams


def bgn_logpdf(x, p: BgnParams):
    """Log density; -inf outside the support of finite values."""
    arr, scalar = _as_array(x)
    out = np.empty_like(arr)
    _backend.kernels.bgn_log_pdf(arr, *p.as_tuple(), out)
    return _shape_out(out, x, scalar)


def bgn_pdf(x, p: BgnParams):
    """Density. Points where the density is unbounded evaluate to +inf."""
    lp = bgn_logpdf(x, p)
    with np.errstate(over="ignore"):
        v = np.exp(lp)
    return float(v) if np.ndim(lp) == 0 else v


def _cdf_pair(x, p: BgnParams):
    arr, scalar = _as_array(x)
    f = np.empty_like(arr)
    sf = np.empty_like(arr)
    bad = _backend.kernels.bgn_cdf_pair(arr, *p.as_tuple(), f, sf)
    if bad and not np.isnan(arr).any():
        raise ConvergenceError("BGN cdf evaluation failed to converge")
    return _shape_out(f, x, scalar), _shape_out(sf, x, scalar)


def bgn_cdf(x, p: BgnParams):
    """F(x) = I_{Phi_s((x - mu)/sigma)}(alpha, beta)."""
    return _cdf_pair(x, p)[0]


def bgn_sf(x, p: BgnParams):
    """Survival function 1 - F(x), accurate in the upper tail."""
    return _cdf_pair(x, p)[1]


def bgn_quantile(prob, p: BgnParams):
    """Inverse cdf for prob in (0, 1)."""
    arr, scalar = _as_array(prob)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("prob must lie in the open interval (0, 1)")
    k = _backend.kernels
    u = np.empty_like(arr)
    uc = np.empty_like(arr)
    for i, v in enumerate(arr):
        u[i], uc[i] = k.inc_beta_inv(float(v), p.alpha, p.beta)
    if np.isnan(u).any():
        raise ConvergenceError("inverse incomplete beta failed to converge")
    out = _quantile_from_pair(u, uc, p.gn)
    return _shape_out(out, prob, scalar)


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for the stream identified by (seed, *key)."""
    if seed < 0:
        raise DomainError(f"seed must be nonnegative, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def log_gamma_variates(rng: np.random.Generator, shape: float, n: int) -> np.ndarray:
    """ln of n Gamma(shape, 1) variates, kept finite for tiny shapes.

    For shape < 1 the boost G = G' U^(1/shape) with G' ~ Gamma(shape + 1) is
    applied in log space, so draws far below the double range survive.
    """
    if shape >= 1.0:
        return np.log(rng.standard_gamma(shape, n))
    g = rng.standard_gamma(shape + 1.0, n)
    u = 1.0 - rng.random(n)
    return np.log(g) + np.log(u) / shape


def bgn_sample(n: int, p: BgnParams, seed: int, batch: int | tuple[int, ...] = 0) -> SampleBatch:
    """n draws by inverse transform of beta variates through the GN quantile.

    The beta variate is represented by the log ratio of two gamma variates, so
    u and 1 - u are both available at full relative precision. ``batch`` (an
    int or a tuple of ints) selects an independent stream under the same seed.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    key = batch if isinstance(batch, tuple) else (batch,)
    rng = make_rng(seed, *key)
    lga = log_gamma_variates(rng, p.alpha, n)
    lgb = log_gamma_variates(rng, p.beta, n)
    out = np.empty(n)
    bad = _backend.kernels.gn_from_log_gammas(lga, lgb, p.mu, p.sigma, p.s, out)
    if bad:
        raise ConvergenceError(f"{bad} draws failed in the gamma quantile")
    out.setflags(write=False)
    return SampleBatch(out, int(seed), p)


def limiting_beta_pdf(x, p: BgnParams):
    """Large-s limit: beta(alpha, beta) density rescaled to [mu - sigma, mu + sigma]."""
    arr, scalar = _as_array(x)
    t = 0.5 * ((arr - p.mu) / p.sigma + 1.0)
    inside = (t >= 0.0) & (t <= 1.0)
    out = np.zeros_like(arr)
    lnb = _backend.kernels.ln_beta(p.alpha, p.beta)
    tt = t[inside]
    with np.errstate(divide="ignore", invalid="ignore"):
        la = np.where(p.alpha == 1.0, 0.0, (p.alpha - 1.0) * np.log(tt))
        lb = np.where(p.beta == 1.0, 0.0, (p.beta - 1.0) * np.log1p(-tt))
        out[inside] = np.exp(la + lb - lnb) / (2.0 * p.sigma)
    return _shape_out(out, x, scalar)
