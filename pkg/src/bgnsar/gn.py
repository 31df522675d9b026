"""Generalised normal (exponential power) sub-model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConvergenceError, DomainError

__all__ = ["GnParams", "gn_pdf_std", "gn_cdf_std", "gn_cdf", "gn_pdf", "gn_quantile"]


@dataclass(frozen=True)
class GnParams:
    mu: float = 0.0
    sigma: float = 1.0
    s: float = 2.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu}")
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not (self.s > 0.0 and math.isfinite(self.s)):
            raise DomainError(f"s must be positive, got {self.s}")


def _check_s(s: float) -> float:
    s = float(s)
    if not (s > 0.0 and math.isfinite(s)):
        raise DomainError(f"s must be positive, got {s}")
    return s


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.ascontiguousarray(x, dtype=np.float64)
    return arr.reshape(-1), arr.ndim == 0


def _shape_out(out: np.ndarray, x, scalar: bool):
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(x))


def gn_pdf_std(z, s: float):
    """Standardised density s / (2 Gamma(1/s)) exp(-|z|^s)."""
    s = _check_s(s)
    arr, scalar = _as_array(z)
    out = np.empty_like(arr)
    _backend.kernels.gn_log_pdf(arr, 0.0, 1.0, s, out)
    return _shape_out(np.exp(out), z, scalar)


def gn_pdf(x, p: GnParams):
    arr, scalar = _as_array(x)
    out = np.empty_like(arr)
    _backend.kernels.gn_log_pdf(arr, p.mu, p.sigma, p.s, out)
    return _shape_out(np.exp(out), x, scalar)


def gn_cdf_pair(x, p: GnParams) -> tuple[np.ndarray, np.ndarray]:
    """(G(x), 1 - G(x)) as arrays, each side computed without cancellation."""
    arr, _ = _as_array(x)
    lo = np.empty_like(arr)
    hi = np.empty_like(arr)
    bad = _backend.kernels.gn_cdf_pair(arr, p.mu, p.sigma, p.s, lo, hi)
    if bad and not np.isnan(arr).any():
        raise ConvergenceError("generalised normal cdf failed to converge")
    return lo, hi


def gn_cdf_std(z, s: float):
    """Phi_s(z), the standardised cdf."""
    s = _check_s(s)
    arr, scalar = _as_array(z)
    lo, _ = gn_cdf_pair(arr, GnParams(0.0, 1.0, s))
    return _shape_out(lo, z, scalar)


def gn_cdf(x, p: GnParams):
    """G(x) = Phi_s((x - mu) / sigma)."""
    arr, scalar = _as_array(x)
    lo, _ = gn_cdf_pair(arr, p)
    return _shape_out(lo, x, scalar)


def _quantile_from_pair(u: np.ndarray, uc: np.ndarray, p: GnParams) -> np.ndarray:
    # u and uc = 1 - u are both supplied so that either tail keeps precision
    lower = u <= uc
    tail = np.where(lower, u, uc)
    with np.errstate(divide="ignore"):
        logq = np.log(2.0 * tail)
    plow = np.abs(uc - u)
    sign = np.where(lower, -1.0, 1.0)
    out = np.empty_like(u)
    bad = _backend.kernels.gn_from_tails(
        np.ascontiguousarray(plow), np.ascontiguousarray(logq),
        np.ascontiguousarray(sign), p.mu, p.sigma, p.s, out)
    if bad:
        raise ConvergenceError("gamma quantile failed inside the GN inversion")
    return out


def gn_quantile(u, p: GnParams):
    """Inverse of gn_cdf for u in (0, 1)."""
    arr, scalar = _as_array(u)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("u must lie in the open interval (0, 1)")
    out = _quantile_from_pair(arr, 1.0 - arr, p)
    return _shape_out(out, u, scalar)
