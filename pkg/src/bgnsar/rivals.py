"""Gamma, K and G0 intensity models, their ML fits, and information criteria."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .bgn import make_rng
from .errors import DomainError
from .mle import LOG_CEIL, FitOptions, maximize
from .specfun import ln_gamma

__all__ = [
    "GammaParams",
    "KParams",
    "G0Params",
    "CriteriaTriple",
    "RivalFit",
    "N_PARAMS",
    "gamma_pdf",
    "k_pdf",
    "g0_pdf",
    "gamma_loglik",
    "k_loglik",
    "g0_loglik",
    "fit_gamma",
    "fit_k",
    "fit_g0",
    "criteria",
    "sample_gamma",
    "sample_k",
    "sample_g0",
]

N_PARAMS = {"BGN": 5, "Gamma": 2, "K": 3, "G0": 3}


def _pos(name: str, v: float) -> float:
    v = float(v)
    if not (v > 0.0 and math.isfinite(v)):
        raise DomainError(f"{name} must be positive and finite, got {v}")
    return v


@dataclass(frozen=True)
class GammaParams:
    shape: float
    rate: float

    def __post_init__(self) -> None:
        _pos("shape", self.shape)
        _pos("rate", self.rate)


@dataclass(frozen=True)
class KParams:
    alpha_k: float
    looks: float
    mean_intensity: float

    def __post_init__(self) -> None:
        _pos("alpha_k", self.alpha_k)
        _pos("looks", self.looks)
        _pos("mean_intensity", self.mean_intensity)


@dataclass(frozen=True)
class G0Params:
    alpha_g: float
    gamma_g: float
    looks: float

    def __post_init__(self) -> None:
        if not (self.alpha_g < 0.0 and math.isfinite(self.alpha_g)):
            raise DomainError(f"alpha_g must be negative, got {self.alpha_g}")
        _pos("gamma_g", self.gamma_g)
        _pos("looks", self.looks)


@dataclass(frozen=True)
class CriteriaTriple:
    aic: float
    aicc: float | None
    bic: float


@dataclass(frozen=True)
class RivalFit:
    name: str
    params: object
    loglik: float
    converged: bool
    iterations: int
    grad_norm: float
    k_params: int


def _positive_data(x, name: str = "x") -> tuple[np.ndarray, bool]:
    scalar = np.ndim(x) == 0
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if not np.all(arr > 0.0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be positive and finite")
    return arr, scalar


def _ret(v: np.ndarray, scalar: bool):
    return float(v[0]) if scalar else v


# --- log densities --------------------------------------------------------------

def _gamma_logpdf(x: np.ndarray, shape: float, rate: float) -> np.ndarray:
    return shape * math.log(rate) - ln_gamma(shape) + (shape - 1.0) * np.log(x) - rate * x


def _g0_logpdf(x: np.ndarray, a: float, g: float, looks: float) -> np.ndarray:
    const = (looks * math.log(looks) + ln_gamma(looks - a) - ln_gamma(looks) - ln_gamma(-a)
             - a * math.log(g))
    return const + (looks - 1.0) * np.log(x) - (looks - a) * np.log(g + looks * x)


def _k_logpdf(x: np.ndarray, p: KParams) -> np.ndarray:
    a, looks, m = p.alpha_k, p.looks, p.mean_intensity
    scale = a * looks / m
    half = 0.5 * (a + looks)
    arg = 2.0 * np.sqrt(scale * x)
    lk = np.empty_like(x)
    _backend.kernels.log_bessel_k_array(a - looks, arg, lk)
    const = math.log(2.0) - ln_gamma(a) - ln_gamma(looks) + half * math.log(scale)
    return const + (half - 1.0) * np.log(x) + lk


def gamma_pdf(x, p: GammaParams):
    arr, scalar = _positive_data(x)
    return _ret(np.exp(_gamma_logpdf(arr, p.shape, p.rate)), scalar)


def k_pdf(x, p: KParams):
    arr, scalar = _positive_data(x)
    return _ret(np.exp(_k_logpdf(np.ascontiguousarray(arr), p)), scalar)


def g0_pdf(x, p: G0Params):
    arr, scalar = _positive_data(x)
    return _ret(np.exp(_g0_logpdf(arr, p.alpha_g, p.gamma_g, p.looks)), scalar)


def gamma_loglik(data: Sequence[float], p: GammaParams) -> float:
    x, _ = _positive_data(data, "data")
    return float(np.sum(_gamma_logpdf(x, p.shape, p.rate)))


def k_loglik(data: Sequence[float], p: KParams) -> float:
    x, _ = _positive_data(data, "data")
    v = _backend.kernels.k_loglik(np.ascontiguousarray(x), p.alpha_k, p.looks, p.mean_intensity)
    return float(v) if math.isfinite(v) else -math.inf


def g0_loglik(data: Sequence[float], p: G0Params) -> float:
    x, _ = _positive_data(data, "data")
    return float(np.sum(_g0_logpdf(x, p.alpha_g, p.gamma_g, p.looks)))


# --- fitting --------------------------------------------------------------------

def _numeric(mean_ll: Callable[[np.ndarray], float]) -> Callable[[np.ndarray], tuple[float, np.ndarray]]:
    def fun(u: np.ndarray) -> tuple[float, np.ndarray]:
        f = mean_ll(u)
        if not math.isfinite(f):
            return -math.inf, np.zeros_like(u)
        g = np.empty_like(u)
        for i in range(u.size):
            h = 1e-5 * max(1.0, abs(u[i]))
            up = u.copy()
            dn = u.copy()
            up[i] += h
            dn[i] -= h
            fu, fd = mean_ll(up), mean_ll(dn)
            if not (math.isfinite(fu) and math.isfinite(fd)):
                return -math.inf, g
            g[i] = (fu - fd) / (2.0 * h)
        return f, g

    return fun


def _fit(name: str, x: np.ndarray, mean_ll, starts: list[np.ndarray], opts: FitOptions):
    fun = _numeric(mean_ll)
    bounds = np.full(starts[0].size, LOG_CEIL)
    best = None
    for u0 in starts:
        res = maximize(fun, u0, opts.max_iter, opts.grad_tol, bounds)
        if math.isfinite(res.value) and (best is None or res.value > best.value):
            best = res
    if best is None:
        raise DomainError(f"{name}: log-likelihood is -inf at every start")
    return best


def _prepare(data: Sequence[float]) -> tuple[np.ndarray, float, float]:
    x, _ = _positive_data(data, "data")
    if x.size < 10:
        raise DomainError("at least 10 observations are required")
    c = float(np.mean(x))
    z = np.ascontiguousarray(x / c)
    cv2 = float(np.var(z, ddof=1))
    if not cv2 > 0.0:
        raise DomainError("data have zero spread")
    return z, c, cv2


def _safe(f: Callable[[], float]) -> float:
    try:
        v = f()
    except (DomainError, OverflowError, ValueError):
        return -math.inf
    return v if math.isfinite(v) else -math.inf


def fit_gamma(data: Sequence[float], opts: FitOptions = FitOptions()) -> RivalFit:
    z, c, cv2 = _prepare(data)
    n = z.size

    def mean_ll(u):
        return _safe(lambda: float(np.mean(_gamma_logpdf(z, math.exp(u[0]), math.exp(u[1])))))

    shape0 = 1.0 / cv2
    res = _fit("Gamma", z, mean_ll, [np.array([math.log(shape0), math.log(shape0)])], opts)
    shape, rate = math.exp(res.u[0]), math.exp(res.u[1]) / c
    return RivalFit("Gamma", GammaParams(shape, rate), res.value * n - n * math.log(c),
                    res.converged, res.iterations, res.grad_norm, N_PARAMS["Gamma"])


def fit_k(data: Sequence[float], opts: FitOptions = FitOptions()) -> RivalFit:
    z, c, cv2 = _prepare(data)
    n = z.size

    def mean_ll(u):
        a, looks, m = math.exp(u[0]), math.exp(u[1]), math.exp(u[2])
        return _safe(lambda: _backend.kernels.k_loglik(z, a, looks, m) / n)

    # second moment: E X^2 / m^2 = (1 + 1/alpha)(1 + 1/L)
    ratio = 1.0 + cv2
    starts = []
    for looks in (1.0, 4.0):
        t = ratio / (1.0 + 1.0 / looks) - 1.0
        a = 1.0 / t if t > 1e-3 else 1e3
        starts.append(np.array([math.log(a), math.log(looks), 0.0]))
    res = _fit("K", z, mean_ll, starts, opts)
    p = KParams(math.exp(res.u[0]), math.exp(res.u[1]), math.exp(res.u[2]) * c)
    return RivalFit("K", p, res.value * n - n * math.log(c),
                    res.converged, res.iterations, res.grad_norm, N_PARAMS["K"])


def fit_g0(data: Sequence[float], opts: FitOptions = FitOptions()) -> RivalFit:
    z, c, cv2 = _prepare(data)
    n = z.size

    def mean_ll(u):
        a, g, looks = -math.exp(u[0]), math.exp(u[1]), math.exp(u[2])
        return _safe(lambda: float(np.mean(_g0_logpdf(z, a, g, looks))))

    starts = []
    for looks in (1.0, 4.0):
        a = -3.0
        # mean of G0 is gamma / (-alpha - 1)
        starts.append(np.array([math.log(-a), math.log(-a - 1.0), math.log(looks)]))
    res = _fit("G0", z, mean_ll, starts, opts)
    p = G0Params(-math.exp(res.u[0]), math.exp(res.u[1]) * c, math.exp(res.u[2]))
    return RivalFit("G0", p, res.value * n - n * math.log(c),
                    res.converged, res.iterations, res.grad_norm, N_PARAMS["G0"])


def criteria(loglik: float, k_params: int, n: int) -> CriteriaTriple:
    """AIC, AICc (None when n <= k + 1) and BIC; lower is better."""
    if k_params < 1 or n < 1:
        raise DomainError("k_params and n must be positive")
    aic = 2.0 * k_params - 2.0 * loglik
    aicc = aic + 2.0 * k_params * (k_params + 1) / (n - k_params - 1) if n > k_params + 1 else None
    bic = k_params * math.log(n) - 2.0 * loglik
    return CriteriaTriple(aic, aicc, bic)


# --- compound-representation samplers (test oracles) ---------------------------

def sample_gamma(n: int, p: GammaParams, seed: int) -> np.ndarray:
    return make_rng(seed, 0x6A).standard_gamma(p.shape, n) / p.rate


def sample_k(n: int, p: KParams, seed: int) -> np.ndarray:
    """Gamma texture (unit mean) times gamma speckle (unit mean), scaled by the mean."""
    rng = make_rng(seed, 0x4B)
    texture = rng.standard_gamma(p.alpha_k, n) / p.alpha_k
    speckle = rng.standard_gamma(p.looks, n) / p.looks
    return p.mean_intensity * texture * speckle


def sample_g0(n: int, p: G0Params, seed: int) -> np.ndarray:
    """Reciprocal-gamma texture times unit-mean gamma speckle."""
    rng = make_rng(seed, 0x47)
    texture = p.gamma_g / rng.standard_gamma(-p.alpha_g, n)
    speckle = rng.standard_gamma(p.looks, n) / p.looks
    return texture * speckle
