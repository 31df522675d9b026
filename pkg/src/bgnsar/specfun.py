"""Special functions: gamma family, incomplete beta, Bessel K.

All routines are double precision and work on scalars. The heavy lifting is
done by the active kernel module (compiled or pure Python); this layer adds
argument checking and turns kernel failure flags into exceptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _backend
from .errors import ConvergenceError, DomainError

__all__ = [
    "Accuracy",
    "ln_gamma",
    "digamma",
    "upper_inc_gamma",
    "lower_inc_gamma",
    "reg_gamma_p",
    "reg_gamma_q",
    "reg_inc_beta",
    "reg_inc_beta_inv",
    "gamma_quantile",
    "bessel_k",
    "log_bessel_k",
    "t3",
    "dgamma_ds",
]


@dataclass(frozen=True)
class Accuracy:
    """Tolerance and iteration budget for the iterative kernels."""

    rel_tol: float = 1e-12
    max_iter: int = 500

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol < 1e-3):
            raise DomainError(f"rel_tol must lie in (0, 1e-3), got {self.rel_tol}")
        if self.max_iter < 10:
            raise DomainError(f"max_iter must be >= 10, got {self.max_iter}")

    @property
    def term_eps(self) -> float:
        # per-term stopping threshold used inside series and continued fractions
        return max(self.rel_tol * 1e-3, 1e-16)


DEFAULT = Accuracy()


def _finite(name: str, v: float) -> float:
    v = float(v)
    if not math.isfinite(v):
        raise DomainError(f"{name} must be finite, got {v}")
    return v


def _positive(name: str, v: float) -> float:
    v = _finite(name, v)
    if v <= 0.0:
        raise DomainError(f"{name} must be positive, got {v}")
    return v


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    return _backend.kernels.lgamma(_positive("x", x))


def digamma(x: float) -> float:
    """psi(x) = d/dx ln Gamma(x) for x > 0."""
    return _backend.kernels.digamma(_positive("x", x))


def _gamma_q(a: float, x: float, need: bool, acc: Accuracy):
    a = _positive("a", a)
    x = float(x)
    if math.isnan(x) or x < 0.0:
        raise DomainError(f"x must be nonnegative, got {x}")
    k = _backend.kernels
    lga = k.lgamma(a)
    psia = k.digamma(a) if need else 0.0
    res = k.gamma_q_full(a, x, lga, psia, need, acc.term_eps, acc.max_iter)
    if not res[5]:
        raise ConvergenceError(f"incomplete gamma did not converge for a={a}, x={x}")
    return lga, res


def reg_gamma_q(a: float, x: float, acc: Accuracy = DEFAULT) -> float:
    """Regularised upper incomplete gamma Q(a, x)."""
    return _gamma_q(a, x, False, acc)[1][1]


def reg_gamma_p(a: float, x: float, acc: Accuracy = DEFAULT) -> float:
    """Regularised lower incomplete gamma P(a, x)."""
    return _gamma_q(a, x, False, acc)[1][4]


def upper_inc_gamma(a: float, x: float, acc: Accuracy = DEFAULT) -> float:
    """Gamma(a, x) = integral of t^(a-1) e^-t over (x, inf)."""
    lga, res = _gamma_q(a, x, False, acc)
    return math.exp(lga + res[0])


def lower_inc_gamma(a: float, x: float, acc: Accuracy = DEFAULT) -> float:
    """gamma(a, x) = integral of t^(a-1) e^-t over (0, x)."""
    lga, res = _gamma_q(a, x, False, acc)
    return math.exp(lga) * res[4]


def reg_inc_beta(y: float, alpha: float, beta: float, acc: Accuracy = DEFAULT) -> float:
    """Regularised incomplete beta ratio I_y(alpha, beta)."""
    y = _finite("y", y)
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"y must lie in [0, 1], got {y}")
    alpha = _positive("alpha", alpha)
    beta = _positive("beta", beta)
    k = _backend.kernels
    f, _ = k.inc_beta_pair(y, 1.0 - y, alpha, beta, k.ln_beta(alpha, beta),
                           acc.term_eps, acc.max_iter)
    if math.isnan(f):
        raise ConvergenceError(f"incomplete beta did not converge at y={y}")
    return f


def reg_inc_beta_inv(p: float, alpha: float, beta: float, acc: Accuracy = DEFAULT) -> float:
    """y in [0, 1] with I_y(alpha, beta) = p."""
    return reg_inc_beta_inv_pair(p, alpha, beta, acc)[0]


def reg_inc_beta_inv_pair(p: float, alpha: float, beta: float,
                          acc: Accuracy = DEFAULT) -> tuple[float, float]:
    """(y, 1 - y) with I_y(alpha, beta) = p; the complement keeps full accuracy."""
    p = _finite("p", p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    alpha = _positive("alpha", alpha)
    beta = _positive("beta", beta)
    y, yc = _backend.kernels.inc_beta_inv(p, alpha, beta, min(acc.rel_tol, 1e-14) * 10, acc.max_iter)
    if math.isnan(y):
        raise ConvergenceError(f"inverse incomplete beta did not converge for p={p}")
    return y, yc


def gamma_quantile(p: float, a: float, acc: Accuracy = DEFAULT) -> float:
    """x >= 0 with P(a, x) = p, for 0 <= p < 1."""
    p = _finite("p", p)
    if not 0.0 <= p < 1.0:
        raise DomainError(f"p must lie in [0, 1), got {p}")
    a = _positive("a", a)
    x = _backend.kernels.gamma_inv(a, p, math.log1p(-p), min(acc.rel_tol, 1e-14), acc.max_iter)
    if math.isnan(x):
        raise ConvergenceError(f"gamma quantile did not converge for p={p}, a={a}")
    return x


def log_bessel_k(nu: float, x: float) -> float:
    """ln K_nu(x) for x > 0; stays finite where K_nu itself under/overflows."""
    nu = _finite("nu", nu)
    x = _positive("x", x)
    v = _backend.kernels.log_bessel_k(nu, x)
    if math.isnan(v):
        raise ConvergenceError(f"Bessel K did not converge for nu={nu}, x={x}")
    return v


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind K_nu(x), x > 0."""
    return math.exp(log_bessel_k(nu, x))


def t3(a: float, x: float, acc: Accuracy = DEFAULT) -> float:
    """Meijer-G helper T(3, a, x), defined by dGamma(a,x)/da = ln x Gamma(a,x) + x T(3,a,x).

    For x <= 2 the hypergeometric series is summed directly. Beyond that the
    alternating series cancels badly, so the value is recovered from the
    a-derivative of the incomplete gamma computed alongside the series or
    continued fraction.
    """
    a = _positive("a", a)
    x = _positive("x", x)
    v = _backend.kernels.t3(a, x, acc.term_eps, acc.max_iter)
    if math.isnan(v):
        raise ConvergenceError(f"T(3,a,x) series did not converge for a={a}, x={x}")
    return v


def dgamma_ds(s: float, x: float, acc: Accuracy = DEFAULT) -> float:
    """d/ds Gamma(1/s, x^s)."""
    s = _positive("s", s)
    x = _positive("x", x)
    v = _backend.kernels.dgamma_ds(s, x, acc.term_eps, acc.max_iter)
    if math.isnan(v):
        raise ConvergenceError(f"dgamma_ds did not converge for s={s}, x={x}")
    return v
