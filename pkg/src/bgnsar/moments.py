"""Series representation of BGN moments and a quadrature reference.

The n-th moment is assembled from integrals

    J(i, k, s) = integral over (0, inf) of z^i phi_s(z) Phi_s(z)^k dz,

which are evaluated from the power series of the lower incomplete gamma
function raised to integer powers. Term-by-term integration of that series over
(0, inf) does not converge once the power is at least one, so the integral is
split at y = Y (in the variable y = z^s). The finite part (0, Y) is summed in
extended precision with mpmath; the remainder is replaced by its leading term,
with Y chosen so the neglected piece is below the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy import integrate

from . import _backend
from .bgn import BgnParams, bgn_quantile
from .errors import DomainError, QuadratureError, SeriesDivergenceError
from .specfun import ln_gamma, reg_gamma_q

__all__ = [
    "SeriesTruncation",
    "SeriesValue",
    "v_coeff",
    "c_coeff",
    "j_integral",
    "moment_series",
    "moment_quadrature",
]


@dataclass(frozen=True)
class SeriesTruncation:
    j_max: int = 40
    k_max: int = 60
    m_max: int = 200
    tol: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("j_max", "k_max", "m_max"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1")
        if not (0.0 < self.tol < 1e-2):
            raise DomainError(f"tol must lie in (0, 1e-2), got {self.tol}")


class SeriesValue(float):
    """A float carrying whether the series that produced it terminates exactly.

    ``validated`` is True when every infinite sum involved is actually finite
    (integer alpha and beta); otherwise the value is a heuristic truncation.
    """

    validated: bool

    def __new__(cls, value: float, validated: bool) -> "SeriesValue":
        obj = super().__new__(cls, value)
        obj.validated = validated
        return obj


def _gbinom(a: float, m: int) -> float:
    # generalised binomial coefficient C(a, m)
    out = 1.0
    for r in range(m):
        out *= (a - r) / (r + 1)
    return out


def _is_int(v: float) -> bool:
    return float(v).is_integer()


def v_coeff(alpha: float, k: int, m_max: int = 200) -> float:
    """Coefficient of Phi^k in the expansion of Phi^alpha around Phi = 1.

    v_k = sum_{m=k}^{m_max} (-1)^(k+m) C(alpha, m) C(m, k). For integer alpha
    the sum terminates and gives the exact indicator of k == alpha. For other
    alpha the partial sums approach their limit like M^-(alpha - k), so that
    leading power is removed by extrapolating from the partial sums at M and M/2.
    """
    alpha = float(alpha)
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be positive, got {alpha}")
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k > m_max:
        return 0.0
    # C(alpha, m) C(m, k) = C(alpha, k) C(alpha - k, m - k)
    lead = _gbinom(alpha, k)
    if lead == 0.0:
        return 0.0
    rest = alpha - k
    n_terms = m_max - k
    partial = []
    term = 1.0
    total = 0.0
    for r in range(0, n_terms + 1):
        if r > 0:
            term *= -(rest - r + 1) / r
        total += term
        partial.append(total)
        if term == 0.0 and _is_int(alpha):
            break
    if _is_int(alpha) or n_terms < 4:
        return lead * partial[-1]
    half = n_terms // 2
    w_full = float(n_terms) ** rest
    w_half = float(half) ** rest
    return lead * (partial[n_terms] * w_full - partial[half] * w_half) / (w_full - w_half)


@lru_cache(maxsize=64)
def _c_table_float(j: int, s: float, upto: int) -> tuple[float, ...]:
    a = 1.0 / s
    base = [(-1.0) ** r / ((a + r) * math.factorial(r)) for r in range(upto + 1)]
    c = [s ** j]
    for m in range(1, upto + 1):
        acc = 0.0
        for r in range(1, m + 1):
            acc += (r * j - m + r) * base[r] * c[m - r]
        c.append(acc / (m * s))
    return tuple(c)


def c_coeff(m: int, j: int, s: float) -> float:
    """Coefficient of y^m in (sum_r (-1)^r y^r / ((1/s + r) r!))^j."""
    if m < 0 or j < 0:
        raise DomainError("m and j must be nonnegative")
    s = float(s)
    if not (s > 0.0 and math.isfinite(s)):
        raise DomainError(f"s must be positive, got {s}")
    return _c_table_float(j, s, m)[m]


# --- extended precision pieces ------------------------------------------------

@lru_cache(maxsize=128)
def _c_table_mp(j: int, s: float, upto: int, dps: int) -> tuple:
    with mpmath.workdps(dps):
        ss = mpmath.mpf(s)
        a = 1 / ss
        base = [mpmath.mpf(-1) ** r / ((a + r) * mpmath.factorial(r)) for r in range(upto + 1)]
        c = [ss ** j]
        for m in range(1, upto + 1):
            acc = mpmath.mpf(0)
            for r in range(1, m + 1):
                acc += (r * j - m + r) * base[r] * c[m - r]
            c.append(acc / (m * ss))
        return tuple(c)


def _lower_gammas_mp(b: mpmath.mpf, y: mpmath.mpf, upto: int) -> list:
    # gamma(b + m, Y) for m = 0..upto by downward recurrence, which is stable
    top = mpmath.gammainc(b + upto, 0, y)
    out = [top]
    ey = mpmath.exp(-y)
    g = top
    for m in range(upto - 1, -1, -1):
        c = b + m
        g = (g + y ** c * ey) / c
        out.append(g)
    out.reverse()
    return out


def _tail_split(i: int, k: int, s: float, tol: float) -> float:
    """Smallest Y (on a 1/4 grid) at which the tail approximation error is below tol."""
    a = 1.0 / s
    b0 = (i + 1) / s
    lga = ln_gamma(a)
    # J >= 2^-k * Gamma(b0) / (2 Gamma(a)) since Phi >= 1/2 on the positive axis
    jlow = math.exp(ln_gamma(b0) - lga - math.log(2.0)) * 2.0 ** -k
    target = 0.01 * tol * jlow
    y = 0.25
    while y < 1e4:
        tail0 = math.exp(ln_gamma(b0) - lga - math.log(2.0)) * reg_gamma_q(b0, y)
        err = k * 0.5 * reg_gamma_q(a, y) * tail0
        if err <= target:
            return y
        y += 0.25
    return y


def j_integral(i: int, k: int, s: float, trunc: SeriesTruncation = SeriesTruncation()) -> float:
    """J(i, k, s) = integral over (0, inf) of z^i phi_s(z) Phi_s(z)^k dz."""
    if i < 0 or k < 0:
        raise DomainError("i and k must be nonnegative")
    s = float(s)
    if not (s > 0.0 and math.isfinite(s)):
        raise DomainError(f"s must be positive, got {s}")
    a = 1.0 / s
    b0 = (i + 1) / s
    if k == 0:
        return math.exp(ln_gamma(b0) - ln_gamma(a) - math.log(2.0))
    big_y = _tail_split(i, k, s, trunc.tol)
    upto = trunc.m_max
    dps = 25 + int(math.ceil((k * big_y + k * abs(math.log(s)) + b0 * math.log(big_y + 1.0)) / math.log(10.0)))
    with mpmath.workdps(dps):
        y = mpmath.mpf(big_y)
        ga = mpmath.gamma(mpmath.mpf(a))
        two_ga = 2 * ga
        jscale = mpmath.gamma(mpmath.mpf(b0)) / two_ga / mpmath.mpf(2) ** k
        head = mpmath.mpf(0)
        for j in range(k + 1):
            bj = mpmath.mpf(i + j + 1) / s
            weight = mpmath.binomial(k, j) * ga ** (k - j) / two_ga ** (k + 1)
            if j == 0:
                inner = mpmath.gammainc(bj, 0, y)
            else:
                # the recursion cancels roughly ((j+1)/j)^m, so it needs extra digits
                cdps = dps + 10 + int(math.ceil(upto * math.log10((j + 1) / j)))
                coeffs = _c_table_mp(j, s, upto, cdps)
                gam = _lower_gammas_mp(bj, y, upto)
                eps_abs = 1e-3 * trunc.tol * jscale / (weight * (k + 1))
                inner = mpmath.mpf(0)
                small = 0
                peak_seen = False
                last = None
                for m in range(upto + 1):
                    term = coeffs[m] * gam[m]
                    inner += term
                    mag = abs(term)
                    if last is not None and mag < last:
                        peak_seen = True
                    last = mag
                    if peak_seen and mag < eps_abs:
                        small += 1
                        if small >= 3:
                            break
                    else:
                        small = 0
                else:
                    raise SeriesDivergenceError(
                        f"J({i},{k},{s}) inner series for power {j} failed to settle "
                        f"within {upto} terms (split at Y={big_y})")
            head += weight * inner
        tail = mpmath.gammainc(mpmath.mpf(b0), y, mpmath.inf) / two_ga
        return float(head + tail)


def _z_moment(i: int, p: BgnParams, trunc: SeriesTruncation) -> tuple[float, bool]:
    """E(Z^i) for Z ~ BGN(alpha, beta, 0, 1, s) and whether the sums were finite."""
    if i == 0:
        return 1.0, True
    al, be, s = p.alpha, p.beta, p.s
    beta_int = _is_int(be)
    alpha_int = _is_int(al)
    validated = beta_int and alpha_int
    j_top = int(be) - 1 if beta_int else trunc.j_max
    cache: dict[int, float] = {}

    def jik(k: int) -> float:
        if k not in cache:
            cache[k] = j_integral(i, k, s, trunc)
        return cache[k]

    total = 0.0
    for j in range(j_top + 1):
        wj = (-1.0) ** j * _gbinom(be - 1.0, j)
        if wj == 0.0:
            continue
        big_n = al - 1.0 + j
        inner = 0.0
        if _is_int(big_n):
            nn = int(round(big_n))
            for k in range(nn + 1):
                coef = (1.0 if k == nn else 0.0) + (-1.0) ** (i + k) * math.comb(nn, k)
                if coef != 0.0:
                    inner += coef * jik(k)
        else:
            for k in range(trunc.k_max + 1):
                coef = v_coeff(big_n, k, trunc.m_max) + (-1.0) ** (i + k) * _gbinom(big_n, k)
                if coef != 0.0:
                    inner += coef * jik(k)
        total += wj * inner
    lnb = _backend.kernels.ln_beta(al, be)
    return total * math.exp(-lnb), validated


def moment_series(n: int, p: BgnParams, trunc: SeriesTruncation = SeriesTruncation()) -> SeriesValue:
    """E(X^n) from the series representation.

    Moments are expanded around the location, E(X^n) = sum_i C(n,i) mu^(n-i)
    sigma^i E(Z^i), which is valid for every mu including 0. The result's
    ``validated`` flag is False unless alpha and beta are integers.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    total = 0.0
    validated = True
    for i in range(n + 1):
        ez, ok = _z_moment(i, p, trunc)
        validated = validated and ok
        total += math.comb(n, i) * p.mu ** (n - i) * p.sigma ** i * ez
    return SeriesValue(total, validated)


def moment_quadrature(n: int, p: BgnParams) -> float:
    """E(X^n) by adaptive quadrature of x^n f(x); the reference for moment_series."""
    if n < 1:
        raise DomainError("n must be >= 1")
    k = _backend.kernels
    buf = np.empty(1)
    out = np.empty(1)
    par = p.as_tuple()

    def integrand(x: float) -> float:
        buf[0] = x
        k.bgn_log_pdf(buf, *par, out)
        return x ** n * math.exp(out[0]) if out[0] > -745.0 else 0.0

    qs = bgn_quantile(np.array([1e-10, 0.25, 0.75, 1.0 - 1e-10]), p)
    knots = sorted(set([float(qs[0]), float(qs[1]), p.mu, float(qs[2]), float(qs[3])]))
    pieces = []
    for lo, hi in zip(knots[:-1], knots[1:]):
        if hi > lo:
            pieces.append((lo, hi))
    total = 0.0
    for lo, hi in [(-math.inf, knots[0])] + pieces + [(knots[-1], math.inf)]:
        val, err, info = integrate.quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-11,
                                        limit=400, full_output=True)[:3]
        total += val
        scale = max(abs(val), 1e-12)
        if err > 1e-8 * max(scale, 1.0):
            raise QuadratureError(f"quadrature error {err:.3g} on [{lo}, {hi}] exceeds target")
    return total
