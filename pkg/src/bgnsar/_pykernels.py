"""Pure-Python numerical kernels.

This module mirrors the compiled ``_kernels`` extension function for function.
It is used when the extension is not built or when ``BGNSAR_BACKEND=python``.
Kernels never raise on numerical trouble; they return NaN (or a False flag)
and the public wrappers translate that into exceptions.
"""

from __future__ import annotations

import math

from ._tables import DEBYE_U, ZETA_M1, ZETA_MAX

NAN = math.nan
INF = math.inf
LN2 = math.log(2.0)
LN_PI = math.log(math.pi)
EULER = 0.57721566490153286061
HALF_LN_2PI = 0.5 * math.log(2.0 * math.pi)
FPMIN = 1e-300
EPS = 1e-15
MAXIT = 5000

_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


# ----------------------------------------------------------------------------
# log-gamma and digamma
# ----------------------------------------------------------------------------

def _stirling_corr(x):
    r = 1.0 / x
    r2 = r * r
    acc = 0.0
    for c in reversed(_STIRLING):
        acc = acc * r2 + c
    return acc * r


def _stirling(x):
    return (x - 0.5) * math.log(x) - x + HALF_LN_2PI + _stirling_corr(x)


def _lg2(eps):
    # ln Gamma(2 + eps) for |eps| <= 1/2
    total = (1.0 - EULER) * eps
    pw = -eps
    for k in range(2, ZETA_MAX + 1):
        pw *= -eps
        term = ZETA_M1[k] * pw / k
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return total


def lgamma(x):
    if not (0.0 < x < INF):
        return NAN
    if x < 0.5:
        return lgamma(x + 1.0) - math.log(x)
    if x < 1.5:
        e = x - 1.0
        return _lg2(e) - math.log1p(e)
    if x < 2.5:
        return _lg2(x - 2.0)
    if x < 10.0:
        prod = 1.0
        while x < 10.0:
            prod *= x
            x += 1.0
        return _stirling(x) - math.log(prod)
    return _stirling(x)


def _psi_tail(x):
    r2 = 1.0 / (x * x)
    return r2 * (1.0 / 12 - r2 * (1.0 / 120 - r2 * (1.0 / 252 - r2 * (
        1.0 / 240 - r2 * (1.0 / 132 - r2 * (691.0 / 32760 - r2 / 12))))))


def digamma(x):
    if not (0.0 < x < INF):
        return NAN
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    return acc + math.log(x) - 0.5 / x - _psi_tail(x)


def lgamma_shift(a, b):
    """ln Gamma(a + b) - ln Gamma(a) without cancellation when a is large."""
    if a < 10.0:
        return lgamma(a + b) - lgamma(a)
    return ((a - 0.5) * math.log1p(b / a) + b * math.log(a + b) - b
            + _stirling_corr(a + b) - _stirling_corr(a))


def digamma_shift(a, b):
    """psi(a + b) - psi(a) without cancellation when a is large."""
    if a < 10.0:
        return digamma(a + b) - digamma(a)
    return math.log1p(b / a) + 0.5 * b / (a * (a + b)) - (_psi_tail(a + b) - _psi_tail(a))


# ----------------------------------------------------------------------------
# incomplete gamma with a-derivative
# ----------------------------------------------------------------------------

def _gser(a, x, eps, maxit, need):
    # gamma(a, x) = x^a e^-x * S ; returns (S, dS/da, ok)
    ap = a
    term = 1.0 / a
    s = term
    acc = term
    ds = -term * acc
    for _ in range(maxit):
        ap += 1.0
        term *= x / ap
        s += term
        if need:
            acc += 1.0 / ap
            dterm = -term * acc
            ds += dterm
            if term <= eps * s and -dterm <= -eps * ds:
                return s, ds, True
        elif term <= eps * s:
            return s, ds, True
    return s, ds, False


def _gcf(a, x, eps, maxit, need):
    # Gamma(a, x) = x^a e^-x * H ; modified Lentz with forward-mode derivative in a
    b = x + 1.0 - a
    c = 1.0 / FPMIN
    dc = 0.0
    d = 1.0 / b
    dd = d * d
    h = d
    dh = dd
    for i in range(1, maxit + 1):
        an = -i * (i - a)
        b += 2.0
        big_d = an * d + b
        if abs(big_d) < FPMIN:
            big_d = FPMIN
        big_c = b + an / c
        if abs(big_c) < FPMIN:
            big_c = FPMIN
        if need:
            ddd = i * d + an * dd - 1.0
            dcc = -1.0 + (i - an * dc / c) / c
        d = 1.0 / big_d
        c = big_c
        dl = d * c
        if need:
            dd = -ddd * d * d
            dc = dcc
            ddl = dd * c + d * dc
            dh = dh * dl + h * ddl
        h *= dl
        if abs(dl - 1.0) <= eps:
            if not need or abs(ddl) <= eps * (1.0 + abs(dh / h)):
                return h, dh, True
    return h, dh, False


def gamma_q_full(a, x, lga, psia, need=True, eps=EPS, maxit=MAXIT):
    """Regularised upper incomplete gamma and friends.

    Returns ``(logQ, Q, dlogQ/da, R, P, ok)`` where ``R = e^-x / (Gamma(a) Q)``.
    ``lga`` and ``psia`` are ln Gamma(a) and digamma(a); ``psia`` is ignored
    when ``need`` is false.
    """
    if x <= 0.0:
        return 0.0, 1.0, 0.0, math.exp(-lga), 0.0, True
    if x == INF:
        return -INF, 0.0, NAN, NAN, 1.0, True
    lx = math.log(x)
    if x < a + 1.0:
        s, ds, ok = _gser(a, x, eps, maxit, need)
        pref = math.exp(a * lx - x - lga)
        p = pref * s
        q = 1.0 - p
        if q <= 0.0:
            return -INF, 0.0, NAN, NAN, 1.0, ok
        dlq = 0.0
        if need:
            dp = p * (lx - psia) + pref * ds
            dlq = -dp / q
        return math.log(q), q, dlq, math.exp(-x - lga) / q, p, ok
    h, dh, ok = _gcf(a, x, eps, maxit, need)
    lh = math.log(h)
    logq = a * lx - x + lh - lga
    q = math.exp(logq)
    dlq = lx + dh / h - psia if need else 0.0
    return logq, q, dlq, math.exp(-a * lx - lh), -math.expm1(logq), ok


def gamma_p(a, x):
    r = gamma_q_full(a, x, lgamma(a), 0.0, False)
    return r[4] if r[5] else NAN


def gamma_q(a, x):
    r = gamma_q_full(a, x, lgamma(a), 0.0, False)
    return r[1] if r[5] else NAN


def log_gamma_q(a, x):
    r = gamma_q_full(a, x, lgamma(a), 0.0, False)
    return r[0] if r[5] else NAN


def dlog_gamma_q_da(a, x):
    r = gamma_q_full(a, x, lgamma(a), digamma(a), True)
    return r[2] if r[5] else NAN


def _t3_hyper(a, x, lga, psia, eps, maxit):
    # x^(a-1) sum (-x)^n / (n! (a+n)^2) - Gamma(a) (ln x - psi(a)) / x
    term = 1.0
    total = 1.0 / (a * a)
    for n in range(1, maxit + 1):
        term *= -x / n
        inc = term / ((a + n) * (a + n))
        total += inc
        if abs(inc) <= eps * abs(total):
            lx = math.log(x)
            ga = math.exp(lga)
            return math.exp((a - 1.0) * lx) * total - ga * (lx - psia) / x
    return NAN


def t3(a, x, eps=EPS, maxit=MAXIT):
    """Meijer-G helper: dGamma(a,x)/da = ln x Gamma(a,x) + x T3(a,x)."""
    if not (a > 0.0 and 0.0 < x < INF):
        return NAN
    lga = lgamma(a)
    psia = digamma(a)
    if x <= 2.0:
        return _t3_hyper(a, x, lga, psia, eps, maxit)
    logq, q, dlq, _, _, ok = gamma_q_full(a, x, lga, psia, True, eps, maxit)
    if not ok:
        return NAN
    # dGamma/da = Gamma(a,x) (psi(a) + dlogQ/da)
    upper = math.exp(lga + logq)
    return upper * (psia + dlq - math.log(x)) / x


def dgamma_ds(s, x, eps=EPS, maxit=MAXIT):
    """d/ds of Gamma(1/s, x^s)."""
    if not (s > 0.0 and 0.0 < x < INF):
        return NAN
    a = 1.0 / s
    lx = math.log(x)
    y = math.exp(s * lx)
    lga = lgamma(a)
    psia = digamma(a)
    logq, q, dlq, _, _, ok = gamma_q_full(a, y, lga, psia, True, eps, maxit)
    if not ok:
        return NAN
    upper = math.exp(lga + logq)
    return -upper * (psia + dlq) / (s * s) - x * math.exp(-y) * lx


# ----------------------------------------------------------------------------
# gamma quantile
# ----------------------------------------------------------------------------

def _normal_upper_z(lp):
    # rough upper-tail normal quantile from the log of a tail probability <= 1/2
    t = math.sqrt(-2.0 * lp)
    return t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + t * 0.04481))


def gamma_inv(a, p, logq, eps=1e-14, maxit=400):
    """x with P(a, x) = p; ``logq`` is ln(1 - p) supplied accurately.

    The lower branch is used for p <= 1/2, the upper branch otherwise, so
    upper-tail probabilities far below machine epsilon are honoured.
    """
    if not (a > 0.0) or math.isnan(p) or math.isnan(logq):
        return NAN
    if p <= 0.0:
        return 0.0
    if logq == -INF:
        return INF
    lga = lgamma(a)
    lower = p <= 0.5
    target = math.log(p) if lower else logq
    # starting value in t = ln x
    if a > 1.0:
        z = _normal_upper_z(target)
        if lower:
            z = -z
        c = 1.0 / (9.0 * a)
        base = 1.0 - c + z * math.sqrt(c)
        t = math.log(a) + 3.0 * math.log(base) if base > 0.0 else (target + lga + math.log(a)) / a
        if lower:
            t = min(t, (target + lga + math.log(a)) / a + 50.0)
    else:
        cut = 1.0 - a * (0.253 + 0.12 * a)
        if p < cut:
            t = (math.log(p) - math.log(cut)) / a
        else:
            t = math.log(1.0 - logq + math.log1p(-cut))
    lo = -INF
    hi = INF
    prev = INF
    for _ in range(maxit):
        if t < -740.0:
            t = -740.0
        elif t > 709.0:
            t = 709.0
        x = math.exp(t)
        logq_x, q, _, _, pp, ok = gamma_q_full(a, x, lga, 0.0, False)
        if lower:
            if x < a + 1.0:
                lv = math.log(pp) if pp > 0.0 else -INF
            else:
                lv = math.log1p(-q)
            g = lv - target
            gp = math.exp(a * t - x - lga - lv) if lv > -INF else INF
        else:
            g = target - logq_x
            gp = math.exp(a * t - x - lga - logq_x)
        if g == 0.0:
            return x
        if g > 0.0:
            hi = t
        else:
            lo = t
        tn = t - g / gp if gp > 0.0 and gp < INF else NAN
        if abs(g) > 0.5 * prev and lo > -INF and hi < INF:
            tn = NAN
        prev = abs(g)
        if not (lo < tn < hi):
            if lo == -INF:
                tn = t - 2.0 * (1.0 + abs(t))
            elif hi == INF:
                tn = t + 1.0 + 0.5 * abs(t)
            else:
                tn = 0.5 * (lo + hi)
        if abs(tn - t) <= eps * max(1.0, abs(t)):
            return math.exp(tn)
        if t == -740.0 and tn <= t:
            return 0.0
        t = tn
    return NAN


# ----------------------------------------------------------------------------
# incomplete beta
# ----------------------------------------------------------------------------

def _betacf(a, b, x, eps, maxit):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, maxit + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        dl = d * c
        h *= dl
        if abs(dl - 1.0) <= eps:
            return h, True
    return h, False


def ln_beta(a, b):
    if a < b:
        a, b = b, a
    # a is the larger argument
    return lgamma(b) - lgamma_shift(a, b)


def inc_beta_pair(x, xc, a, b, lnb, eps=EPS, maxit=MAXIT):
    """(I_x(a, b), 1 - I_x(a, b)); ``xc`` is 1 - x supplied accurately."""
    if math.isnan(x) or math.isnan(xc):
        return NAN, NAN
    if x <= 0.0:
        return 0.0, 1.0
    if xc <= 0.0:
        return 1.0, 0.0
    lbt = a * math.log(x) + b * math.log(xc) - lnb
    if x < (a + 1.0) / (a + b + 2.0):
        h, ok = _betacf(a, b, x, eps, maxit)
        if not ok:
            return NAN, NAN
        v = math.exp(lbt) * h / a
        return v, 1.0 - v
    h, ok = _betacf(b, a, xc, eps, maxit)
    if not ok:
        return NAN, NAN
    v = math.exp(lbt) * h / b
    return 1.0 - v, v


def inc_beta(x, a, b):
    return inc_beta_pair(x, 1.0 - x, a, b, ln_beta(a, b))[0]


def _log_inc_beta(x, xc, a, b, lnb, eps, maxit):
    lbt = a * math.log(x) + b * math.log(xc) - lnb
    if x < (a + 1.0) / (a + b + 2.0):
        h, ok = _betacf(a, b, x, eps, maxit)
        return lbt + math.log(h) - math.log(a), ok
    h, ok = _betacf(b, a, xc, eps, maxit)
    return math.log1p(-math.exp(lbt) * h / b), ok


def _beta_solve(p, a, b, lnb, upper_var, eps, maxit):
    # Newton in t = ln v, v = y (lower) or 1 - y (upper), with v in (0, 1/2].
    # The target is ln p when p <= 1/2 and ln(1 - p) otherwise, so tiny
    # probabilities on either side keep full relative accuracy.
    use_p = p <= 0.5
    target = math.log(p) if use_p else math.log1p(-p)
    # g must increase with t
    sgn = 1.0 if use_p != upper_var else -1.0
    lo = -INF
    hi = -LN2
    prev = INF
    if upper_var:
        t = min((math.log1p(-p) + math.log(b) + lnb) / b, hi)
    else:
        t = min((math.log(p) + math.log(a) + lnb) / a, hi)
    for _ in range(maxit):
        if t < -740.0:
            t = -740.0
        v = math.exp(t)
        vc = -math.expm1(t)
        y, yc = (vc, v) if upper_var else (v, vc)
        if use_p:
            val, ok = _log_inc_beta(y, yc, a, b, lnb, EPS, MAXIT)
        else:
            val, ok = _log_inc_beta(yc, y, b, a, lnb, EPS, MAXIT)
        if not ok:
            return NAN
        g = sgn * (val - target)
        if g == 0.0:
            return v
        if g > 0.0:
            hi = t
        else:
            lo = t
        ld = a * math.log(y) + b * math.log(yc) - lnb - (math.log(y) if upper_var else math.log(yc))
        gp = math.exp(ld - val)
        tn = t - g / gp if 0.0 < gp < INF else NAN
        if abs(g) > 0.5 * prev and lo > -INF:
            tn = NAN
        prev = abs(g)
        if not (lo < tn < hi):
            if lo == -INF:
                tn = t - 2.0 * (1.0 + abs(t))
            else:
                tn = 0.5 * (lo + hi)
        if abs(tn - t) <= eps * max(1.0, abs(t)):
            return math.exp(tn)
        if t == -740.0 and tn <= t:
            return 0.0
        t = tn
    return NAN


def inc_beta_inv(p, a, b, eps=1e-14, maxit=400):
    """Return (y, 1 - y) with I_y(a, b) = p."""
    if math.isnan(p):
        return NAN, NAN
    if p <= 0.0:
        return 0.0, 1.0
    if p >= 1.0:
        return 1.0, 0.0
    lnb = ln_beta(a, b)
    half = inc_beta_pair(0.5, 0.5, a, b, lnb)[0]
    if p <= half:
        y = _beta_solve(p, a, b, lnb, False, eps, maxit)
        return y, 1.0 - y
    yc = _beta_solve(p, a, b, lnb, True, eps, maxit)
    return 1.0 - yc, yc


# ----------------------------------------------------------------------------
# modified Bessel function of the second kind (log scale)
# ----------------------------------------------------------------------------

def _temme_gammas(mu):
    # odd/even parts of ln Gamma(1 + mu) from the zeta table
    even = 0.0
    odd_over_mu = -EULER
    m2 = mu * mu
    pw_e = 1.0
    for k in range(2, ZETA_MAX + 1, 2):
        pw_e *= m2
        term_e = (ZETA_M1[k] + 1.0) * pw_e / k
        even += term_e
        term_o = (ZETA_M1[k + 1] + 1.0) * pw_e / (k + 1) if k + 1 <= ZETA_MAX else 0.0
        odd_over_mu -= term_o
        if term_e < 1e-18 and term_o < 1e-18:
            break
    odd = odd_over_mu * mu
    ee = math.exp(-even)
    sinhc = 1.0 if abs(odd) < 1e-8 else math.sinh(odd) / odd
    gam1 = ee * sinhc * odd_over_mu
    gam2 = ee * math.cosh(odd)
    gampl = math.exp(-even - odd)
    gammi = math.exp(-even + odd)
    return gam1, gam2, gampl, gammi


def _bessel_k_small_order(mu, x):
    # (K_mu(x), K_{mu+1}(x)) for |mu| <= 1/2; Temme series for x <= 2
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < 1e-15 else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < 1e-15 else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _temme_gammas(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    d = x2 * x2
    sum1 = p
    mu2 = mu * mu
    for i in range(1, MAXIT + 1):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= d / i
        p /= i - mu
        q /= i + mu
        dl = c * ff
        total += dl
        sum1 += c * (p - i * ff)
        if abs(dl) < abs(total) * EPS:
            return math.log(total), sum1 * (2.0 / x) / total
    return NAN, NAN


def _bessel_k_steed(mu, x):
    # ln K_mu(x) and K_{mu+1}/K_mu via Steed's continued fraction, x > 2
    mu2 = mu * mu
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d
    delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu2
    q = a1
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, MAXIT + 1):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < EPS:
            lk = 0.5 * (LN_PI - math.log(2.0 * x)) - x - math.log(s)
            ratio = (mu + x + 0.5 - a1 * h) / x
            return lk, ratio
    return NAN, NAN


def _log_bessel_k_debye(nu, x):
    z = x / nu
    sq = math.sqrt(1.0 + z * z)
    eta = sq + math.log(z / (1.0 + sq))
    p = 1.0 / sq
    total = 0.0
    sign = 1.0
    vk = 1.0
    for poly in DEBYE_U:
        val = 0.0
        for c in reversed(poly):
            val = val * p + c
        term = sign * val * vk
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
        sign = -sign
        vk /= nu
    return 0.5 * (LN_PI - math.log(2.0 * nu)) - nu * eta - 0.5 * math.log(sq) + math.log(total)


def log_bessel_k(nu, x):
    if math.isnan(nu) or math.isnan(x) or x < 0.0:
        return NAN
    if x == 0.0:
        return INF
    if x == INF:
        return -INF
    nu = abs(nu)
    if nu >= 30.0:
        return _log_bessel_k_debye(nu, x)
    n = int(nu + 0.5)
    mu = nu - n
    if x <= 2.0:
        lk, r = _bessel_k_small_order(mu, x)
    else:
        lk, r = _bessel_k_steed(mu, x)
    if math.isnan(lk):
        return NAN
    prod = 1.0
    for i in range(1, n + 1):
        prod *= r
        if prod > 1e280:
            lk += math.log(prod)
            prod = 1.0
        r = 1.0 / r + 2.0 * (mu + i) / x
    return lk + math.log(prod)


# ----------------------------------------------------------------------------
# generalised normal and BGN array kernels
# ----------------------------------------------------------------------------

def _gn_tail(z, s, a, lga, psia, need):
    # returns (w, ln w, y = w^s, logQ, Q, dlogQ/da, R, ok)
    w = abs(z)
    if w == 0.0:
        return 0.0, -INF, 0.0, 0.0, 1.0, 0.0, math.exp(-lga), True
    if w == INF:
        return INF, INF, INF, -INF, 0.0, NAN, NAN, True
    lw = math.log(w)
    ly = s * lw
    y = math.exp(ly)
    if ly < -700.0:
        # w^s underflows (large s, |z| < 1): one series term, kept in log space
        p = math.exp(a * ly - lga - math.log(a))
        q = 1.0 - p
        dlq = -p * (ly - psia - 1.0 / a) / q if need else 0.0
        return w, lw, y, math.log1p(-p), q, dlq, math.exp(-lga) / q, True
    logq, q, dlq, r, _, ok = gamma_q_full(a, y, lga, psia, need)
    return w, lw, y, logq, q, dlq, r, ok


def gn_cdf_pair(x, mu, sigma, s, out_lo, out_hi):
    """Fill (G(x), 1 - G(x)) for the standardised generalised normal."""
    a = 1.0 / s
    lga = lgamma(a)
    bad = 0
    for i in range(len(x)):
        z = (x[i] - mu) / sigma
        if math.isnan(z):
            out_lo[i] = NAN
            out_hi[i] = NAN
            bad += 1
            continue
        _, _, _, _, q, _, _, ok = _gn_tail(z, s, a, lga, 0.0, False)
        if not ok:
            bad += 1
        t = 0.5 * q
        if z <= 0.0:
            out_lo[i] = t
            out_hi[i] = 1.0 - t
        else:
            out_lo[i] = 1.0 - t
            out_hi[i] = t
    return bad


def gn_log_pdf(x, mu, sigma, s, out):
    a = 1.0 / s
    c = math.log(s) - LN2 - lgamma(a) - math.log(sigma)
    for i in range(len(x)):
        w = abs((x[i] - mu) / sigma)
        out[i] = c - (0.0 if w == 0.0 else w ** s)
    return 0


def gn_from_tails(plow, logq, sign, mu, sigma, s, out):
    """x = mu + sign * sigma * Ginv(plow)^(1/s) where Ginv is the Gamma(1/s) quantile."""
    a = 1.0 / s
    bad = 0
    for i in range(len(plow)):
        g = gamma_inv(a, plow[i], logq[i])
        if math.isnan(g):
            bad += 1
            out[i] = NAN
            continue
        r = g ** (1.0 / s) if g < INF else INF
        out[i] = mu + sign[i] * sigma * r
    return bad


def gn_from_log_gammas(lga_v, lgb_v, mu, sigma, s, out):
    """Map log-gamma variate pairs to BGN draws through the GN quantile."""
    a = 1.0 / s
    bad = 0
    for i in range(len(lga_v)):
        d = lgb_v[i] - lga_v[i]
        ad = abs(d)
        if math.isnan(d):
            out[i] = NAN
            bad += 1
            continue
        plow = math.tanh(0.5 * ad)
        logq = LN2 - ad - math.log1p(math.exp(-ad))
        g = gamma_inv(a, plow, logq)
        if math.isnan(g):
            out[i] = NAN
            bad += 1
            continue
        r = g ** (1.0 / s) if g < INF else INF
        out[i] = mu - sigma * r if d >= 0.0 else mu + sigma * r
    return bad


def _bgn_phis(z, s, a, lga, psia, need):
    w, lw, y, logq, q, dlq, r, ok = _gn_tail(z, s, a, lga, psia, need)
    t = 0.5 * q
    log_t = logq - LN2
    log_1mt = math.log1p(-t)
    return w, lw, y, t, log_t, log_1mt, dlq, r, ok


def bgn_log_pdf(x, alpha, beta, mu, sigma, s, out):
    a = 1.0 / s
    lga = lgamma(a)
    const = -ln_beta(alpha, beta) - math.log(sigma) + math.log(s) - LN2 - lga
    bad = 0
    for i in range(len(x)):
        z = (x[i] - mu) / sigma
        if math.isnan(z):
            out[i] = NAN
            bad += 1
            continue
        if abs(z) == INF:
            out[i] = -INF
            continue
        w, lw, y, t, log_t, log_1mt, _, _, ok = _bgn_phis(z, s, a, lga, 0.0, False)
        if not ok:
            bad += 1
        if z <= 0.0:
            lphi, l1mphi = log_t, log_1mt
        else:
            lphi, l1mphi = log_1mt, log_t
        v = const - y
        if alpha != 1.0:
            v += (alpha - 1.0) * lphi
        if beta != 1.0:
            v += (beta - 1.0) * l1mphi
        out[i] = v
    return bad


def bgn_cdf_pair(x, alpha, beta, mu, sigma, s, out_f, out_sf):
    a = 1.0 / s
    lga = lgamma(a)
    lnb = ln_beta(alpha, beta)
    bad = 0
    for i in range(len(x)):
        z = (x[i] - mu) / sigma
        if math.isnan(z):
            out_f[i] = NAN
            out_sf[i] = NAN
            bad += 1
            continue
        _, _, _, _, q, _, _, ok = _gn_tail(z, s, a, lga, 0.0, False)
        t = 0.5 * q
        if z <= 0.0:
            phi, phic = t, 1.0 - t
        else:
            phi, phic = 1.0 - t, t
        f, sf = inc_beta_pair(phi, phic, alpha, beta, lnb)
        if not ok or math.isnan(f):
            bad += 1
        out_f[i] = f
        out_sf[i] = sf
    return bad


def bgn_loglik_grad(x, alpha, beta, mu, sigma, s, grad, need):
    """Log-likelihood sum; fills grad[0:5] = d/d(alpha, beta, mu, sigma, s) if ``need``.

    Returns (loglik, bad) where ``bad`` counts failed special-function calls.
    """
    a = 1.0 / s
    lga = lgamma(a)
    psia = digamma(a) if need else 0.0
    const = -ln_beta(alpha, beta) - math.log(sigma) + math.log(s) - LN2 - lga
    am1 = alpha - 1.0
    bm1 = beta - 1.0
    ll = 0.0
    ga = gb = gm = gsg = gs = 0.0
    bad = 0
    n = len(x)
    for i in range(n):
        z = (x[i] - mu) / sigma
        if not (abs(z) < INF):
            return -INF, bad + 1
        w, lw, y, t, log_t, log_1mt, dlq, r, ok = _bgn_phis(z, s, a, lga, psia, need)
        if not ok:
            bad += 1
        if z <= 0.0:
            lphi, l1mphi = log_t, log_1mt
        else:
            lphi, l1mphi = log_1mt, log_t
        v = const - y
        if am1 != 0.0:
            v += am1 * lphi
        if bm1 != 0.0:
            v += bm1 * l1mphi
        ll += v
        if not need:
            continue
        sr = s * r
        ratio = t / (1.0 - t)
        wlnw = w * lw if w > 0.0 else 0.0
        ylnw = y * lw if w > 0.0 else 0.0
        dlt = -(dlq / (s * s) + wlnw * r)
        dl1mt = -ratio * dlt
        if z <= 0.0:
            h_lo, h_hi = sr, sr * ratio
            dlphi, dl1mphi = dlt, dl1mt
        else:
            h_lo, h_hi = sr * ratio, sr
            dlphi, dl1mphi = dl1mt, dlt
        if w > 0.0:
            kern = s * (y / w) * (1.0 if z > 0.0 else -1.0)
        elif s > 1.0 or s == 1.0:
            kern = 0.0
        else:
            kern = NAN
        gm += (-am1 * h_lo + bm1 * h_hi + kern) / sigma
        gsg += (-1.0 - am1 * z * h_lo + bm1 * z * h_hi + s * y) / sigma
        ga += lphi
        gb += l1mphi
        gs += am1 * dlphi + bm1 * dl1mphi - ylnw
    if need:
        grad[0] = ga + n * digamma_shift(alpha, beta)
        grad[1] = gb + n * digamma_shift(beta, alpha)
        grad[2] = gm
        grad[3] = gsg
        grad[4] = gs + n * (1.0 / s + psia / (s * s))
    return ll, bad


# ----------------------------------------------------------------------------
# rival model kernels
# ----------------------------------------------------------------------------

def k_loglik(x, alpha, looks, mean):
    """Sum of K-distribution log densities."""
    nu = alpha - looks
    half = 0.5 * (alpha + looks)
    scale = alpha * looks / mean
    const = LN2 - lgamma(alpha) - lgamma(looks) + half * math.log(scale)
    total = 0.0
    for i in range(len(x)):
        xi = x[i]
        if not (0.0 < xi < INF):
            return -INF
        lb = log_bessel_k(nu, 2.0 * math.sqrt(scale * xi))
        if math.isnan(lb):
            return NAN
        total += const + (half - 1.0) * math.log(xi) + lb
    return total


def log_bessel_k_array(nu, x, out):
    bad = 0
    for i in range(len(x)):
        v = log_bessel_k(nu, x[i])
        if math.isnan(v):
            bad += 1
        out[i] = v
    return bad
