# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numerical kernels.

Function-for-function twin of ``_pykernels``; see that module for the
numerical notes. Kernels signal trouble through NaN or counters, never by
raising.
"""

from libc.math cimport (exp, expm1, log, log1p, sqrt, fabs, sinh, cosh, sin,
                        tanh, pow, isnan, INFINITY, NAN, M_PI)

from ._tables import DEBYE_U, ZETA_M1, ZETA_MAX

cdef double LN2 = log(2.0)
cdef double LN_PI = log(M_PI)
cdef double EULER = 0.57721566490153286061
cdef double HALF_LN_2PI = 0.5 * log(2.0 * M_PI)
cdef double FPMIN = 1e-300
cdef double EPS = 1e-15
cdef int MAXIT = 5000
cdef double INF = INFINITY

cdef double[8] STIRLING
STIRLING[:] = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0,
               1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0]

cdef int NZETA = ZETA_MAX
cdef double[64] ZM1
cdef int _k
for _k in range(NZETA + 1):
    ZM1[_k] = ZETA_M1[_k]

cdef int NDEBYE = len(DEBYE_U)
cdef int DEBYE_LEN[16]
cdef double DEBYE_C[16][40]
cdef int _j
for _k in range(NDEBYE):
    DEBYE_LEN[_k] = len(DEBYE_U[_k])
    for _j in range(DEBYE_LEN[_k]):
        DEBYE_C[_k][_j] = DEBYE_U[_k][_j]


# ---------------------------------------------------------------------------
# log-gamma and digamma
# ---------------------------------------------------------------------------

cdef inline double _stirling_corr(double x) nogil:
    cdef double r = 1.0 / x
    cdef double r2 = r * r
    cdef double acc = 0.0
    cdef int i
    for i in range(7, -1, -1):
        acc = acc * r2 + STIRLING[i]
    return acc * r


cdef inline double _stirling(double x) nogil:
    return (x - 0.5) * log(x) - x + HALF_LN_2PI + _stirling_corr(x)


cdef inline double _lg2(double e) nogil:
    cdef double total = (1.0 - EULER) * e
    cdef double pw = -e
    cdef double term
    cdef int k
    for k in range(2, NZETA + 1):
        pw *= -e
        term = ZM1[k] * pw / k
        total += term
        if fabs(term) <= 1e-17 * fabs(total):
            break
    return total


cdef double c_lgamma(double x) nogil:
    cdef double prod, e
    if not (0.0 < x < INF):
        return NAN
    if x < 0.5:
        return c_lgamma(x + 1.0) - log(x)
    if x < 1.5:
        e = x - 1.0
        return _lg2(e) - log1p(e)
    if x < 2.5:
        return _lg2(x - 2.0)
    if x < 10.0:
        prod = 1.0
        while x < 10.0:
            prod *= x
            x += 1.0
        return _stirling(x) - log(prod)
    return _stirling(x)


cdef inline double _psi_tail(double x) nogil:
    cdef double r2 = 1.0 / (x * x)
    return r2 * (1.0 / 12 - r2 * (1.0 / 120 - r2 * (1.0 / 252 - r2 * (
        1.0 / 240 - r2 * (1.0 / 132 - r2 * (691.0 / 32760 - r2 / 12))))))


cdef double c_digamma(double x) nogil:
    cdef double acc = 0.0
    if not (0.0 < x < INF):
        return NAN
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    return acc + log(x) - 0.5 / x - _psi_tail(x)


cdef double c_lgamma_shift(double a, double b) nogil:
    if a < 10.0:
        return c_lgamma(a + b) - c_lgamma(a)
    return ((a - 0.5) * log1p(b / a) + b * log(a + b) - b
            + _stirling_corr(a + b) - _stirling_corr(a))


cdef double c_digamma_shift(double a, double b) nogil:
    if a < 10.0:
        return c_digamma(a + b) - c_digamma(a)
    return log1p(b / a) + 0.5 * b / (a * (a + b)) - (_psi_tail(a + b) - _psi_tail(a))


cpdef double lgamma_shift(double a, double b):
    """ln Gamma(a + b) - ln Gamma(a) without cancellation when a is large."""
    return c_lgamma_shift(a, b)


cpdef double digamma_shift(double a, double b):
    """psi(a + b) - psi(a) without cancellation when a is large."""
    return c_digamma_shift(a, b)


cpdef double lgamma(double x):
    return c_lgamma(x)


cpdef double digamma(double x):
    return c_digamma(x)


# ---------------------------------------------------------------------------
# incomplete gamma with a-derivative
# ---------------------------------------------------------------------------

cdef struct GQ:
    double logq
    double q
    double dlq
    double r
    double p
    int ok


cdef inline int _gser(double a, double x, double eps, int maxit, bint need,
                      double* s_out, double* ds_out) nogil:
    cdef double ap = a
    cdef double term = 1.0 / a
    cdef double s = term
    cdef double acc = term
    cdef double ds = -term * acc
    cdef double dterm
    cdef int n
    for n in range(maxit):
        ap += 1.0
        term *= x / ap
        s += term
        if need:
            acc += 1.0 / ap
            dterm = -term * acc
            ds += dterm
            if term <= eps * s and -dterm <= -eps * ds:
                s_out[0] = s
                ds_out[0] = ds
                return 1
        elif term <= eps * s:
            s_out[0] = s
            ds_out[0] = ds
            return 1
    s_out[0] = s
    ds_out[0] = ds
    return 0


cdef inline int _gcf(double a, double x, double eps, int maxit, bint need,
                     double* h_out, double* dh_out) nogil:
    cdef double b = x + 1.0 - a
    cdef double c = 1.0 / FPMIN
    cdef double dc = 0.0
    cdef double d = 1.0 / b
    cdef double dd = d * d
    cdef double h = d
    cdef double dh = dd
    cdef double an, big_d, big_c, ddd = 0.0, dcc = 0.0, dl, ddl = 0.0
    cdef int i
    for i in range(1, maxit + 1):
        an = -i * (i - a)
        b += 2.0
        big_d = an * d + b
        if fabs(big_d) < FPMIN:
            big_d = FPMIN
        big_c = b + an / c
        if fabs(big_c) < FPMIN:
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
        if fabs(dl - 1.0) <= eps:
            if not need or fabs(ddl) <= eps * (1.0 + fabs(dh / h)):
                h_out[0] = h
                dh_out[0] = dh
                return 1
    h_out[0] = h
    dh_out[0] = dh
    return 0


cdef GQ c_gamma_q(double a, double x, double lga, double psia, bint need,
                  double eps, int maxit) nogil:
    cdef GQ r
    cdef double lx, s = 0.0, ds = 0.0, pref, h = 0.0, dh = 0.0, lh
    r.ok = 1
    if x <= 0.0:
        r.logq = 0.0
        r.q = 1.0
        r.dlq = 0.0
        r.r = exp(-lga)
        r.p = 0.0
        return r
    if x == INF:
        r.logq = -INF
        r.q = 0.0
        r.dlq = NAN
        r.r = NAN
        r.p = 1.0
        return r
    lx = log(x)
    if x < a + 1.0:
        r.ok = _gser(a, x, eps, maxit, need, &s, &ds)
        pref = exp(a * lx - x - lga)
        r.p = pref * s
        r.q = 1.0 - r.p
        if r.q <= 0.0:
            r.logq = -INF
            r.q = 0.0
            r.dlq = NAN
            r.r = NAN
            r.p = 1.0
            return r
        r.dlq = 0.0
        if need:
            r.dlq = -(r.p * (lx - psia) + pref * ds) / r.q
        r.logq = log(r.q)
        r.r = exp(-x - lga) / r.q
        return r
    r.ok = _gcf(a, x, eps, maxit, need, &h, &dh)
    lh = log(h)
    r.logq = a * lx - x + lh - lga
    r.q = exp(r.logq)
    r.dlq = lx + dh / h - psia if need else 0.0
    r.r = exp(-a * lx - lh)
    r.p = -expm1(r.logq)
    return r


def gamma_q_full(double a, double x, double lga, double psia, bint need=True,
                 double eps=EPS, int maxit=MAXIT):
    """Regularised upper incomplete gamma; returns (logQ, Q, dlogQ/da, R, P, ok)."""
    cdef GQ r = c_gamma_q(a, x, lga, psia, need, eps, maxit)
    return r.logq, r.q, r.dlq, r.r, r.p, bool(r.ok)


cpdef double gamma_p(double a, double x):
    cdef GQ r = c_gamma_q(a, x, c_lgamma(a), 0.0, False, EPS, MAXIT)
    return r.p if r.ok else NAN


cpdef double gamma_q(double a, double x):
    cdef GQ r = c_gamma_q(a, x, c_lgamma(a), 0.0, False, EPS, MAXIT)
    return r.q if r.ok else NAN


cpdef double log_gamma_q(double a, double x):
    cdef GQ r = c_gamma_q(a, x, c_lgamma(a), 0.0, False, EPS, MAXIT)
    return r.logq if r.ok else NAN


cpdef double dlog_gamma_q_da(double a, double x):
    cdef GQ r = c_gamma_q(a, x, c_lgamma(a), c_digamma(a), True, EPS, MAXIT)
    return r.dlq if r.ok else NAN


cdef double _t3_hyper(double a, double x, double lga, double psia, double eps,
                      int maxit) nogil:
    cdef double term = 1.0
    cdef double total = 1.0 / (a * a)
    cdef double inc, lx
    cdef int n
    for n in range(1, maxit + 1):
        term *= -x / n
        inc = term / ((a + n) * (a + n))
        total += inc
        if fabs(inc) <= eps * fabs(total):
            lx = log(x)
            return exp((a - 1.0) * lx) * total - exp(lga) * (lx - psia) / x
    return NAN


cpdef double t3(double a, double x, double eps=EPS, int maxit=MAXIT):
    """Meijer-G helper: dGamma(a,x)/da = ln x Gamma(a,x) + x T3(a,x)."""
    cdef double lga, psia
    cdef GQ r
    if not (a > 0.0 and 0.0 < x < INF):
        return NAN
    lga = c_lgamma(a)
    psia = c_digamma(a)
    if x <= 2.0:
        return _t3_hyper(a, x, lga, psia, eps, maxit)
    r = c_gamma_q(a, x, lga, psia, True, eps, maxit)
    if not r.ok:
        return NAN
    return exp(lga + r.logq) * (psia + r.dlq - log(x)) / x


cpdef double dgamma_ds(double s, double x, double eps=EPS, int maxit=MAXIT):
    """d/ds of Gamma(1/s, x^s)."""
    cdef double a, lx, y, lga, psia
    cdef GQ r
    if not (s > 0.0 and 0.0 < x < INF):
        return NAN
    a = 1.0 / s
    lx = log(x)
    y = exp(s * lx)
    lga = c_lgamma(a)
    psia = c_digamma(a)
    r = c_gamma_q(a, y, lga, psia, True, eps, maxit)
    if not r.ok:
        return NAN
    return -exp(lga + r.logq) * (psia + r.dlq) / (s * s) - x * exp(-y) * lx


# ---------------------------------------------------------------------------
# gamma quantile
# ---------------------------------------------------------------------------

cdef inline double _normal_upper_z(double lp) nogil:
    cdef double t = sqrt(-2.0 * lp)
    return t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + t * 0.04481))


cdef double c_gamma_inv(double a, double p, double logq, double lga,
                        double eps, int maxit) nogil:
    cdef bint lower
    cdef double target, z, c, base, t, cut, lo, hi, x, lv, g, gp, tn, prev
    cdef GQ r
    cdef int it
    if not (a > 0.0) or isnan(p) or isnan(logq):
        return NAN
    if p <= 0.0:
        return 0.0
    if logq == -INF:
        return INF
    lower = p <= 0.5
    target = log(p) if lower else logq
    if a > 1.0:
        z = _normal_upper_z(target)
        if lower:
            z = -z
        c = 1.0 / (9.0 * a)
        base = 1.0 - c + z * sqrt(c)
        if base > 0.0:
            t = log(a) + 3.0 * log(base)
        else:
            t = (target + lga + log(a)) / a
        if lower:
            t = min(t, (target + lga + log(a)) / a + 50.0)
    else:
        cut = 1.0 - a * (0.253 + 0.12 * a)
        if p < cut:
            t = (log(p) - log(cut)) / a
        else:
            t = log(1.0 - logq + log1p(-cut))
    lo = -INF
    hi = INF
    prev = INF
    for it in range(maxit):
        if t < -740.0:
            t = -740.0
        elif t > 709.0:
            t = 709.0
        x = exp(t)
        r = c_gamma_q(a, x, lga, 0.0, False, EPS, MAXIT)
        if lower:
            if x < a + 1.0:
                lv = log(r.p) if r.p > 0.0 else -INF
            else:
                lv = log1p(-r.q)
            g = lv - target
            gp = exp(a * t - x - lga - lv) if lv > -INF else INF
        else:
            g = target - r.logq
            gp = exp(a * t - x - lga - r.logq)
        if g == 0.0:
            return x
        if g > 0.0:
            hi = t
        else:
            lo = t
        if gp > 0.0 and gp < INF:
            tn = t - g / gp
        else:
            tn = NAN
        if fabs(g) > 0.5 * prev and lo > -INF and hi < INF:
            tn = NAN
        prev = fabs(g)
        if not (lo < tn < hi):
            if lo == -INF:
                tn = t - 2.0 * (1.0 + fabs(t))
            elif hi == INF:
                tn = t + 1.0 + 0.5 * fabs(t)
            else:
                tn = 0.5 * (lo + hi)
        if fabs(tn - t) <= eps * max(1.0, fabs(t)):
            return exp(tn)
        if t == -740.0 and tn <= t:
            return 0.0
        t = tn
    return NAN


cpdef double gamma_inv(double a, double p, double logq, double eps=1e-14,
                       int maxit=400):
    """x with P(a, x) = p; ``logq`` is ln(1 - p) supplied accurately."""
    return c_gamma_inv(a, p, logq, c_lgamma(a), eps, maxit)


# ---------------------------------------------------------------------------
# incomplete beta
# ---------------------------------------------------------------------------

cdef inline int _betacf(double a, double b, double x, double eps, int maxit,
                        double* h_out) nogil:
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, dl
    cdef int m, m2
    if fabs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, maxit + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        dl = d * c
        h *= dl
        if fabs(dl - 1.0) <= eps:
            h_out[0] = h
            return 1
    h_out[0] = h
    return 0


cdef inline double c_ln_beta(double a, double b) nogil:
    # a is made the larger argument
    if a < b:
        return c_lgamma(a) - c_lgamma_shift(b, a)
    return c_lgamma(b) - c_lgamma_shift(a, b)


cpdef double ln_beta(double a, double b):
    return c_ln_beta(a, b)


cdef int c_inc_beta_pair(double x, double xc, double a, double b, double lnb,
                         double eps, int maxit, double* f, double* fc) nogil:
    cdef double lbt, h = 0.0, v
    if isnan(x) or isnan(xc):
        f[0] = NAN
        fc[0] = NAN
        return 0
    if x <= 0.0:
        f[0] = 0.0
        fc[0] = 1.0
        return 1
    if xc <= 0.0:
        f[0] = 1.0
        fc[0] = 0.0
        return 1
    lbt = a * log(x) + b * log(xc) - lnb
    if x < (a + 1.0) / (a + b + 2.0):
        if not _betacf(a, b, x, eps, maxit, &h):
            f[0] = NAN
            fc[0] = NAN
            return 0
        v = exp(lbt) * h / a
        f[0] = v
        fc[0] = 1.0 - v
        return 1
    if not _betacf(b, a, xc, eps, maxit, &h):
        f[0] = NAN
        fc[0] = NAN
        return 0
    v = exp(lbt) * h / b
    f[0] = 1.0 - v
    fc[0] = v
    return 1


def inc_beta_pair(double x, double xc, double a, double b, double lnb,
                  double eps=EPS, int maxit=MAXIT):
    """(I_x(a, b), 1 - I_x(a, b)); ``xc`` is 1 - x supplied accurately."""
    cdef double f = 0.0, fc = 0.0
    c_inc_beta_pair(x, xc, a, b, lnb, eps, maxit, &f, &fc)
    return f, fc


cpdef double inc_beta(double x, double a, double b):
    cdef double f = 0.0, fc = 0.0
    c_inc_beta_pair(x, 1.0 - x, a, b, c_ln_beta(a, b), EPS, MAXIT, &f, &fc)
    return f


cdef inline double _log_inc_beta(double x, double xc, double a, double b,
                                 double lnb, int* ok) nogil:
    cdef double lbt = a * log(x) + b * log(xc) - lnb
    cdef double h = 0.0
    if x < (a + 1.0) / (a + b + 2.0):
        ok[0] = _betacf(a, b, x, EPS, MAXIT, &h)
        return lbt + log(h) - log(a)
    ok[0] = _betacf(b, a, xc, EPS, MAXIT, &h)
    return log1p(-exp(lbt) * h / b)


cdef double _beta_solve(double p, double a, double b, double lnb,
                        bint upper_var, double eps, int maxit) nogil:
    cdef bint use_p = p <= 0.5
    cdef double target = log(p) if use_p else log1p(-p)
    cdef double sgn = 1.0 if use_p != upper_var else -1.0
    cdef double lo = -INF
    cdef double hi = -LN2
    cdef double prev = INF
    cdef double t, v, vc, y, yc, val, g, ld, gp, tn
    cdef int ok = 1, it
    if upper_var:
        t = min((log1p(-p) + log(b) + lnb) / b, hi)
    else:
        t = min((log(p) + log(a) + lnb) / a, hi)
    for it in range(maxit):
        if t < -740.0:
            t = -740.0
        v = exp(t)
        vc = -expm1(t)
        if upper_var:
            y = vc
            yc = v
        else:
            y = v
            yc = vc
        if use_p:
            val = _log_inc_beta(y, yc, a, b, lnb, &ok)
        else:
            val = _log_inc_beta(yc, y, b, a, lnb, &ok)
        if not ok:
            return NAN
        g = sgn * (val - target)
        if g == 0.0:
            return v
        if g > 0.0:
            hi = t
        else:
            lo = t
        ld = a * log(y) + b * log(yc) - lnb - (log(y) if upper_var else log(yc))
        gp = exp(ld - val)
        if 0.0 < gp < INF:
            tn = t - g / gp
        else:
            tn = NAN
        if fabs(g) > 0.5 * prev and lo > -INF:
            tn = NAN
        prev = fabs(g)
        if not (lo < tn < hi):
            if lo == -INF:
                tn = t - 2.0 * (1.0 + fabs(t))
            else:
                tn = 0.5 * (lo + hi)
        if fabs(tn - t) <= eps * max(1.0, fabs(t)):
            return exp(tn)
        if t == -740.0 and tn <= t:
            return 0.0
        t = tn
    return NAN


def inc_beta_inv(double p, double a, double b, double eps=1e-14, int maxit=400):
    """Return (y, 1 - y) with I_y(a, b) = p."""
    cdef double lnb, half = 0.0, hc = 0.0, y, yc
    if isnan(p):
        return NAN, NAN
    if p <= 0.0:
        return 0.0, 1.0
    if p >= 1.0:
        return 1.0, 0.0
    lnb = c_ln_beta(a, b)
    c_inc_beta_pair(0.5, 0.5, a, b, lnb, EPS, MAXIT, &half, &hc)
    if p <= half:
        y = _beta_solve(p, a, b, lnb, False, eps, maxit)
        return y, 1.0 - y
    yc = _beta_solve(p, a, b, lnb, True, eps, maxit)
    return 1.0 - yc, yc


# ---------------------------------------------------------------------------
# modified Bessel function of the second kind (log scale)
# ---------------------------------------------------------------------------

cdef void _temme_gammas(double mu, double* gam1, double* gam2, double* gampl,
                        double* gammi) nogil:
    cdef double even = 0.0
    cdef double odd_over_mu = -EULER
    cdef double m2 = mu * mu
    cdef double pw_e = 1.0
    cdef double term_e, term_o, odd, ee, sinhc
    cdef int k
    for k in range(2, NZETA + 1, 2):
        pw_e *= m2
        term_e = (ZM1[k] + 1.0) * pw_e / k
        even += term_e
        if k + 1 <= NZETA:
            term_o = (ZM1[k + 1] + 1.0) * pw_e / (k + 1)
        else:
            term_o = 0.0
        odd_over_mu -= term_o
        if term_e < 1e-18 and term_o < 1e-18:
            break
    odd = odd_over_mu * mu
    ee = exp(-even)
    sinhc = 1.0 if fabs(odd) < 1e-8 else sinh(odd) / odd
    gam1[0] = ee * sinhc * odd_over_mu
    gam2[0] = ee * cosh(odd)
    gampl[0] = exp(-even - odd)
    gammi[0] = exp(-even + odd)


cdef int _bessel_k_small_order(double mu, double x, double* lk,
                               double* ratio) nogil:
    cdef double x2 = 0.5 * x
    cdef double pimu = M_PI * mu
    cdef double fact = 1.0 if fabs(pimu) < 1e-15 else pimu / sin(pimu)
    cdef double d = -log(x2)
    cdef double e = mu * d
    cdef double fact2 = 1.0 if fabs(e) < 1e-15 else sinh(e) / e
    cdef double gam1 = 0.0, gam2 = 0.0, gampl = 0.0, gammi = 0.0
    cdef double ff, total, p, q, c, sum1, mu2, dl
    cdef int i
    _temme_gammas(mu, &gam1, &gam2, &gampl, &gammi)
    ff = fact * (gam1 * cosh(e) + gam2 * fact2 * d)
    total = ff
    e = exp(e)
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
        if fabs(dl) < fabs(total) * EPS:
            lk[0] = log(total)
            ratio[0] = sum1 * (2.0 / x) / total
            return 1
    return 0


cdef int _bessel_k_steed(double mu, double x, double* lk, double* ratio) nogil:
    cdef double mu2 = mu * mu
    cdef double b = 2.0 * (1.0 + x)
    cdef double d = 1.0 / b
    cdef double h = d
    cdef double delh = d
    cdef double q1 = 0.0
    cdef double q2 = 1.0
    cdef double a1 = 0.25 - mu2
    cdef double q = a1
    cdef double c = a1
    cdef double a = -a1
    cdef double s = 1.0 + q * delh
    cdef double qnew, dels
    cdef int i
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
        if fabs(dels / s) < EPS:
            lk[0] = 0.5 * (LN_PI - log(2.0 * x)) - x - log(s)
            ratio[0] = (mu + x + 0.5 - a1 * h) / x
            return 1
    return 0


cdef double _log_bessel_k_debye(double nu, double x) nogil:
    cdef double z = x / nu
    cdef double sq = sqrt(1.0 + z * z)
    cdef double eta = sq + log(z / (1.0 + sq))
    cdef double p = 1.0 / sq
    cdef double total = 0.0
    cdef double sign = 1.0
    cdef double vk = 1.0
    cdef double val, term
    cdef int k, j
    for k in range(NDEBYE):
        val = 0.0
        for j in range(DEBYE_LEN[k] - 1, -1, -1):
            val = val * p + DEBYE_C[k][j]
        term = sign * val * vk
        total += term
        if fabs(term) < 1e-17 * fabs(total):
            break
        sign = -sign
        vk /= nu
    return 0.5 * (LN_PI - log(2.0 * nu)) - nu * eta - 0.5 * log(sq) + log(total)


cdef double c_log_bessel_k(double nu, double x) nogil:
    cdef double mu, lk = 0.0, r = 0.0, prod
    cdef int n, i, ok
    if isnan(nu) or isnan(x) or x < 0.0:
        return NAN
    if x == 0.0:
        return INF
    if x == INF:
        return -INF
    nu = fabs(nu)
    if nu >= 30.0:
        return _log_bessel_k_debye(nu, x)
    n = <int>(nu + 0.5)
    mu = nu - n
    if x <= 2.0:
        ok = _bessel_k_small_order(mu, x, &lk, &r)
    else:
        ok = _bessel_k_steed(mu, x, &lk, &r)
    if not ok:
        return NAN
    prod = 1.0
    for i in range(1, n + 1):
        prod *= r
        if prod > 1e280:
            lk += log(prod)
            prod = 1.0
        r = 1.0 / r + 2.0 * (mu + i) / x
    return lk + log(prod)


cpdef double log_bessel_k(double nu, double x):
    return c_log_bessel_k(nu, x)


# ---------------------------------------------------------------------------
# generalised normal and BGN array kernels
# ---------------------------------------------------------------------------

cdef struct Tail:
    double w
    double lw
    double y
    double logq
    double q
    double dlq
    double r
    int ok


cdef inline Tail _gn_tail(double z, double s, double a, double lga, double psia,
                          bint need) nogil:
    cdef Tail t
    cdef GQ g
    cdef double ly, p
    t.w = fabs(z)
    t.ok = 1
    if t.w == 0.0:
        t.lw = -INF
        t.y = 0.0
        t.logq = 0.0
        t.q = 1.0
        t.dlq = 0.0
        t.r = exp(-lga)
        return t
    if t.w == INF:
        t.lw = INF
        t.y = INF
        t.logq = -INF
        t.q = 0.0
        t.dlq = NAN
        t.r = NAN
        return t
    t.lw = log(t.w)
    ly = s * t.lw
    t.y = exp(ly)
    if ly < -700.0:
        # w^s underflows (large s, |z| < 1): one series term, kept in log space
        p = exp(a * ly - lga - log(a))
        t.q = 1.0 - p
        t.logq = log1p(-p)
        t.dlq = -p * (ly - psia - 1.0 / a) / t.q if need else 0.0
        t.r = exp(-lga) / t.q
        return t
    g = c_gamma_q(a, t.y, lga, psia, need, EPS, MAXIT)
    t.logq = g.logq
    t.q = g.q
    t.dlq = g.dlq
    t.r = g.r
    t.ok = g.ok
    return t


def gn_cdf_pair(const double[::1] x, double mu, double sigma, double s,
                double[::1] out_lo, double[::1] out_hi):
    """Fill (G(x), 1 - G(x)) for the generalised normal."""
    cdef double a = 1.0 / s
    cdef double lga = c_lgamma(a)
    cdef Py_ssize_t i, n = x.shape[0]
    cdef int bad = 0
    cdef double z, t
    cdef Tail tl
    with nogil:
        for i in range(n):
            z = (x[i] - mu) / sigma
            if isnan(z):
                out_lo[i] = NAN
                out_hi[i] = NAN
                bad += 1
                continue
            tl = _gn_tail(z, s, a, lga, 0.0, False)
            if not tl.ok:
                bad += 1
            t = 0.5 * tl.q
            if z <= 0.0:
                out_lo[i] = t
                out_hi[i] = 1.0 - t
            else:
                out_lo[i] = 1.0 - t
                out_hi[i] = t
    return bad


def gn_log_pdf(const double[::1] x, double mu, double sigma, double s,
               double[::1] out):
    cdef double c = log(s) - LN2 - c_lgamma(1.0 / s) - log(sigma)
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double w
    with nogil:
        for i in range(n):
            w = fabs((x[i] - mu) / sigma)
            out[i] = c - (0.0 if w == 0.0 else pow(w, s))
    return 0


def gn_from_tails(const double[::1] plow, const double[::1] logq,
                  const double[::1] sign, double mu, double sigma, double s,
                  double[::1] out):
    """x = mu + sign * sigma * Ginv(plow)^(1/s) with Ginv the Gamma(1/s) quantile."""
    cdef double a = 1.0 / s
    cdef double lga = c_lgamma(a)
    cdef Py_ssize_t i, n = plow.shape[0]
    cdef int bad = 0
    cdef double g, r
    with nogil:
        for i in range(n):
            g = c_gamma_inv(a, plow[i], logq[i], lga, 1e-14, 400)
            if isnan(g):
                bad += 1
                out[i] = NAN
                continue
            r = pow(g, 1.0 / s) if g < INF else INF
            out[i] = mu + sign[i] * sigma * r
    return bad


def gn_from_log_gammas(const double[::1] lga_v, const double[::1] lgb_v,
                       double mu, double sigma, double s, double[::1] out):
    """Map log-gamma variate pairs to BGN draws through the GN quantile."""
    cdef double a = 1.0 / s
    cdef double lga = c_lgamma(a)
    cdef Py_ssize_t i, n = lga_v.shape[0]
    cdef int bad = 0
    cdef double d, ad, plow, lq, g, r
    with nogil:
        for i in range(n):
            d = lgb_v[i] - lga_v[i]
            if isnan(d):
                out[i] = NAN
                bad += 1
                continue
            ad = fabs(d)
            plow = tanh(0.5 * ad)
            lq = LN2 - ad - log1p(exp(-ad))
            g = c_gamma_inv(a, plow, lq, lga, 1e-14, 400)
            if isnan(g):
                out[i] = NAN
                bad += 1
                continue
            r = pow(g, 1.0 / s) if g < INF else INF
            out[i] = mu - sigma * r if d >= 0.0 else mu + sigma * r
    return bad


def bgn_log_pdf(const double[::1] x, double alpha, double beta, double mu,
                double sigma, double s, double[::1] out):
    cdef double a = 1.0 / s
    cdef double lga = c_lgamma(a)
    cdef double const = -c_ln_beta(alpha, beta) - log(sigma) + log(s) - LN2 - lga
    cdef Py_ssize_t i, n = x.shape[0]
    cdef int bad = 0
    cdef double z, t, log_t, log_1mt, lphi, l1mphi, v
    cdef Tail tl
    with nogil:
        for i in range(n):
            z = (x[i] - mu) / sigma
            if isnan(z):
                out[i] = NAN
                bad += 1
                continue
            if fabs(z) == INF:
                out[i] = -INF
                continue
            tl = _gn_tail(z, s, a, lga, 0.0, False)
            if not tl.ok:
                bad += 1
            t = 0.5 * tl.q
            log_t = tl.logq - LN2
            log_1mt = log1p(-t)
            if z <= 0.0:
                lphi = log_t
                l1mphi = log_1mt
            else:
                lphi = log_1mt
                l1mphi = log_t
            v = const - tl.y
            if alpha != 1.0:
                v += (alpha - 1.0) * lphi
            if beta != 1.0:
                v += (beta - 1.0) * l1mphi
            out[i] = v
    return bad


def bgn_cdf_pair(const double[::1] x, double alpha, double beta, double mu,
                 double sigma, double s, double[::1] out_f, double[::1] out_sf):
    cdef double a = 1.0 / s
    cdef double lga = c_lgamma(a)
    cdef double lnb = c_ln_beta(alpha, beta)
    cdef Py_ssize_t i, n = x.shape[0]
    cdef int bad = 0, ok
    cdef double z, t, phi, phic, f = 0.0, sf = 0.0
    cdef Tail tl
    with nogil:
        for i in range(n):
            z = (x[i] - mu) / sigma
            if isnan(z):
                out_f[i] = NAN
                out_sf[i] = NAN
                bad += 1
                continue
            tl = _gn_tail(z, s, a, lga, 0.0, False)
            t = 0.5 * tl.q
            if z <= 0.0:
                phi = t
                phic = 1.0 - t
            else:
                phi = 1.0 - t
                phic = t
            ok = c_inc_beta_pair(phi, phic, alpha, beta, lnb, EPS, MAXIT, &f, &sf)
            if not tl.ok or not ok:
                bad += 1
            out_f[i] = f
            out_sf[i] = sf
    return bad


def bgn_loglik_grad(const double[::1] x, double alpha, double beta, double mu,
                    double sigma, double s, double[::1] grad, bint need):
    """Log-likelihood sum; fills grad[0:5] = d/d(alpha, beta, mu, sigma, s) if ``need``.

    Returns (loglik, bad) where ``bad`` counts failed special-function calls.
    """
    cdef double a = 1.0 / s
    cdef double lga = c_lgamma(a)
    cdef double psia = c_digamma(a) if need else 0.0
    cdef double const = -c_ln_beta(alpha, beta) - log(sigma) + log(s) - LN2 - lga
    cdef double am1 = alpha - 1.0
    cdef double bm1 = beta - 1.0
    cdef double ll = 0.0
    cdef double ga = 0.0, gb = 0.0, gm = 0.0, gsg = 0.0, gs = 0.0
    cdef Py_ssize_t i, n = x.shape[0]
    cdef int bad = 0
    cdef double z, t, log_t, log_1mt, lphi, l1mphi, v, sr, ratio
    cdef double wlnw, ylnw, dlt, dl1mt, h_lo, h_hi, dlphi, dl1mphi, kern
    cdef Tail tl
    with nogil:
        for i in range(n):
            z = (x[i] - mu) / sigma
            if not (fabs(z) < INF):
                ll = -INF
                bad += 1
                break
            tl = _gn_tail(z, s, a, lga, psia, need)
            if not tl.ok:
                bad += 1
            t = 0.5 * tl.q
            log_t = tl.logq - LN2
            log_1mt = log1p(-t)
            if z <= 0.0:
                lphi = log_t
                l1mphi = log_1mt
            else:
                lphi = log_1mt
                l1mphi = log_t
            v = const - tl.y
            if am1 != 0.0:
                v += am1 * lphi
            if bm1 != 0.0:
                v += bm1 * l1mphi
            ll += v
            if not need:
                continue
            sr = s * tl.r
            ratio = t / (1.0 - t)
            if tl.w > 0.0:
                wlnw = tl.w * tl.lw
                ylnw = tl.y * tl.lw
            else:
                wlnw = 0.0
                ylnw = 0.0
            dlt = -(tl.dlq / (s * s) + wlnw * tl.r)
            dl1mt = -ratio * dlt
            if z <= 0.0:
                h_lo = sr
                h_hi = sr * ratio
                dlphi = dlt
                dl1mphi = dl1mt
            else:
                h_lo = sr * ratio
                h_hi = sr
                dlphi = dl1mt
                dl1mphi = dlt
            if tl.w > 0.0:
                kern = s * (tl.y / tl.w) * (1.0 if z > 0.0 else -1.0)
            elif s >= 1.0:
                kern = 0.0
            else:
                kern = NAN
            gm += (-am1 * h_lo + bm1 * h_hi + kern) / sigma
            gsg += (-1.0 - am1 * z * h_lo + bm1 * z * h_hi + s * tl.y) / sigma
            ga += lphi
            gb += l1mphi
            gs += am1 * dlphi + bm1 * dl1mphi - ylnw
    if ll == -INF:
        return ll, bad
    if need:
        grad[0] = ga + n * c_digamma_shift(alpha, beta)
        grad[1] = gb + n * c_digamma_shift(beta, alpha)
        grad[2] = gm
        grad[3] = gsg
        grad[4] = gs + n * (1.0 / s + psia / (s * s))
    return ll, bad


# ---------------------------------------------------------------------------
# rival model kernels
# ---------------------------------------------------------------------------

def k_loglik(const double[::1] x, double alpha, double looks, double mean):
    """Sum of K-distribution log densities."""
    cdef double nu = alpha - looks
    cdef double half = 0.5 * (alpha + looks)
    cdef double scale = alpha * looks / mean
    cdef double const = LN2 - c_lgamma(alpha) - c_lgamma(looks) + half * log(scale)
    cdef double total = 0.0, xi, lb
    cdef Py_ssize_t i, n = x.shape[0]
    with nogil:
        for i in range(n):
            xi = x[i]
            if not (0.0 < xi < INF):
                total = -INF
                break
            lb = c_log_bessel_k(nu, 2.0 * sqrt(scale * xi))
            if isnan(lb):
                total = NAN
                break
            total += const + (half - 1.0) * log(xi) + lb
    return total


def log_bessel_k_array(double nu, const double[::1] x, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef int bad = 0
    cdef double v
    with nogil:
        for i in range(n):
            v = c_log_bessel_k(nu, x[i])
            if isnan(v):
                bad += 1
            out[i] = v
    return bad
