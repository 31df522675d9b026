import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from bgnsar.bgn import (BgnParams, bgn_cdf, bgn_logpdf, bgn_pdf, bgn_quantile, bgn_sample, bgn_sf,
                        limiting_beta_pdf)
from bgnsar.errors import DomainError
from bgnsar.gn import gn_pdf_std
from bgnsar.sarfit.stats import ks_statistic

# mpmath quadrature of an independently coded density (30 digits)
CDF_2_5_AT_1 = 0.99998312693289805
# bisection on that mpmath cdf
Q90_HALF_2 = 0.0565615392419261

KS_1PCT_1E5 = 1.628 / math.sqrt(1e5)

params = st.builds(BgnParams, st.floats(0.2, 6.0), st.floats(0.2, 6.0), st.floats(-3.0, 3.0),
                   st.floats(0.2, 4.0), st.floats(0.5, 6.0))


def test_pdf_values(backend):
    assert bgn_pdf(0.0, BgnParams(1, 1, 0, 1, 2)) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-14)
    assert bgn_pdf(0.0, BgnParams(2, 1, 0, 1, 1)) == pytest.approx(0.5, rel=1e-14)


def test_pdf_integrates_to_one():
    p = BgnParams(0.25, 0.5, 0.0, 1.0, 4.0)
    # alpha, beta < 1 make the density blow up in both tails; integrate in the cdf variable
    pieces = [(-np.inf, -2), (-2, 0), (0, 2), (2, np.inf)]
    total = sum(integrate.quad(lambda x: bgn_pdf(x, p), a, b, limit=400)[0] for a, b in pieces)
    assert total == pytest.approx(1.0, abs=1e-7)


def test_cdf_values(backend):
    assert bgn_cdf(1.3, BgnParams(2.5, 2.5, 1.3, 0.4, 0.7)) == pytest.approx(0.5, abs=1e-13)
    assert bgn_cdf(-2.0, BgnParams(1, 1, -2.0, 3.0, 5.0)) == pytest.approx(0.5, abs=1e-15)
    assert bgn_cdf(1.0, BgnParams(2, 5, 0, 1, 2)) == pytest.approx(CDF_2_5_AT_1, rel=1e-12)
    assert bgn_sf(1.0, BgnParams(2, 5, 0, 1, 2)) == pytest.approx(1 - CDF_2_5_AT_1, rel=1e-8)


def test_cdf_limits(backend):
    p = BgnParams(0.7, 2.0, 0.0, 1.0, 1.5)
    assert bgn_cdf(-1e6, p) == 0.0
    assert bgn_cdf(1e6, p) == 1.0


def test_quantile_values(backend):
    assert bgn_quantile(0.5, BgnParams(3, 3, 7, 2, 1)) == pytest.approx(7.0, abs=1e-12)
    assert bgn_quantile(0.3, BgnParams(1, 1, 0, 1, 1)) == pytest.approx(math.log(0.6), rel=1e-12)
    assert bgn_quantile(0.9, BgnParams(0.5, 2, 0, 1, 2)) == pytest.approx(Q90_HALF_2, rel=1e-9)


@pytest.mark.parametrize("prob", [0.0, 1.0, -0.5, 2.0])
def test_quantile_domain(prob):
    with pytest.raises(DomainError):
        bgn_quantile(prob, BgnParams())


@pytest.mark.parametrize("field", ["alpha", "beta", "sigma", "s"])
def test_params_positive(field):
    kw = dict(alpha=1.0, beta=1.0, mu=0.0, sigma=1.0, s=2.0)
    kw[field] = 0.0
    with pytest.raises(DomainError):
        BgnParams(**kw)


def test_limiting_values():
    assert limiting_beta_pdf(0.0, BgnParams(1, 1, 0, 1, 3)) == pytest.approx(0.5)
    assert limiting_beta_pdf(1.0, BgnParams(1, 3, 0, 1, 3)) == pytest.approx(0.0)
    assert limiting_beta_pdf(0.0, BgnParams(2, 1, 0, 1, 3)) == pytest.approx(0.5)
    assert limiting_beta_pdf(1.5, BgnParams(2, 1, 0, 1, 3)) == 0.0


@pytest.mark.parametrize("ab", [(0.5, 0.5), (2.0, 1.0)])
def test_large_s_approaches_beta(backend, ab):
    p = BgnParams(ab[0], ab[1], 0.4, 1.3, 64.0)
    x = np.linspace(p.mu - 0.9 * p.sigma, p.mu + 0.9 * p.sigma, 401)
    assert np.max(np.abs(bgn_pdf(x, p) - limiting_beta_pdf(x, p))) <= 0.05


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0, 4.0])
def test_reduces_to_gn(backend, s):
    p = BgnParams(1.0, 1.0, 0.3, 1.7, s)
    x = np.linspace(-6, 6, 101)
    np.testing.assert_allclose(bgn_pdf(x, p), gn_pdf_std((x - p.mu) / p.sigma, s) / p.sigma,
                               rtol=1e-13, atol=0)


def test_normal_and_laplace_cases(backend):
    x = np.linspace(-4, 4, 101)
    np.testing.assert_allclose(bgn_pdf(x, BgnParams(1, 1, 0.5, 2.0, 2)),
                               stats.norm.pdf(x, 0.5, 2.0 / math.sqrt(2)), rtol=1e-12)
    np.testing.assert_allclose(bgn_pdf(x, BgnParams(1, 1, 0.5, 2.0, 1)),
                               stats.laplace.pdf(x, 0.5, 2.0), rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(params, st.floats(-10, 10))
def test_location_scale_closure(p, x):
    std = BgnParams(p.alpha, p.beta, 0.0, 1.0, p.s)
    want = bgn_pdf((x - p.mu) / p.sigma, std) / p.sigma
    assert bgn_pdf(x, p) == pytest.approx(want, rel=1e-13, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(params, st.floats(0.001, 0.999))
def test_quantile_round_trip(p, u):
    x = bgn_quantile(u, p)
    assert bgn_cdf(x, p) == pytest.approx(u, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(params, st.floats(-8, 8), st.floats(1e-3, 2.0))
def test_cdf_nondecreasing(p, x, dx):
    assert bgn_cdf(x + dx, p) >= bgn_cdf(x, p)


@settings(max_examples=40, deadline=None)
@given(params, st.floats(-6, 6))
def test_cdf_plus_sf(p, x):
    assert bgn_cdf(x, p) + bgn_sf(x, p) == pytest.approx(1.0, abs=1e-13)


def test_cdf_derivative_is_pdf(backend):
    for p in (BgnParams(2.0, 0.6, 0.0, 1.0, 1.0), BgnParams(0.7, 3.0, 1.0, 2.0, 2.5)):
        x = np.concatenate([np.linspace(p.mu - 3, p.mu - 0.05, 30), np.linspace(p.mu + 0.05, p.mu + 3, 30)])
        h = 1e-6
        lo = (bgn_cdf(x + h, p) - bgn_cdf(x - h, p)) / (2 * h)
        up = -(bgn_sf(x + h, p) - bgn_sf(x - h, p)) / (2 * h)
        fd = np.where(x < p.mu, lo, up)
        np.testing.assert_allclose(fd, bgn_pdf(x, p), rtol=1e-5)


def test_logpdf_matches_pdf(backend):
    p = BgnParams(1.7, 0.4, 0.0, 1.0, 1.3)
    x = np.linspace(-5, 5, 21)
    np.testing.assert_allclose(np.exp(bgn_logpdf(x, p)), bgn_pdf(x, p), rtol=1e-14)


def test_pdf_finite_in_far_tails(backend):
    # Phi^(alpha-1) grows in the lower tail but phi_s decays faster, so no nan or inf appears
    for p in (BgnParams(0.3, 1.0, 0.0, 1.0, 2.0), BgnParams(0.05, 0.05, 0.0, 1.0, 0.4)):
        v = bgn_pdf(np.array([-1e8, -50.0, 0.0, 50.0, 1e8]), p)
        assert np.all(np.isfinite(v)) and np.all(v >= 0)


def test_sample_determinism(backend):
    p = BgnParams(0.8, 2.0, 1.0, 0.5, 1.5)
    a = bgn_sample(5, p, 42).values
    b = bgn_sample(5, p, 42).values
    assert a.tobytes() == b.tobytes()
    assert bgn_sample(5, p, 42, batch=1).values.tobytes() != a.tobytes()
    assert bgn_sample(5, p, 43).values.tobytes() != a.tobytes()


def test_sample_backends_agree():
    from bgnsar import _backend
    if len(_backend.available()) < 2:
        pytest.skip("compiled kernels not built")
    p = BgnParams(0.3, 1.7, -1.0, 2.0, 0.8)
    prev = _backend.set_backend("python")
    try:
        py = bgn_sample(2000, p, 9).values
    finally:
        _backend.set_backend("cython")
    cy = bgn_sample(2000, p, 9).values
    _backend.set_backend(prev)
    np.testing.assert_allclose(py, cy, rtol=1e-12, atol=1e-14)


def test_sample_normal_moments():
    x = bgn_sample(100_000, BgnParams(1, 1, 0, 1, 2), 1).values
    assert abs(x.mean()) <= 0.01
    assert abs(x.var(ddof=1) - 0.5) <= 0.01


def test_sample_ks():
    p = BgnParams(0.1, 0.3, 0, 1, 4)
    x = np.sort(bgn_sample(100_000, p, 7).values)
    assert ks_statistic(x, bgn_cdf(x, p)) < KS_1PCT_1E5


def test_sample_tiny_beta_is_finite():
    x = bgn_sample(20_000, BgnParams(1.3, 0.026, 0.015, 1.97, 0.5), 3).values
    assert np.all(np.isfinite(x))


def test_sample_domain():
    with pytest.raises(DomainError):
        bgn_sample(0, BgnParams(), 1)
    with pytest.raises(DomainError):
        bgn_sample(3, BgnParams(), -1)
