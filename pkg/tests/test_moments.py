import math

import numpy as np
import pytest
from scipy import integrate

from bgnsar.bgn import BgnParams
from bgnsar.errors import DomainError, SeriesDivergenceError
from bgnsar.gn import gn_cdf_std, gn_pdf_std
from bgnsar.moments import SeriesTruncation, c_coeff, j_integral, moment_quadrature, moment_series, v_coeff

# mpmath quadrature (30 digits) of an independently coded density
M1_2_1_1_1_1 = 1.75
M3_HALF_2_0_1_2 = -2.2336755409336744


def test_v_coeff_values():
    assert v_coeff(1, 1) == pytest.approx(1.0)
    assert v_coeff(1, 0) == pytest.approx(0.0, abs=1e-15)
    assert v_coeff(2, 2) == pytest.approx(1.0)
    assert v_coeff(2, 0) == pytest.approx(0.0, abs=1e-15)
    assert v_coeff(2, 1) == pytest.approx(0.0, abs=1e-15)
    assert abs(v_coeff(0.5, 0, 200)) <= 1e-3


@pytest.mark.parametrize("alpha", [1, 2, 3, 4, 5])
def test_v_coeff_integer_exact(alpha):
    for k in range(8):
        want = 1.0 if k == alpha else 0.0
        assert v_coeff(alpha, k, 60) == pytest.approx(want, abs=1e-12)


def test_v_coeff_domain():
    with pytest.raises(DomainError):
        v_coeff(0.0, 1)


def test_c_coeff_values():
    assert c_coeff(0, 3, 2.0) == pytest.approx(8.0)
    assert c_coeff(1, 0, 1.7) == pytest.approx(0.0, abs=1e-15)
    assert c_coeff(1, 1, 2.0) == pytest.approx(-2 / 3, rel=1e-14)


@pytest.mark.parametrize("j", [2, 3])
@pytest.mark.parametrize("s", [1.0, 2.0])
def test_c_coeff_is_power_of_base_series(j, s):
    # j-th power of sum_m (-1)^m y^m / ((1/s + m) m!), expanded numerically
    base = np.array([(-1) ** m / ((1 / s + m) * math.factorial(m)) for m in range(11)])
    poly = np.array([1.0])
    for _ in range(j):
        poly = np.convolve(poly, base)[:11]
    for m in range(11):
        assert c_coeff(m, j, s) == pytest.approx(poly[m], rel=1e-10, abs=1e-12)


def test_j_integral_values():
    assert j_integral(0, 0, 2.0) == pytest.approx(0.5, rel=1e-10)
    assert j_integral(2, 0, 2.0) == pytest.approx(0.25, rel=1e-10)
    assert j_integral(0, 1, 1.0) == pytest.approx(0.375, rel=1e-10)


def test_j_integral_against_quadrature():
    for s in (1.0, 2.0, 4.0):
        for i in (0, 1, 2):
            for k in (0, 1, 2, 3):
                quad, _ = integrate.quad(lambda z: z ** i * gn_pdf_std(z, s) * gn_cdf_std(z, s) ** k,
                                         0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
                assert j_integral(i, k, s) == pytest.approx(quad, rel=1e-7, abs=1e-12)


def test_truncation_validation():
    with pytest.raises(DomainError):
        SeriesTruncation(tol=0.5)
    with pytest.raises(DomainError):
        SeriesTruncation(m_max=0)


def test_moment_series_values():
    assert moment_series(1, BgnParams(3, 3, 0, 1, 2)) == pytest.approx(0.0, abs=1e-10)
    assert moment_series(2, BgnParams(1, 1, 0, 1, 2)) == pytest.approx(0.5, rel=1e-10)
    v = moment_series(1, BgnParams(2, 1, 1, 1, 1))
    assert v == pytest.approx(M1_2_1_1_1_1, rel=1e-8)
    assert v.validated


def test_moment_series_flags_non_integer_shapes():
    # short truncations return a value, marked as unvalidated
    assert not moment_series(1, BgnParams(2.5, 1, 0, 1, 2), SeriesTruncation(k_max=4)).validated
    assert not moment_series(1, BgnParams(2, 1.5, 0, 1, 2), SeriesTruncation(j_max=4)).validated
    assert moment_series(2, BgnParams(2, 3, 0.5, 1.5, 1.5)).validated


def test_moment_series_non_integer_default_truncation_raises():
    # the expansion of Phi^alpha does not converge termwise for k > alpha
    with pytest.raises(SeriesDivergenceError):
        moment_series(1, BgnParams(2.5, 1, 0, 1, 2))


def test_moment_quadrature_values(backend):
    assert moment_quadrature(1, BgnParams(1, 1, 5, 2, 2)) == pytest.approx(5.0, abs=1e-8)
    assert moment_quadrature(2, BgnParams(1, 1, 0, 1, 1)) == pytest.approx(2.0, abs=1e-7)
    assert moment_quadrature(3, BgnParams(0.5, 2, 0, 1, 2)) == pytest.approx(M3_HALF_2_0_1_2, rel=1e-8)


def test_moment_domain():
    with pytest.raises(DomainError):
        moment_series(0, BgnParams())
    with pytest.raises(DomainError):
        moment_quadrature(0, BgnParams())


@pytest.mark.parametrize("mu", [0.0, 1.0])
@pytest.mark.parametrize("s", [1.0, 2.0])
def test_moment_grid(mu, s):
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            p = BgnParams(a, b, mu, 1.0, s)
            for n in (1, 2):
                q = moment_quadrature(n, p)
                assert abs(moment_series(n, p) - q) <= 1e-5 * (1 + abs(q))
