import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from kpzlab import specfun

# mpmath at 30 digits
AI = {0.0: 0.355028053887817239, 1.3: 0.0934746657715027045, -2.7: -0.240038109742457359, 5.0: 1.08344428136074417e-4}
AIP = {0.0: -0.258819403792806798, 1.3: -0.120333865590183577, -2.7: 0.586007200144331329}


def _ai_maclaurin(x, terms=60):
    # Ai = c1 f - c2 g with the two power series of y'' = xy
    c1 = 3 ** (-2 / 3) / math.gamma(2 / 3)
    c2 = 3 ** (-1 / 3) / math.gamma(1 / 3)
    f = g = 0.0
    tf, tg = 1.0, x
    for k in range(terms):
        f += tf
        g += tg
        tf *= x**3 / ((3 * k + 2) * (3 * k + 3))
        tg *= x**3 / ((3 * k + 3) * (3 * k + 4))
    return c1 * f - c2 * g


@pytest.mark.parametrize("x", sorted(AI))
def test_airy_ai_values(x):
    assert specfun.airy_ai(x) == pytest.approx(AI[x], rel=1e-13, abs=1e-16)


def test_airy_ai_zero_matches_maclaurin():
    assert abs(specfun.airy_ai(0.0) - 0.355028053887817) < 1e-15
    assert abs(_ai_maclaurin(0.7) - specfun.airy_ai(0.7)) < 1e-14


@pytest.mark.parametrize("x", sorted(AIP))
def test_airy_ai_prime_values(x):
    assert specfun.airy_ai_prime(x) == pytest.approx(AIP[x], rel=1e-13)


def test_airy_prime_finite_difference():
    h = 1e-5
    fd = (specfun.airy_ai(1 + h) - specfun.airy_ai(1 - h)) / (2 * h)
    assert abs(fd - specfun.airy_ai_prime(1.0)) < 1e-8


def test_airy_tail_bound():
    assert specfun.airy_ai(5.0) <= 0.4 * math.exp(-(2 / 3) * 5**1.5)


@given(st.floats(0.0, 30.0))
def test_airy_tail_bound_property(x):
    zeta = (2 / 3) * x**1.5
    assert 0 < specfun.airy_ai(x) <= 0.4 * math.exp(-zeta)
    if x >= 0.5:
        assert specfun.airy_ai(x) <= math.exp(-zeta) / (2 * math.sqrt(math.pi) * x**0.25)


@given(st.floats(-8.0, 8.0))
def test_airy_equation_property(x):
    # Ai'' = x Ai, checked through the derivative of Ai'
    h = 1e-4
    d2 = (specfun.airy_ai_prime(x + h) - specfun.airy_ai_prime(x - h)) / (2 * h)
    assert abs(d2 - x * specfun.airy_ai(x)) < 1e-7


def test_airy_zeros():
    z = specfun.airy_zeros(3)
    # bisection on [-3, -2]
    lo, hi = -3.0, -2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if specfun.airy_ai(lo) * specfun.airy_ai(mid) <= 0:
            hi = mid
        else:
            lo = mid
    assert abs(z[0] - 0.5 * (lo + hi)) < 1e-8
    assert abs(z[0] + 2.338107410) < 1e-8
    assert np.all(z < 0) and np.all(np.diff(z) < 0)
    assert np.all(np.abs(specfun.airy_ai(z)) <= 1e-12)
    assert abs(specfun.airy_ai_prime(z[0])) > 0.1


def test_airy_zeros_many():
    z = specfun.airy_zeros(200)
    assert np.all(np.abs(specfun.airy_ai(z)) <= 1e-12)
    assert z[2] == pytest.approx(float(mpmath.airyaizero(3)), abs=1e-12)


def test_gamma():
    assert specfun.gamma(1.0) == 1.0
    assert specfun.recip_gamma(0.0) == 0.0
    assert specfun.gamma(0.5) == pytest.approx(1.772453850905516, rel=1e-14)
    with pytest.raises(specfun.PoleError):
        specfun.gamma(-2.0)
    assert specfun.recip_gamma(-3.0) == 0.0


@given(st.floats(0.1, 20.0))
def test_gamma_recurrence(x):
    assert specfun.gamma(x + 1) == pytest.approx(x * specfun.gamma(x), rel=1e-12)


def test_hyp1f1():
    assert specfun.hyp1f1(0.0, 0.5, 3.7) == 1.0
    assert specfun.hyp1f1(1.3, 1.3, 2.0) == pytest.approx(math.exp(2.0), rel=1e-13)
    assert specfun.hyp1f1(1.0, 2.0, 1.0) == pytest.approx(math.e - 1, rel=1e-13)


@given(st.floats(-3, 3), st.floats(0.3, 4), st.floats(-4, 4))
def test_hyp1f1_vs_mpmath(a, b, z):
    assert specfun.hyp1f1(a, b, z) == pytest.approx(float(mpmath.hyp1f1(a, b, z)), rel=1e-9, abs=1e-12)


def test_upsilon():
    for z in (0.0, 1.0, 3.0):
        assert specfun.upsilon(0.0, z) == pytest.approx(1.0, abs=1e-14)
    assert specfun.upsilon(0.5, 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_upsilon_vs_integral_representation():
    # D_{-p}(z) = e^{-z^2/4} / Gamma(p) int_0^inf t^{p-1} e^{-zt - t^2/2} dt
    nu, z = 0.7, 1.2
    p = 2 * nu
    val, _ = integrate.quad(lambda t: t ** (p - 1) * math.exp(-z * t - t * t / 2), 0, np.inf, epsabs=1e-14)
    d = math.exp(-z * z / 4) / math.gamma(p) * val
    assert specfun.upsilon(nu, z) == pytest.approx(2**nu * math.exp(z * z / 4) * d, rel=1e-10)
    assert specfun.upsilon(nu, z) == pytest.approx(0.736206686383837875, rel=1e-12)


def test_upsilon_zeros():
    b = 1.0
    z = specfun.sqrt_barrier_argument(b)
    nus = specfun.upsilon_zeros(b, 10)
    assert np.all(nus < 0)
    # the later zeros sit where the two 1F1 terms are large, so scale by |dU/dnu|
    for v in nus:
        assert abs(specfun.upsilon(v, z)) <= 1e-10 * max(1.0, abs(specfun.upsilon_dnu(v, z)))
    assert abs(specfun.upsilon_zeros(0.01, 1)[0] + 0.5) < 0.05


def test_erfc():
    assert specfun.erfc(0.0) == 1.0
    assert specfun.erfc(1.3) + specfun.erfc(-1.3) == pytest.approx(2.0, abs=1e-15)
    assert specfun.erfc(1.0) == pytest.approx(0.157299207050, abs=1e-12)
