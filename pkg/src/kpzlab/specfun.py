"""Scalar special functions.

Airy functions, Gamma and erfc are delegated to :mod:`scipy.special`.  The
confluent hypergeometric series and the function

    Upsilon(nu, z) = sqrt(pi)/Gamma(1/2+nu) 1F1(nu, 1/2; z^2/2)
                     - sqrt(2 pi) z/Gamma(nu) 1F1(1/2+nu, 3/2; z^2/2)
                   = 2^nu exp(z^2/4) D_{-2 nu}(z)

are implemented here, together with the root finders that the barrier
densities need.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import optimize, special

HYP1F1_ZMAX = 50.0


class PoleError(ArithmeticError):
    """Raised when a function is evaluated at one of its poles."""


class ZeroSearchError(RuntimeError):
    """Raised when a root scan exhausts its window."""


def airy_ai(x):
    """Ai(x); accepts scalars or arrays."""
    return special.airy(x)[0]


def airy_ai_prime(x):
    """Ai'(x); accepts scalars or arrays."""
    return special.airy(x)[1]


def airy_ai_both(x):
    """(Ai(x), Ai'(x)) in one call."""
    a, ap, _, _ = special.airy(x)
    return a, ap


def _polish_airy_zero(a):
    # bracket a few ulps-wide interval and refine with brentq
    h = 1e-6
    lo, hi = a - h, a + h
    if airy_ai(lo) * airy_ai(hi) > 0:
        return a
    return optimize.brentq(airy_ai, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


@lru_cache(maxsize=8)
def _airy_zeros_cached(n):
    a, _, _, _ = special.ai_zeros(n)
    zs = np.array([_polish_airy_zero(float(ak)) for ak in a])
    zs.setflags(write=False)
    return zs


def airy_zeros(n: int) -> np.ndarray:
    """First ``n`` zeros a_1 > a_2 > ... of Ai, all negative."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _airy_zeros_cached(int(n)).copy()


def gamma(x: float) -> float:
    """Gamma function; raises :class:`PoleError` at non-positive integers."""
    if x <= 0 and float(x).is_integer():
        raise PoleError(f"Gamma has a pole at {x}")
    return float(special.gamma(x))


def recip_gamma(x):
    """1/Gamma(x), zero at the poles."""
    return special.rgamma(x)


def erfc(x):
    """Complementary error function."""
    return special.erfc(x)


def hyp1f1(a: float, b: float, z: float) -> float:
    """Kummer's function 1F1(a; b; z) by its power series.

    The terms are accumulated with :func:`math.fsum`, which makes the sum
    exact up to the rounding of the individual terms.  Arguments are limited
    to ``|z| <= 50``.
    """
    if b <= 0 and float(b).is_integer():
        raise PoleError(f"1F1 has a pole at b = {b}")
    if abs(z) > HYP1F1_ZMAX:
        raise ValueError(f"|z| = {abs(z)} exceeds the series range {HYP1F1_ZMAX}")
    terms = [1.0]
    term = 1.0
    k = 0
    while True:
        term *= (a + k) / (b + k) * z / (k + 1)
        k += 1
        if term == 0.0:
            break
        terms.append(term)
        # once past the turning point the terms shrink monotonically
        if k > abs(a) + abs(z) and abs(term) < 1e-17 * abs(math.fsum(terms)):
            break
        if k > 5000:
            raise ArithmeticError("1F1 series failed to converge")
    return math.fsum(terms)


def upsilon(nu: float, z: float) -> float:
    """Upsilon(nu, z) = 2^nu e^{z^2/4} D_{-2nu}(z) via two 1F1 series."""
    h = 0.5 * z * z
    first = math.sqrt(math.pi) * recip_gamma(0.5 + nu) * hyp1f1(nu, 0.5, h)
    second = math.sqrt(2.0 * math.pi) * z * recip_gamma(nu) * hyp1f1(0.5 + nu, 1.5, h)
    return float(first - second)


def upsilon_dnu(nu: float, z: float, h: float = 1e-6) -> float:
    """d/dnu Upsilon(nu, z) by a central difference."""
    return (upsilon(nu + h, z) - upsilon(nu - h, z)) / (2.0 * h)


def sqrt_barrier_argument(b: float) -> float:
    """Second argument of Upsilon whose nu-zeros govern the barrier r + b sqrt(t).

    For Brownian motion with diffusion coefficient 2 started below the
    barrier, the space-time harmonic functions are t^{-nu} Upsilon(nu, -x/sqrt(2t)),
    so the boundary value is taken at z = -b/sqrt(2).
    """
    return -b / math.sqrt(2.0)


@lru_cache(maxsize=64)
def _upsilon_zeros_cached(b, n, step):
    z = sqrt_barrier_argument(b)
    window = n + 5.0
    while True:
        zeros = []
        nu_hi, f_hi = 0.0, upsilon(0.0, z)
        while nu_hi > -window and len(zeros) < n:
            nu_lo = nu_hi - step
            f_lo = upsilon(nu_lo, z)
            if f_lo == 0.0:
                zeros.append(nu_lo)
            elif f_lo * f_hi < 0:
                zeros.append(
                    optimize.brentq(upsilon, nu_lo, nu_hi, args=(z,), xtol=1e-15, rtol=1e-15)
                )
            nu_hi, f_hi = nu_lo, f_lo
        if len(zeros) >= n:
            return tuple(zeros[:n])
        if window > 8 * (n + 5):
            raise ZeroSearchError(
                f"found {len(zeros)} of {n} zeros of Upsilon(., {z:.6g}) in [-{window}, 0)"
            )
        window *= 2.0


def upsilon_zeros(b: float, n: int, step: float = 0.05) -> np.ndarray:
    """The ``n`` least negative zeros of nu -> Upsilon(nu, -b/sqrt(2)).

    These are the exponents of the square-root barrier series.  The scan
    walks down from nu = 0 in steps of ``step`` and refines each sign change
    with Brent's method; the window [-(n+5), 0) is doubled if it is exhausted.
    """
    if b <= 0:
        raise ValueError("b must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.array(_upsilon_zeros_cached(float(b), int(n), float(step)))
