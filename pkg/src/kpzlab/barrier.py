"""Barriers and first-passage laws of Brownian motion with diffusion coefficient 2.

A barrier ``g`` is stored around a split point ``alpha`` as two branches,
each a function of the distance ``t >= 0`` from the split: the right branch
is ``t -> g(alpha + t)`` and the left branch is ``t -> g(alpha - t)``.

The Brownian motion ``B`` has ``Var B(t) = 2t``; ``tau`` is the first time
``B`` reaches the branch.  Closed forms are available for constant and
linear branches, a series over the zeros of Upsilon for the square-root
branch and a series over the Airy zeros for the parabolic branch.  A
second-kind Volterra solver handles any continuous branch and a Monte Carlo
simulator serves as an independent oracle.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np
from scipy import linalg, special

from . import specfun

log = logging.getLogger(__name__)

SMALL_T = 1e-3
_SQRT_4PI = math.sqrt(4.0 * math.pi)


# ---------------------------------------------------------------------------
# branches


class Branch:
    """One side of a barrier, parameterised by distance from the split."""

    finite = True
    kinks: tuple = ()

    def value(self, t):
        raise NotImplementedError

    def slope(self, t):
        raise NotImplementedError

    @property
    def level(self) -> float:
        """Branch value at t = 0."""
        return float(self.value(0.0))


@dataclass(frozen=True)
class Constant(Branch):
    r: float

    def value(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.r)

    def slope(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class Linear(Branch):
    r: float
    s: float

    def value(self, t):
        return self.r + self.s * np.asarray(t, dtype=float)

    def slope(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.s)


@dataclass(frozen=True)
class Sqrt(Branch):
    r: float
    b: float

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("Sqrt branch needs b > 0")

    def value(self, t):
        return self.r + self.b * np.sqrt(np.asarray(t, dtype=float))

    def slope(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return 0.5 * self.b / np.sqrt(t)


@dataclass(frozen=True)
class Parabola(Branch):
    r: float
    beta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("Parabola branch needs beta > 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return self.r + self.beta * t * t

    def slope(self, t):
        return 2.0 * self.beta * np.asarray(t, dtype=float)


@dataclass(frozen=True)
class Infinite(Branch):
    finite = False

    def value(self, t):
        return np.full_like(np.asarray(t, dtype=float), np.inf)

    def slope(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class General(Branch):
    """Branch given by callables; ``kinks`` lists interior points where g' is singular."""

    fn: Callable
    dfn: Callable
    kinks: tuple = ()
    label: str = "general"

    def value(self, t):
        return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=float)

    def slope(self, t):
        return np.asarray(self.dfn(np.asarray(t, dtype=float)), dtype=float)


@dataclass(frozen=True)
class Barrier:
    """A barrier around a split point.

    ``point`` is only used when both branches are infinite: the barrier is
    then finite at the single point ``split`` (narrow wedge).
    """

    split: float
    left: Branch
    right: Branch
    point: float | None = None

    def __post_init__(self):
        if not (self.left.finite or self.right.finite) and self.point is None:
            raise ValueError("a barrier with two infinite branches needs a point value")

    @property
    def narrow_wedge(self) -> bool:
        return not (self.left.finite or self.right.finite)

    @property
    def value_at_split(self) -> float:
        """g(alpha), the smaller of the one-sided values."""
        vals = [b.level for b in (self.left, self.right) if b.finite]
        if self.point is not None:
            vals.append(self.point)
        return float(min(vals))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.split
        out = np.where(d >= 0, self.right.value(np.abs(d)), self.left.value(np.abs(d)))
        if self.narrow_wedge:
            out = np.where(d == 0, self.point, out)
        return out

    def shifted(self, dr: float) -> "Barrier":
        """The barrier g + dr."""
        return Barrier(
            self.split,
            _shift_branch(self.left, dr),
            _shift_branch(self.right, dr),
            None if self.point is None else self.point + dr,
        )

    def resplit(self, alpha: float) -> "Barrier":
        """Same function g described around a new split point."""
        if alpha == self.split:
            return self
        if self.narrow_wedge:
            raise ValueError("a narrow wedge can only be split at its point")
        a0 = self.split
        delta = alpha - a0

        def right_fn(t, self=self):
            return self(alpha + t)

        def left_fn(t, self=self):
            return self(alpha - t)

        def right_d(t):
            x = alpha + t - a0
            return np.where(x >= 0, self.right.slope(np.abs(x)), -self.left.slope(np.abs(x)))

        def left_d(t):
            x = alpha - t - a0
            return np.where(x >= 0, -self.right.slope(np.abs(x)), self.left.slope(np.abs(x)))

        k = abs(delta)
        right_kinks = (k,) if delta < 0 else ()
        left_kinks = (k,) if delta > 0 else ()
        far_right = self.right if delta >= 0 else self.left
        far_left = self.left if delta <= 0 else self.right
        if not (far_right.finite and far_left.finite and self.left.finite and self.right.finite):
            raise ValueError("resplit is only supported for barriers with two finite branches")
        return Barrier(
            alpha,
            General(left_fn, left_d, left_kinks, "resplit-left"),
            General(right_fn, right_d, right_kinks, "resplit-right"),
        )


def _shift_branch(b: Branch, dr: float) -> Branch:
    if isinstance(b, Constant):
        return Constant(b.r + dr)
    if isinstance(b, Linear):
        return Linear(b.r + dr, b.s)
    if isinstance(b, Sqrt):
        return Sqrt(b.r + dr, b.b)
    if isinstance(b, Parabola):
        return Parabola(b.r + dr, b.beta)
    if isinstance(b, Infinite):
        return b
    return General(lambda t: b.fn(t) + dr, b.dfn, b.kinks, b.label)


# ---------------------------------------------------------------------------
# closed forms


def _check_below(y, level):
    if np.any(np.asarray(y) >= level):
        raise ValueError("start point must lie strictly below the barrier")


def rho_const(y, r, t):
    """Density of the first passage of B(0) = y to the level r > y."""
    _check_below(y, r)
    d = np.asarray(r, dtype=float) - np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = d / (_SQRT_4PI * t**1.5) * np.exp(-(d * d) / (4.0 * t))
    return np.where(t > 0, out, 0.0)


def cdf_const(y, r, t):
    """P(tau <= t) for the level r, equal to erfc((r - y)/(2 sqrt t))."""
    d = np.asarray(r, dtype=float) - np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        return special.erfc(d / (2.0 * np.sqrt(np.asarray(t, dtype=float))))


def rho_linear(y, intercept, slope, t):
    """Density of the first passage to the line ``intercept + slope * t``."""
    _check_below(y, intercept)
    d = np.asarray(intercept, dtype=float) - np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = d / (_SQRT_4PI * t**1.5) * np.exp(-((d + slope * t) ** 2) / (4.0 * t))
    return np.where(t > 0, out, 0.0)


def cdf_linear(y, intercept, slope, t):
    """P(tau <= t) for the line ``intercept + slope * t``."""
    d = np.asarray(intercept, dtype=float) - np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    rt = 2.0 * np.sqrt(t)
    with np.errstate(divide="ignore"):
        x1 = (d + slope * t) / rt
        x2 = (d - slope * t) / rt
    # e^{-d s} erfc(x2) = e^{-x1^2} erfcx(x2) avoids overflow when s < 0
    with np.errstate(over="ignore", invalid="ignore"):
        second = np.where(
            x2 >= 0,
            np.exp(-x1 * x1) * special.erfcx(np.maximum(x2, 0.0)),
            np.exp(-d * slope) * special.erfc(x2),
        )
    return 0.5 * special.erfc(x1) + 0.5 * second


# ---------------------------------------------------------------------------
# square-root barrier


@dataclass(frozen=True)
class SqrtSeries:
    """Exponents and weights of the series for the barrier r + b sqrt(t).

    With d = r - y the density is sum_n (d/2)^{-2 nu_n} t^{nu_n - 1} / U'(nu_n)
    where U = Upsilon(., -b/sqrt 2) and nu_n are its zeros.
    """

    b: float
    nu: np.ndarray
    log_abs_dU: np.ndarray
    sign_dU: np.ndarray


SQRT_SERIES_BMAX = 8.0


def sqrt_series(b: float, terms: int = 50) -> SqrtSeries:
    """Zeros of Upsilon and the derivative there, for the square-root series."""
    if b > SQRT_SERIES_BMAX:
        raise ValueError(
            f"b = {b} exceeds {SQRT_SERIES_BMAX}: the leading exponent is within "
            "rounding of zero and the series loses all accuracy"
        )
    nu = specfun.upsilon_zeros(b, terms)
    z = specfun.sqrt_barrier_argument(b)
    dU = np.array([specfun.upsilon_dnu(v, z) for v in nu])
    return SqrtSeries(b, nu, np.log(np.abs(dU)), np.sign(dU))


def _sqrt_terms(series: SqrtSeries, d, t, extra_power: float):
    # log|term| = -2 nu log(d/2) + (nu + extra_power) log t - log|U'|
    d = np.asarray(d, dtype=float)[..., None]
    t = np.asarray(t, dtype=float)[..., None]
    nu = series.nu
    with np.errstate(divide="ignore"):
        logs = -2.0 * nu * np.log(d / 2.0) + (nu + extra_power) * np.log(t) - series.log_abs_dU
    return series.sign_dU * np.exp(logs)


def rho_sqrt(y, r, b, t, terms: int = 50):
    """First-passage density to r + b sqrt(t), by the Upsilon-zero series.

    For t below 1e-3 the series is replaced by :func:`rho_const`, its small-time
    limit, and a warning is logged.
    """
    _check_below(y, r)
    series = sqrt_series(b, terms)
    d = np.broadcast_to(np.asarray(r, dtype=float) - np.asarray(y, dtype=float), np.shape(t))
    t = np.asarray(t, dtype=float)
    out = _sqrt_terms(series, d, t, -1.0).sum(axis=-1)
    small = t < SMALL_T
    if np.any(small):
        log.warning("rho_sqrt: t < %g replaced by the constant-barrier density", SMALL_T)
        out = np.where(small, rho_const(0.0, d, t), out)
    return out


def _dyadic_sqrt_bound(d, b, t, kmax: int = 200):
    """Upper bound on P(tau <= t) for r + b sqrt(t) by a union over dyadic blocks."""
    d = np.asarray(d, dtype=float)
    t = np.asarray(t, dtype=float)
    total = np.zeros(np.broadcast(d, t).shape)
    for k in range(kmax):
        hi = t * 2.0**-k
        lo = 0.5 * hi
        with np.errstate(divide="ignore", invalid="ignore"):
            term = special.erfc((d + b * np.sqrt(lo)) / (2.0 * np.sqrt(hi)))
        total = total + term
        if np.all(term < 1e-300):
            break
    return total


def cdf_sqrt(y, r, b, t, terms: int = 50):
    """P(tau <= t) for the barrier r + b sqrt(t).

    The series gives the survival function sum_n c_n t^{nu_n}/(-nu_n).  At
    small t it cancels catastrophically, so the result is clipped to
    [0, min(erfc bound, dyadic bound)]; both bounds are rigorous.  For
    ``b > 8`` only the bounds are used and the value is set to 0 where they
    are below 1e-15.
    """
    d = np.asarray(r, dtype=float) - np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    d, t = np.broadcast_arrays(d, t)
    upper = np.minimum(cdf_const(0.0, d, t), _dyadic_sqrt_bound(d, b, t))
    if b > SQRT_SERIES_BMAX:
        if np.any(upper > 1e-15):
            raise ValueError(f"b = {b}: series unavailable and hitting probability not negligible")
        return np.zeros_like(upper)
    series = sqrt_series(b, terms)
    with np.errstate(over="ignore", invalid="ignore"):
        surv = (_sqrt_terms(series, d, t, 0.0) / (-series.nu)).sum(axis=-1)
    surv = np.nan_to_num(surv, nan=0.0, posinf=0.0, neginf=0.0)
    return np.clip(1.0 - surv, 0.0, upper)


# ---------------------------------------------------------------------------
# parabolic barrier


def _parbl_terms_needed(beta, t, tol=1e-17, cap=20000):
    # e^{beta^{2/3} a_k t} < tol with a_k ~ -(3 pi (4k - 1)/8)^{2/3}
    c = beta ** (2.0 / 3.0) * max(float(np.min(t)), 1e-12)
    amax = -math.log(tol) / c
    k = int((8.0 / (3.0 * math.pi)) * amax**1.5 / 4.0) + 2
    return min(max(k, 20), cap)


def rho_parbl(y, r, beta, t, terms: int | None = None):
    """First-passage density to r + beta t^2, by the Airy-zero series.

    ``terms=None`` picks enough zeros for the smallest requested t (up to
    20000).  Below t = 1e-3 the constant-barrier density is substituted and
    a warning is logged.
    """
    _check_below(y, r)
    t = np.asarray(t, dtype=float)
    d = np.broadcast_to(np.asarray(r, dtype=float) - np.asarray(y, dtype=float), t.shape)
    tt = np.maximum(t, SMALL_T)
    k = _parbl_terms_needed(beta, tt) if terms is None else int(terms)
    a = specfun.airy_zeros(k)
    aip = specfun.airy_ai_prime(a)
    c = beta ** (2.0 / 3.0)
    out = np.empty(t.shape)
    flat_t, flat_d, flat_o = tt.ravel(), d.ravel(), out.reshape(-1)
    for i in range(flat_t.size):
        ti, di = flat_t[i], flat_d[i]
        w = np.exp(c * a * ti - beta**2 * ti**3 / 3.0)
        flat_o[i] = c * np.sum(w * specfun.airy_ai(beta ** (1.0 / 3.0) * di + a) / aip)
    small = t < SMALL_T
    if np.any(small):
        log.warning("rho_parbl: t < %g replaced by the constant-barrier density", SMALL_T)
        out = np.where(small, rho_const(0.0, d, np.maximum(t, 1e-300)), out)
    return out


def rho_parbl_contour(y, r, beta, t, shift: float = 1.0, half_width: float = 4000.0, n: int = 400001):
    """Same density from the contour integral over Re z = shift.

    rho = beta^{2/3}/(2 pi i) int e^{beta^{2/3} z t - beta^2 t^3/3} Ai(z + beta^{1/3} d)/Ai(z) dz,
    evaluated with the trapezoid rule on a truncated vertical line.  Ai has
    no zeros off the negative axis, so any shift > 0 is allowed.
    """
    _check_below(y, r)
    d = float(r - y)
    u = np.linspace(-half_width, half_width, n)
    z = shift + 1j * u
    w = z + beta ** (1.0 / 3.0) * d
    # Ai(w)/Ai(z) through the scaled airye, which stays finite far up the line
    ratio = special.airye(w)[0] / special.airye(z)[0] * np.exp(-(2.0 / 3.0) * (w**1.5 - z**1.5))
    f = np.exp(beta ** (2.0 / 3.0) * z * t) * ratio
    integral = np.trapezoid(f, u).real / (2.0 * math.pi)
    return beta ** (2.0 / 3.0) * math.exp(-(beta**2) * t**3 / 3.0) * integral


# ---------------------------------------------------------------------------
# Volterra solver for general branches


@dataclass(frozen=True)
class VolterraSolution:
    t: np.ndarray
    rho: np.ndarray  # shape (len(starts), len(t))
    cdf: np.ndarray  # same shape


def _volterra_grid(horizon, n, kinks, s_min=1e-4, s_geo=0.3, ratio=1.04, kink_min=1e-14, kink_ratio=1.02):
    # uniform in s = sqrt(t) with every kink on a node, plus geometric
    # refinement towards s = 0 (starts close to the barrier) and towards
    # both sides of each kink (g' may blow up there)
    s_max = math.sqrt(horizon)
    h = s_max / n
    ks = sorted(math.sqrt(k) for k in kinks if 0 < k < horizon)
    breaks = [0.0] + ks + [s_max]
    pieces = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        m = max(2, int(round((b - a) / h)))
        pieces.append(np.linspace(a, b, m + 1)[:-1])
    s = np.concatenate(pieces + [np.array([s_max])])
    m_geo = int(math.ceil(math.log(s_geo / s_min) / math.log(ratio)))
    offsets = s_geo * ratio ** -np.arange(0, m_geo + 1)
    extra = [offsets]
    m_kink = int(math.ceil(math.log(s_geo / kink_min) / math.log(kink_ratio)))
    kink_offsets = s_geo * kink_ratio ** -np.arange(0, m_kink + 1)
    for sk in ks:
        near = kink_offsets[kink_offsets < 0.5 * min(sk, s_max - sk)]
        extra += [sk - near, sk + near]
    return np.unique(np.concatenate([s] + extra))


def first_passage_volterra(branch: Branch, starts, horizon: float = 6.0, n: int = 800) -> VolterraSolution:
    """Densities and CDFs of tau for many starting points at once.

    Solves the second-kind equation

        rho(t) = -2 psi(t | y, 0) + 2 int_0^t rho(s) psi(t | g(s), s) ds,
        psi(t | x, s) = p(g(t), t | x, s) * (g'(t) - (g(t) - x)/(t - s)) / 2,

    with p the diffusion-2 heat kernel.  The kernel vanishes on the diagonal
    for smooth g, so the trapezoid rule on a grid uniform in sqrt(t) is
    second order.  The CDF adds the trapezoid integral of rho - rho_line to
    the exact CDF of the tangent line at t = 0 (or of the level g(0) when
    the slope there is infinite), so mass concentrated below the first
    grid step (starts very close to the barrier) is still accounted for.
    """
    starts = np.atleast_1d(np.asarray(starts, dtype=float))
    g0 = branch.level
    _check_below(starts, g0)
    # the hitting spike of the closest start sits at t ~ d^2 and must be resolved
    d_min = float(np.min(g0 - starts))
    s = _volterra_grid(horizon, n, branch.kinks, s_min=min(1e-4, 0.05 * d_min))
    t = s * s
    g = branch.value(t)
    dg = branch.slope(t[1:])
    dg = np.where(np.isfinite(dg), dg, 0.0)
    ds = np.diff(s)

    tk = t[1:, None]
    tj = t[None, 1:]
    lag = tk - tj
    lower = lag > 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        gap = g[1:, None] - g[None, 1:]
        kern = np.exp(-(gap**2) / (4 * lag)) / np.sqrt(4 * np.pi * lag) * 0.5 * (dg[:, None] - gap / lag)
    kern = np.where(lower, kern, 0.0)
    # trapezoid: rho_k = src_k + 2 sum_{j<k} wj' K_kj rho_j, with the last
    # (diagonal) weight multiplying a vanishing kernel
    wj = np.empty(len(s) - 1)
    wj[:] = 2 * s[1:] * 0.5 * (ds + np.append(ds[1:], 0.0))
    mat = np.eye(len(s) - 1) - 2.0 * kern * wj[None, :]

    dt0 = t[1:, None]
    gap0 = g[1:, None] - starts[None, :]
    with np.errstate(over="ignore", under="ignore"):
        src = -2.0 * np.exp(-(gap0**2) / (4 * dt0)) / np.sqrt(4 * np.pi * dt0) * 0.5 * (dg[:, None] - gap0 / dt0)
    rho_inner = linalg.solve_triangular(mat, src, lower=True, check_finite=False)
    rho = np.vstack([np.zeros((1, len(starts))), rho_inner]).T

    # reference: the tangent line at t = 0 when it exists, else the level
    slope0 = float(branch.slope(np.array([0.0]))[0])
    if not np.isfinite(slope0):
        slope0 = 0.0
    d = (g0 - starts)[:, None]
    tt = np.maximum(t[None, :], 1e-300)
    rc = np.where(t[None, :] > 0, rho_linear(0.0, d, slope0, tt), 0.0)
    diff = (rho - rc) * 2 * s[None, :]
    cum = np.concatenate([np.zeros((len(starts), 1)), np.cumsum(0.5 * (diff[:, 1:] + diff[:, :-1]) * ds, axis=1)], axis=1)
    cdf = np.clip(cdf_linear(0.0, d, slope0, tt) + cum, 0.0, 1.0)
    cdf[:, 0] = 0.0
    return VolterraSolution(t, rho, cdf)


# ---------------------------------------------------------------------------
# Monte Carlo oracle


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted sample with the usual empirical-distribution helpers."""

    sorted_samples: np.ndarray
    n: int = field(default=-1)

    def __post_init__(self):
        s = np.sort(np.asarray(self.sorted_samples, dtype=float))
        object.__setattr__(self, "sorted_samples", s)
        if self.n < 0:
            object.__setattr__(self, "n", len(s))

    def __call__(self, x):
        """Fraction of the ``n`` underlying trials with value <= x."""
        return np.searchsorted(self.sorted_samples, x, side="right") / self.n

    def ks_distance(self, cdf: Callable) -> float:
        """sup |F_n - F| over the jump points, against a continuous CDF."""
        x = self.sorted_samples
        if len(x) == 0:
            return float(np.max(np.abs(np.atleast_1d(cdf(np.array([np.inf]))))))
        f = np.asarray(cdf(x), dtype=float)
        k = np.arange(1, len(x) + 1)
        return float(max(np.max(k / self.n - f), np.max(f - (k - 1) / self.n)))


@dataclass(frozen=True)
class FirstPassageSample:
    cdf: EmpiricalCdf
    hit_fraction: float


_KIND_CODES = {Constant: 0, Linear: 1, Sqrt: 2, Parabola: 3}


def _branch_code(branch):
    for cls, code in _KIND_CODES.items():
        if isinstance(branch, cls):
            if cls is Constant:
                return code, branch.r, 0.0
            if cls is Linear:
                return code, branch.r, branch.s
            if cls is Sqrt:
                return code, branch.r, branch.b
            return code, branch.r, branch.beta
    raise TypeError(f"Monte Carlo oracle does not support {type(branch).__name__}")


@numba.njit(nogil=True, cache=True)
def _barrier_at(kind, p0, p1, t):
    if kind == 0:
        return p0
    if kind == 1:
        return p0 + p1 * t
    if kind == 2:
        return p0 + p1 * np.sqrt(t)
    return p0 + p1 * t * t


@numba.njit(nogil=True, cache=True)
def _simulate_block(gen, n, y, nsteps, step, kind, p0, p1):
    out = np.full(n, np.inf)
    sd = np.sqrt(2.0 * step)
    for i in range(n):
        x = y
        for k in range(nsteps):
            t1 = (k + 1) * step
            g1 = _barrier_at(kind, p0, p1, t1)
            gm = _barrier_at(kind, p0, p1, t1 - 0.5 * step)
            xn = x + sd * gen.standard_normal()
            u = gen.random()
            if xn >= g1:
                out[i] = t1
                break
            # Brownian-bridge crossing probability with the midpoint level
            a = (gm - x) * (gm - xn) / step
            if a < 40.0 and u < np.exp(-a):
                out[i] = t1 - 0.5 * step
                break
            x = xn
    return out


def thread_count() -> int:
    """Worker threads from KPZLAB_THREADS, defaulting to the CPU count."""
    env = os.environ.get("KPZLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def block_generators(seed: int, n_blocks: int) -> list[np.random.Generator]:
    """Independent Philox substreams, one per block, from a single seed."""
    ss = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(child)) for child in ss.spawn(n_blocks)]


def mc_first_passage(
    branch: Branch,
    y: float,
    horizon: float = 10.0,
    n_paths: int = 100_000,
    step: float = 1e-3,
    seed: int = 0,
    block: int = 4096,
) -> FirstPassageSample:
    """Monte Carlo hitting times with a per-step Brownian-bridge correction.

    Paths are split into fixed blocks of ``block`` paths, each drawing from
    its own substream, so the result does not depend on the thread count.
    """
    if y >= branch.level:
        raise ValueError("start point must lie strictly below the barrier")
    kind, p0, p1 = _branch_code(branch)
    nsteps = int(round(horizon / step))
    sizes = [min(block, n_paths - i) for i in range(0, n_paths, block)]
    gens = block_generators(seed, len(sizes))

    def job(i):
        return _simulate_block(gens[i], sizes[i], float(y), nsteps, float(step), kind, float(p0), float(p1))

    workers = min(thread_count(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    times = np.concatenate(parts)
    hits = times[np.isfinite(times)]
    return FirstPassageSample(EmpiricalCdf(hits, n_paths), len(hits) / n_paths)


def oracle_cases() -> list[tuple[Branch, float, Callable]]:
    """One branch of each kind with an independent CDF route for the Monte Carlo check."""
    y = -1.0
    par = Parabola(0.0, 0.5)
    sol = first_passage_volterra(par, np.array([y]), horizon=5.0, n=800)
    return [
        (Constant(0.0), y, lambda t: cdf_const(y, 0.0, t)),
        (Linear(0.0, 0.5), y, lambda t: cdf_linear(y, 0.0, 0.5, t)),
        (Sqrt(0.0, 1.0), y, lambda t: cdf_sqrt(y, 0.0, 1.0, t)),
        (par, y, lambda t: np.interp(t, sol.t, sol.cdf[0])),
    ]


def oracle_checks(n_paths: int = 100_000, seed: int = 1, horizon: float = 5.0) -> list:
    """Monte Carlo KS distances and the b -> 0, beta -> 0 density limits."""
    from .report import Check

    out = []
    for branch, y, cdf in oracle_cases():
        s = mc_first_passage(branch, y, horizon=horizon, n_paths=n_paths, seed=seed)
        out.append(Check(f"mc ks {type(branch).__name__.lower()}", {"y": y, "paths": n_paths, "seed": seed}, s.cdf.ks_distance(cdf), 0.0, 0.015))
    t = np.linspace(0.2, 5.0, 97)
    ref = rho_const(-1.0, 0.0, t)
    d = np.max(np.abs(rho_sqrt(-1.0, 0.0, 0.01, t) - ref))
    out.append(Check("sqrt b->0 density", {"b": 0.01, "y": -1.0}, float(d), 0.0, 0.02))
    d = np.max(np.abs(rho_parbl(-1.0, 0.0, 0.01, t) - ref))
    out.append(Check("parabola beta->0 density", {"beta": 0.01, "y": -1.0}, float(d), 0.0, 0.02))
    return out
