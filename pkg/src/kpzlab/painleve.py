"""Hastings-McLeod solution of Painleve II and the distributions built from it.

u solves u'' = 2u^3 + xu with u(x) ~ -Ai(x) as x -> +inf and
u(x) ~ -sqrt(-x/2) as x -> -inf.  From u one gets

    v = u^4 + x u^2 - u'^2          (v' = u^2, v(+inf) = 0)
    y = x + 2u' + 2u^2
    E(x) = exp( 1/2 int_x^inf u )
    F(x) = exp(-1/2 int_x^inf (s - x) u(s)^2 ds) = exp(1/2 int_x^inf v)

and F_GUE = F^2, F_GOE = F E, Baik-Rains F0 = (1 - y v) E^4 F^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate, linalg

from . import specfun

X_MIN = -10.0
X_MAX = 8.0
N_GRID = 4000


class NewtonError(RuntimeError):
    """Newton iteration for the boundary value problem did not converge."""


class OutOfGridError(ValueError):
    """Requested argument lies outside the tabulated range."""


@dataclass(frozen=True)
class PainleveSolution:
    grid: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    v: np.ndarray | None = None
    y: np.ndarray | None = None
    E: np.ndarray | None = None
    F: np.ndarray | None = None
    residual: float = math.nan
    _interp: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def complete(self) -> bool:
        return self.v is not None

    def _spline(self, name):
        if name not in self._interp:
            x, u, up = self.grid, self.u, self.u_prime
            if name == "u":
                sp = interpolate.CubicHermiteSpline(x, u, up)
            elif name == "v":
                sp = interpolate.CubicHermiteSpline(x, self.v, u * u)
            elif name == "y":
                upp = 2 * u**3 + x * u
                sp = interpolate.CubicHermiteSpline(x, self.y, 1 + 2 * upp + 4 * u * up)
            elif name == "logE":
                sp = interpolate.CubicHermiteSpline(x, np.log(self.E), -0.5 * u)
            elif name == "logF":
                sp = interpolate.CubicHermiteSpline(x, np.log(self.F), -0.5 * self.v)
            else:
                raise KeyError(name)
            self._interp[name] = sp
        return self._interp[name]

    def at(self, name: str, x):
        """Hermite-cubic interpolant of u, v, y, E or F at ``x``."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.grid[0]) or np.any(x > self.grid[-1]):
            raise OutOfGridError(f"x outside [{self.grid[0]}, {self.grid[-1]}]")
        if name in ("E", "F"):
            return np.exp(self._spline("log" + name)(x))
        return self._spline(name)(x)

    def check_invariants(self) -> dict[str, bool]:
        """The sign and monotonicity properties every solve must satisfy."""
        x, u, up = self.grid, self.u, self.u_prime
        yp = 1 + 2 * (2 * u**3 + x * u) + 4 * u * up
        w = (1 - self.y * self.v) * self.E
        return {
            "u<0": bool(np.all(u < 0)),
            "u'>0": bool(np.all(up > 0)),
            "y>0": bool(np.all(self.y > 0)),
            "y'>0": bool(np.all(yp > 0)),
            "v<0": bool(np.all(self.v < 0)),
            "v nondecreasing": bool(np.all(np.diff(self.v) >= -1e-14)),
            "E,F in (0,1]": bool(
                np.all((self.E > 0) & (self.E <= 1 + 1e-12) & (self.F > 0) & (self.F <= 1 + 1e-12))
            ),
            "(1-yv)E<=1": bool(np.all(w <= 1 + 1e-12)),
            "(1-yv)E nondecreasing": bool(np.all(np.diff(w) >= -1e-12)),
        }


def left_asymptote(x: float) -> float:
    """-sqrt(-x/2) (1 + 1/(8x^3) - 73/(128x^6)), the x -> -inf expansion."""
    return -math.sqrt(-x / 2.0) * (1.0 + 1.0 / (8.0 * x**3) - 73.0 / (128.0 * x**6))


def solve_hastings_mcleod(
    x_min: float = X_MIN, x_max: float = X_MAX, n: int = N_GRID, tol: float = 1e-13, max_iter: int = 50
) -> PainleveSolution:
    """Two-point BVP for the Hastings-McLeod solution.

    Numerov's fourth-order scheme on a uniform grid with Dirichlet data
    u(x_max) = -Ai(x_max) and the three-term left asymptote; the nonlinear
    tridiagonal system is solved by damped Newton.  Returns u and u' (the
    latter from the cumulative Simpson integral of u'' started at x_max).
    """
    if x_min > -8 or x_max < 6 or n < 500:
        raise ValueError("need x_min <= -8, x_max >= 6 and n >= 500")
    x = np.linspace(x_min, x_max, n + 1)
    h = x[1] - x[0]
    c = h * h / 12.0
    ai_r, aip_r = specfun.airy_ai_both(x_max)
    ua, ub = left_asymptote(x_min), -ai_r
    u = -np.sqrt(np.maximum(-x / 2.0, 0.0) + specfun.airy_ai(x) ** 2)
    u[0], u[-1] = ua, ub

    def resid(u):
        f = 2 * u**3 + x * u
        return u[2:] - 2 * u[1:-1] + u[:-2] - c * (f[2:] + 10 * f[1:-1] + f[:-2])

    r = resid(u)
    rn = np.max(np.abs(r))
    for _ in range(max_iter):
        if rn < tol:
            break
        fp = 6 * u**2 + x
        ab = np.zeros((3, n - 1))
        ab[0, 1:] = 1 - c * fp[2:-1]
        ab[1, :] = -2 - 10 * c * fp[1:-1]
        ab[2, :-1] = 1 - c * fp[1:-2]
        du = linalg.solve_banded((1, 1), ab, -r)
        step = 1.0
        while True:
            trial = u.copy()
            trial[1:-1] += step * du
            rt = resid(trial)
            rtn = np.max(np.abs(rt))
            if rtn < rn or step < 1e-4:
                break
            step *= 0.5
        u, r, rn = trial, rt, rtn
    else:
        raise NewtonError(f"Newton did not converge, residual {rn:.3e}")
    if rn >= tol:
        raise NewtonError(f"Newton did not converge, residual {rn:.3e}")
    upp = 2 * u**3 + x * u
    # u'(x) = u'(x_max) - int_x^{x_max} u''
    tail = integrate.cumulative_simpson(upp[::-1], dx=h, initial=0.0)[::-1]
    up = -aip_r - tail
    return PainleveSolution(x, u, up, residual=float(rn))


def _airy_tail_integral(X):
    # int_X^inf Ai; scipy's itairy is inaccurate for large X, so integrate
    val, _ = integrate.quad(specfun.airy_ai, X, X + 40.0, epsabs=1e-300, epsrel=1e-13, limit=200)
    return val


def _kernel_diag_tail(X):
    # int_X^inf K_Ai(s, s) ds = (2X^2 Ai^2 - 2X Ai'^2 - Ai Ai') / 3
    a, ap = specfun.airy_ai_both(X)
    return (2 * X * X * a * a - 2 * X * ap * ap - a * ap) / 3.0


def derived_quantities(sol: PainleveSolution) -> PainleveSolution:
    """Fill in v, y, E, F from u and u'.

    Tails beyond the grid use u ~ -Ai there.
    """
    x, u, up = sol.grid, sol.u, sol.u_prime
    h = x[1] - x[0]
    X = x[-1]
    v = u**4 + x * u**2 - up**2
    y = x + 2 * up + 2 * u**2
    int_u = integrate.cumulative_simpson(u[::-1], dx=h, initial=0.0)[::-1]
    int_u = int_u - _airy_tail_integral(X)
    int_v = integrate.cumulative_simpson(v[::-1], dx=h, initial=0.0)[::-1]
    int_v = int_v - _kernel_diag_tail(X)
    E = np.exp(0.5 * int_u)
    F = np.exp(0.5 * int_v)
    return PainleveSolution(x, u, up, v, y, E, F, sol.residual)


@lru_cache(maxsize=1)
def default_solution() -> PainleveSolution:
    """Solution on [-10, 8] with 4000 intervals, shared by the f_* helpers."""
    return derived_quantities(solve_hastings_mcleod())


def f_gue_p(r):
    """Tracy-Widom GUE CDF, F(r)^2."""
    return default_solution().at("F", r) ** 2


def f_goe_p(r):
    """Tracy-Widom GOE CDF in the standard scaling, F(r) E(r)."""
    sol = default_solution()
    return sol.at("F", r) * sol.at("E", r)


def f_br(r):
    """Baik-Rains CDF, (1 - y v) E^4 F^2."""
    sol = default_solution()
    return (1 - sol.at("y", r) * sol.at("v", r)) * sol.at("E", r) ** 4 * sol.at("F", r) ** 2


@dataclass(frozen=True)
class DistributionTable:
    """A CDF sampled on an increasing grid."""

    r_values: np.ndarray
    cdf_values: np.ndarray
    method: str
    name: str

    METHODS = ("painleve", "fredholm", "scattering", "empirical")

    def __post_init__(self):
        if self.method not in self.METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        r = np.asarray(self.r_values, dtype=float)
        c = np.asarray(self.cdf_values, dtype=float)
        if r.shape != c.shape:
            raise ValueError("r_values and cdf_values differ in shape")
        if np.any(np.diff(r) <= 0):
            raise ValueError("r_values must be strictly increasing")
        object.__setattr__(self, "r_values", r)
        object.__setattr__(self, "cdf_values", c)

    def is_valid_cdf(self, slack: float = 1e-9) -> bool:
        c = self.cdf_values
        return bool(np.all(c >= -slack) and np.all(c <= 1 + slack) and np.all(np.diff(c) >= -slack))

    def __call__(self, r):
        """Linear interpolation, 0 to the left and 1 to the right of the table."""
        return np.interp(r, self.r_values, self.cdf_values, left=0.0, right=1.0)


def tabulate(fn, r_values, method: str, name: str) -> DistributionTable:
    r = np.asarray(r_values, dtype=float)
    return DistributionTable(r, np.array([float(fn(v)) for v in r]), method, name)


def inequality_grid(lo: float = -6.0, hi: float = 4.0, step: float = 0.1) -> np.ndarray:
    return lo + step * np.arange(int(round((hi - lo) / step)) + 1)


def verification_checks(sol: PainleveSolution | None = None) -> list:
    """Solver invariants and the GOE/GUE/Baik-Rains inequalities on a 0.1 grid over [-6, 4]."""
    from .report import BoolCheck

    sol = sol or default_solution()
    out = [BoolCheck.of(f"invariant {k}", {}, ok) for k, ok in sol.check_invariants().items()]
    r = inequality_grid()
    F, E = sol.at("F", r), sol.at("E", r)
    y, v = sol.at("y", r), sol.at("v", r)
    gue, goe, br = F**2, F * E, (1 - y * v) * E**4 * F**2
    grid = {"rmin": -6.0, "rmax": 4.0, "step": 0.1}
    out.append(BoolCheck.of("F_BR < F_GOE", grid, bool(np.all(br < goe))))
    out.append(BoolCheck.of("F_GOE^4 < F_BR F_GUE", grid, bool(np.all(goe**4 < br * gue))))
    out.append(BoolCheck.of("(1 - yv)E <= 1", grid, bool(np.all((1 - y * v) * E <= 1 + 1e-12))))
    return out


TAIL_TARGETS = {"gue right": 4 / 3, "gue left": 1 / 12, "goe(4^{1/3}.) left": 1 / 6, "br right": 2 / 3}


def _tail_fit(r, log_tail, power):
    # log tail = -c |r|^power + b log|r| + const; returns c
    X = np.column_stack([np.abs(r) ** power, np.log(np.abs(r)), np.ones_like(r)])
    coef, *_ = np.linalg.lstsq(X, log_tail, rcond=None)
    return float(-coef[0])


def tail_exponents(sol: PainleveSolution | None = None) -> dict[str, float]:
    """Leading tail constants by log-tail regression.

    Right tails use log(1 - F) against r^{3/2} on [2, 6]; left tails use
    log F against |r|^3 on [-9, -4].  1 - F is formed with expm1 so that
    the right tails keep their relative accuracy.
    """
    sol = sol or default_solution()
    log_f, log_e = sol._spline("logF"), sol._spline("logE")
    right = np.linspace(2.0, 6.0, 41)
    left = np.linspace(-9.0, -4.0, 51)
    br = (1 - sol.at("y", right) * sol.at("v", right)) * np.exp(4 * log_e(right) + 2 * log_f(right))
    return {
        "gue right": _tail_fit(right, np.log(-np.expm1(2 * log_f(right))), 1.5),
        "gue left": _tail_fit(left, 2 * log_f(left), 3.0),
        "goe(4^{1/3}.) left": _tail_fit(left / 4 ** (1 / 3), log_f(left) + log_e(left), 3.0),
        "br right": _tail_fit(right, np.log1p(-br), 1.5),
    }
