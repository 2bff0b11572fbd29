"""Brownian scattering operator and continuum-statistics determinants.

For a barrier g split at a the probability that the Airy_2 process stays
below g(x) + x^2 for all x is det(I - G) on L^2(-L, 0] in the
Airy-transform variable l, with

    G(l1, l2) = K_Ai(g(a) + a^2 - l1, g(a) + a^2 - l2)
                + int_{y < g(a)} [ A-(l1,y) Phi+(l2,y) + Phi-(l1,y) A+(l2,y)
                                   - Phi-(l1,y) Phi+(l2,y) ] dy,

    A-(l, y) = e^{ a y} Ai(y - l + a^2),   A+(l, y) = e^{-a y} Ai(y - l + a^2),
    Phi+(l, y) = E_y[ Q+(tau) ],  tau the first passage of B(0) = y to t -> g(a + t),
    Q+(t) = exp(-2a^2 t - 2a t^2 - 2t^3/3 - (a + t) g(a + t) + t l) Ai(g(a + t) - l + (a + t)^2),

and Phi-, Q- the same with a -> -a and g(a - t).  The K_Ai term is what is
left of int_{y < g(a)} A- A+ after the identity is split off, so no term
has an oscillating tail.  Phi is evaluated as -int_0^T F_y(t) Q'(t) dt with
F_y the first-passage CDF, which stays smooth when y is close to the
barrier and the density is a spike.

Psi = A - Phi is the scattering kernel of each side and
S(l1, l2) = int Psi-(l1, y) Psi+(l2, y) dy = delta - G; the reported s_g is
the off-identity part -G conjugated by e^{a l}, which does not depend on
the split a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import interpolate

from . import airydist, barrier as bar, quad, specfun
from .report import Check, dumps_report, suite_report  # noqa: F401


@dataclass(frozen=True)
class ScatteringConfig:
    n_lambda: int = 100
    L_lambda: float = 12.0
    n_y: int = 120
    L_y: float = 14.0
    n_t_small: int = 60
    n_t_large: int = 40
    T: float = 6.0
    volterra_n: int = 800
    sqrt_terms: int = 50

    def __post_init__(self):
        if self.L_lambda < 10 or self.L_y < 10 or self.T < 6:
            raise ValueError("need L_lambda >= 10, L_y >= 10 and T >= 6")

    def lambda_rule(self) -> quad.QuadratureRule:
        return quad.gauss_legendre(self.n_lambda, -self.L_lambda, 0.0)

    def y_rule(self, top: float) -> quad.QuadratureRule:
        return quad.gauss_legendre(self.n_y, top - self.L_y, top)


DEFAULT = ScatteringConfig()


# ---------------------------------------------------------------------------
# t quadrature


def t_rule(config: ScatteringConfig = DEFAULT, kinks=()) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on (0, T]: t = s^2 on (0, 1], Gauss-Legendre on [1, T].

    Each kink k of the barrier gets square-root graded panels on both
    sides, since g' may blow up like |t - k|^{-1/2} there.
    """
    T = config.T
    ks = sorted(k for k in kinks if 0 < k < T)
    if not ks:
        s = quad.gauss_legendre(config.n_t_small, 0.0, 1.0)
        big = quad.gauss_legendre(config.n_t_large, 1.0, T)
        return np.concatenate([s.nodes**2, big.nodes]), np.concatenate([2 * s.nodes * s.weights, big.weights])
    # graded panels around each kink, square-root panel at 0, plain GL elsewhere
    deltas = [min(0.5, k / 2, (T - k) / 2) for k in ks]
    plain = []
    ts, ws = [], []
    start = min(1.0, ks[0] - deltas[0])
    s = quad.gauss_legendre(config.n_t_small, 0.0, math.sqrt(start))
    ts.append(s.nodes**2)
    ws.append(2 * s.nodes * s.weights)
    cursor = start
    for k, d in zip(ks, deltas):
        if k - d > cursor:
            plain.append((cursor, k - d))
        u = quad.gauss_legendre(config.n_t_small // 2 + 10, 0.0, math.sqrt(d))
        ts += [k - u.nodes**2, k + u.nodes**2]
        ws += [2 * u.nodes * u.weights] * 2
        cursor = k + d
    if cursor < T:
        plain.append((cursor, T))
    density = config.n_t_large / (T - 1.0)
    for a, b in plain:
        g = quad.gauss_legendre(max(12, int(math.ceil(density * (b - a)))), a, b)
        ts.append(g.nodes)
        ws.append(g.weights)
    t = np.concatenate(ts)
    w = np.concatenate(ws)
    order = np.argsort(t)
    return t[order], w[order]


# ---------------------------------------------------------------------------
# first-passage CDFs on the (y, t) grid


def passage_cdf(branch: bar.Branch, y, t, config: ScatteringConfig = DEFAULT) -> np.ndarray:
    """F_y(t) = P_y(tau <= t) for every start y and time t, shape (len(y), len(t)).

    Closed forms for constant and linear branches, the Upsilon series for
    square-root branches with b <= 8, and the Volterra solver otherwise.
    """
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    if isinstance(branch, bar.Constant):
        return bar.cdf_const(y[:, None], branch.r, t[None, :])
    if isinstance(branch, bar.Linear):
        return bar.cdf_linear(y[:, None], branch.r, branch.s, t[None, :])
    if isinstance(branch, bar.Sqrt) and branch.b <= bar.SQRT_SERIES_BMAX:
        return bar.cdf_sqrt(y[:, None], branch.r, branch.b, t[None, :], config.sqrt_terms)
    sol = bar.first_passage_volterra(branch, y, horizon=config.T, n=config.volterra_n)
    # interpolate only the smooth difference to the tangent line at t = 0;
    # for y just below the barrier the CDF itself jumps before the first node
    slope0 = float(branch.slope(np.array([0.0]))[0])
    slope0 = slope0 if np.isfinite(slope0) else 0.0

    def tangent(tt):
        return bar.cdf_linear(y[:, None], branch.level, slope0, np.asarray(tt)[None, :])

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        f = interpolate.PchipInterpolator(np.sqrt(sol.t), sol.cdf - tangent(sol.t), axis=1, extrapolate=True)
        return np.clip(f(np.sqrt(t)) + tangent(t), 0.0, 1.0)


# ---------------------------------------------------------------------------
# kernel pieces


def _q_and_dq(branch: bar.Branch, a: float, lam, t):
    """Q(t) and dQ/dt on a (lambda, t) grid for the side with tilt ``a``."""
    lam = np.asarray(lam, dtype=float)[:, None]
    t = np.asarray(t, dtype=float)[None, :]
    g = branch.value(t)
    dg = branch.slope(t)
    at = a + t
    expo = -2 * a * a * t - 2 * a * t * t - 2 * t**3 / 3 - at * g + t * lam
    arg = g - lam + at * at
    ai, aip = specfun.airy_ai_both(arg)
    e = np.exp(expo)
    q = e * ai
    dexpo = -2 * a * a - 4 * a * t - 2 * t * t - g + lam
    dq = e * (dexpo * ai + 2 * at * aip + dg * (aip - at * ai))
    return q, dq


def hitting_correction(branch: bar.Branch, a: float, lam, y, config: ScatteringConfig = DEFAULT) -> np.ndarray:
    """Phi(l, y) = E_y[Q(tau)] for one side, shape (len(lam), len(y)).

    ``a`` is the tilt of that side: +alpha for the right branch, -alpha for
    the left one.  Infinite branches give 0.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not branch.finite:
        return np.zeros((len(lam), len(y)))
    t, w = t_rule(config, branch.kinks)
    F = passage_cdf(branch, y, t, config)
    _, dq = _q_and_dq(branch, a, lam, t)
    return -(dq * w[None, :]) @ F.T


def airy_factor(a: float, lam, y, sign: int) -> np.ndarray:
    """e^{sign a y} Ai(y - l + a^2), shape (len(lam), len(y))."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))[:, None]
    y = np.atleast_1d(np.asarray(y, dtype=float))[None, :]
    return np.exp(sign * a * y) * specfun.airy_ai(y - lam + a * a)


def psi(branch: bar.Branch, alpha: float, lam, y, config: ScatteringConfig = DEFAULT, side: str = "right"):
    """Psi(l, y) = A(l, y) - Phi(l, y) for one branch of a barrier split at alpha.

    side="right" uses the tilt +alpha (A+ = e^{-alpha y} Ai), side="left" the
    tilt -alpha (A- = e^{alpha y} Ai).  At alpha = 0 and an infinite branch
    this is Ai(y - l).
    """
    a = alpha if side == "right" else -alpha
    out = airy_factor(alpha, lam, y, -1 if side == "right" else 1) - hitting_correction(branch, a, lam, y, config)
    return out if out.size > 1 else float(out.ravel()[0])


@dataclass
class ScatteringKernel:
    """The assembled kernel G on the lambda grid and the pieces behind it."""

    barrier: bar.Barrier
    config: ScatteringConfig
    lam: np.ndarray
    lam_weights: np.ndarray
    G: np.ndarray

    def determinant(self) -> float:
        sw = np.sqrt(self.lam_weights)
        return quad.det_lu(np.eye(len(self.lam)) - sw[:, None] * self.G * sw[None, :])


def _assemble(barrier: bar.Barrier, lam1, lam2, config: ScatteringConfig) -> np.ndarray:
    alpha = barrier.split
    top = barrier.value_at_split
    shifted = top + alpha * alpha
    G = airydist.airy_kernel(shifted - np.asarray(lam1)[:, None], shifted - np.asarray(lam2)[None, :])
    if barrier.narrow_wedge:
        return np.asarray(G, dtype=float)
    yr = config.y_rule(top)
    y, wy = yr.nodes, yr.weights
    # branches keep their own one-sided values; a jump at the split is
    # absorbed because starts lie below the smaller of the two
    phi_minus = hitting_correction(barrier.left, -alpha, lam1, y, config)
    phi_plus = hitting_correction(barrier.right, alpha, lam2, y, config)
    a_minus = airy_factor(alpha, lam1, y, +1)
    a_plus = airy_factor(alpha, lam2, y, -1)
    G = G + (a_minus * wy) @ phi_plus.T + (phi_minus * wy) @ a_plus.T - (phi_minus * wy) @ phi_plus.T
    return G


def scattering_kernel(barrier: bar.Barrier, config: ScatteringConfig = DEFAULT) -> ScatteringKernel:
    """Assemble G on the configured lambda grid."""
    _check_growth(barrier)
    rule = config.lambda_rule()
    G = _assemble(barrier, rule.nodes, rule.nodes, config)
    return ScatteringKernel(barrier, config, rule.nodes, rule.weights, G)


def s_g(barrier: bar.Barrier, lam1, lam2, config: ScatteringConfig = DEFAULT) -> np.ndarray:
    """Off-identity part of the scattering operator at (lam1, lam2), split-independent.

    Equal to -e^{alpha (l2 - l1)} G(l1, l2); the conjugation undoes the
    tilt, so the value is the same for every description of the same g.
    """
    lam1 = np.atleast_1d(np.asarray(lam1, dtype=float))
    lam2 = np.atleast_1d(np.asarray(lam2, dtype=float))
    G = _assemble(barrier, lam1, lam2, config)
    a = barrier.split
    return -np.exp(a * (lam2[None, :] - lam1[:, None])) * G


def hitting_det(barrier: bar.Barrier, config: ScatteringConfig = DEFAULT) -> float:
    """P(A_2(x) <= g(x) + x^2 for all x), as det(I - G) on the lambda grid."""
    return float(np.clip(scattering_kernel(barrier, config).determinant(), 0.0, 1.0))


def _check_growth(barrier: bar.Barrier):
    # every branch kind here grows at least like -kappa t^2 with kappa = 0
    for b in (barrier.left, barrier.right):
        if isinstance(b, bar.Parabola) and b.beta <= -0.75:
            raise ValueError("barrier decays faster than -(3/4) x^2")


def narrow_wedge_barrier(r: float) -> bar.Barrier:
    """g = r at 0 and +inf elsewhere; its determinant is F_GUE(r)."""
    return bar.Barrier(0.0, bar.Infinite(), bar.Infinite(), point=r)


def flat_barrier(r: float) -> bar.Barrier:
    """g = r everywhere; its determinant is F_GOE(4^{1/3} r)."""
    return bar.Barrier(0.0, bar.Constant(r), bar.Constant(r))


def half_flat_barrier(alpha: float, r: float) -> bar.Barrier:
    """Flat left of alpha, +inf right of it, leveled so the determinant is F^alpha_{curved->flat}(r)."""
    return bar.Barrier(alpha, bar.Constant(r - min(0.0, alpha) ** 2), bar.Infinite())


def sqrt_barrier(alpha: float, b1: float, b2: float, r: float) -> bar.Barrier:
    """g(x) = r + b1 sqrt(alpha - x) left of alpha, r + b2 sqrt(x - alpha) right of it."""
    return bar.Barrier(alpha, bar.Sqrt(r, b1), bar.Sqrt(r, b2))


def parabola_barrier(beta1: float, beta2: float, r: float) -> bar.Barrier:
    """g(x) = r + beta1 x^2 for x < 0 and r + beta2 x^2 for x > 0."""
    return bar.Barrier(0.0, bar.Parabola(r, beta1), bar.Parabola(r, beta2))


def f_sqrt(alpha: float, b1: float, b2: float, r: float, config: ScatteringConfig = DEFAULT) -> float:
    """F_sqrt^{alpha,b1,b2}(r): the square-root barrier with vertex at alpha."""
    return hitting_det(sqrt_barrier(alpha, b1, b2, r), config)


def f_parbl(beta1: float, beta2: float, r: float, config: ScatteringConfig = DEFAULT) -> float:
    """F_parbl^{beta1,beta2}(r): the barrier r + beta_i x^2 on either side of 0."""
    return hitting_det(parabola_barrier(beta1, beta2, r), config)


# ---------------------------------------------------------------------------
# identity checks


def tilted_airy(alpha: float, t: float, x):
    """phi^alpha_t(x) = e^{-2t^3/3 + 2 alpha t^2 - alpha^2 t + x(alpha - t)} Ai(x + t^2 - 2 alpha t)."""
    x = np.asarray(x, dtype=float)
    expo = -2 * t**3 / 3 + 2 * alpha * t * t - alpha * alpha * t + x * (alpha - t)
    return np.exp(expo) * specfun.airy_ai(x + t * t - 2 * alpha * t)


def heat_step(fn, s: float, x, n: int = 240, width: float = 12.0):
    """(e^{s Laplacian} fn)(x): Gaussian of variance 2s, truncated at +-width sqrt(s)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if s == 0:
        return fn(x)
    rule = quad.gauss_legendre(n, -width * math.sqrt(s), width * math.sqrt(s))
    z = x[:, None] + rule.nodes[None, :]
    kern = np.exp(-rule.nodes**2 / (4 * s)) / math.sqrt(4 * math.pi * s)
    return (fn(z) * kern[None, :]) @ rule.weights


def check_semigroup(alpha: float, t: float, s: float, x_grid) -> float:
    """max |e^{s Laplacian} phi_t - phi_{t-s}| over ``x_grid``."""
    if s < 0:
        raise ValueError("s must be >= 0")
    x = np.asarray(x_grid, dtype=float)
    lhs = heat_step(lambda z: tilted_airy(alpha, t, z), s, x)
    return float(np.max(np.abs(lhs - tilted_airy(alpha, t - s, x))))


def check_semigroup_composition(alpha: float, t: float, s: float, x_grid) -> float:
    """Two heat steps of s/2 against one of s, applied to phi_t."""
    x = np.asarray(x_grid, dtype=float)
    once = heat_step(lambda z: tilted_airy(alpha, t, z), s, x)
    half = heat_step(lambda z: heat_step(lambda w: tilted_airy(alpha, t, w), s / 2, z.ravel()).reshape(z.shape), s / 2, x)
    return float(np.max(np.abs(once - half)))


def check_reflection(x: float, y: float, alpha: float, beta: float, n: int = 200) -> float:
    """|int rho_0(t) e^{...} Ai(...) dt - closed form| for the level-0 barrier started at y < 0.

    LHS = int_0^inf rho(y, 0; t) e^{2u^3/3 + 2 alpha u^2 + alpha^2 u + u x} Ai(x + u^2 + 2 alpha u) dt, u = beta - t,
    RHS = e^{2 beta^3/3 + 2 alpha beta^2 + alpha^2 beta + beta x - (alpha + beta) y} Ai(x - y + beta^2 + 2 alpha beta).
    The t-integral is done by parts against the CDF erfc(-y / 2 sqrt t).
    """
    if y >= 0:
        raise ValueError("y must be negative")

    def dh(t):
        u = beta - t
        e = np.exp(2 * u**3 / 3 + 2 * alpha * u * u + alpha * alpha * u + u * x)
        ai, aip = specfun.airy_ai_both(x + u * u + 2 * alpha * u)
        # d/dt = -d/du
        return -e * ((2 * u * u + 4 * alpha * u + alpha * alpha + x) * ai + (2 * u + 2 * alpha) * aip)

    config = ScatteringConfig(n_t_small=n, n_t_large=n, T=max(8.0, beta + 8.0))
    t, w = t_rule(config)
    F = bar.cdf_const(y, 0.0, t)
    lhs = -np.sum(w * F * dh(t))
    rhs = math.exp(2 * beta**3 / 3 + 2 * alpha * beta**2 + alpha**2 * beta + beta * x - (alpha + beta) * y) * float(
        specfun.airy_ai(x - y + beta**2 + 2 * alpha * beta)
    )
    return float(abs(lhs - rhs))


def check_flat_psi(lam: float, y: float, r: float, config: ScatteringConfig = DEFAULT) -> float:
    """|Psi(l, y) - (Ai(y - l) - Ai(2r - y - l))| for the flat branch g = r at alpha = 0."""
    got = psi(bar.Constant(r), 0.0, lam, y, config)
    want = float(specfun.airy_ai(y - lam) - specfun.airy_ai(2 * r - y - lam))
    return float(abs(got - want))


def identity_suite(config: ScatteringConfig = DEFAULT) -> list[Check]:
    """Reflection, semigroup and flat-Psi checks with their tolerances."""
    out = []
    for x, y, a, b in [(0.5, -1.0, 0.0, 0.0), (0.2, -0.5, 0.3, 0.4), (-0.7, -2.0, -0.2, 0.3)]:
        out.append(Check("reflection", {"x": x, "y": y, "alpha": a, "beta": b}, check_reflection(x, y, a, b), 0.0, 1e-7))
    xg = np.linspace(-5, 5, 41)
    out.append(Check("semigroup", {"alpha": 0.0, "t": 1.0, "s": 0.5}, check_semigroup(0.0, 1.0, 0.5, xg), 0.0, 1e-6))
    out.append(
        Check("semigroup-composition", {"alpha": 0.0, "t": 1.0, "s": 0.5}, check_semigroup_composition(0.0, 1.0, 0.5, xg), 0.0, 1e-8)
    )
    for lam, y, r in [(-0.5, -1.0, 0.0), (-2.0, -0.3, 0.5), (-0.1, -3.0, -1.0)]:
        out.append(Check("flat-psi", {"lambda": lam, "y": y, "r": r}, check_flat_psi(lam, y, r, config), 0.0, 1e-7))
    return out
