"""Geometric last-passage percolation with boundary sources.

Weights on {0..N}^2: w(0,0) = 0, bulk w(i,j) ~ Geom(q) for i,j >= 1, the
row j = 0 (i >= 1) ~ Geom(alpha_plus sqrt q) and the column i = 0 (j >= 1)
~ Geom(alpha_minus sqrt q), where Geom(p) has P(k) = (1-p) p^k.  L is the
maximal weight of an up-right path from (0,0) to (N,N).  Rescaled as
(L - c1 N)/(c2 N^{1/3}) it converges to F_GUE when both alphas are below 1,
to F_GOE^2 when exactly one equals 1 and to Baik-Rains when both do.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import integrate, optimize

from . import painleve
from .barrier import EmpiricalCdf, thread_count

BLOCK = 64


@dataclass(frozen=True)
class Profile:
    """Penalty kappa c2 |k|^a on the start point k of a point-to-curve passage."""

    exponent: float
    amplitude: float
    sign: float = 1.0


@dataclass(frozen=True)
class LppConfig:
    q: float
    alpha_minus: float = 0.0
    alpha_plus: float = 0.0
    N: int = 200
    n_samples: int = 2000
    seed: int = 0
    profile: Profile | None = None

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")
        for a in (self.alpha_minus, self.alpha_plus):
            if not 0 <= a <= 1 or a * math.sqrt(self.q) >= 1:
                raise ValueError("boundary alphas must lie in [0, 1] with alpha sqrt(q) < 1")
        if self.N < 1 or self.n_samples < 1:
            raise ValueError("N and n_samples must be positive")

    @property
    def target(self) -> str:
        ones = (self.alpha_minus == 1.0) + (self.alpha_plus == 1.0)
        return ("gue", "goe2", "br")[ones]


@dataclass(frozen=True)
class LppSample:
    values: np.ndarray
    config: LppConfig


@dataclass(frozen=True)
class ScalingFit:
    c1: float
    c2: float
    r2: float
    residuals: np.ndarray
    N_list: tuple
    means: np.ndarray
    shift: float = field(default=0.0)  # constant term of the mean fit
    c1_stderr: float = math.nan


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True)
def _geom(gen, log_p):
    # inversion: floor(log U / log p), U uniform on (0, 1]
    if log_p == -np.inf:
        return 0
    u = 1.0 - gen.random()
    return int(math.floor(math.log(u) / log_p))


@numba.njit(cache=True)
def draw_weights_into(gen, w, q, am, ap):
    """Fill the (N+1)x(N+1) array ``w`` row by row (index i, then j)."""
    n1 = w.shape[0]
    lq = math.log(q)
    lp = math.log(ap * math.sqrt(q)) if ap > 0 else -np.inf
    lm = math.log(am * math.sqrt(q)) if am > 0 else -np.inf
    for i in range(n1):
        for j in range(n1):
            if i == 0 and j == 0:
                w[i, j] = 0
            elif j == 0:
                w[i, j] = _geom(gen, lp)
            elif i == 0:
                w[i, j] = _geom(gen, lm)
            else:
                w[i, j] = _geom(gen, lq)


@numba.njit(cache=True)
def lpp_from_weights(w):
    """max over up-right paths (0,0) -> (N,N) of the summed weights, one rolling row."""
    n1 = w.shape[0]
    row = np.zeros(n1, dtype=np.int64)
    for i in range(n1):
        for j in range(n1):
            best = 0
            if i > 0 and j > 0:
                best = max(row[j], row[j - 1])
            elif i > 0:
                best = row[j]
            elif j > 0:
                best = row[j - 1]
            row[j] = best + w[i, j]
    return row[n1 - 1]


@numba.njit(nogil=True, cache=True)
def _lpp_block(gen, n, N, q, am, ap):
    out = np.empty(n, dtype=np.int64)
    w = np.empty((N + 1, N + 1), dtype=np.int64)
    for s in range(n):
        draw_weights_into(gen, w, q, am, ap)
        out[s] = lpp_from_weights(w)
    return out


@numba.njit(nogil=True, cache=True)
def _line_block(gen, n, N, K, q, pen):
    # start points (k, -k), |k| <= K, on an extended lattice; cell (i, j)
    # is stored at (i + K, j + K) and is live when i + j >= 0; the end cell
    # is (N - 1, N - 1) so that k = 0 crosses the same N x N block as L
    out = np.empty(n)
    m = N + K
    lq = math.log(q)
    row = np.empty(m)
    for s in range(n):
        for a in range(m):
            i = a - K
            for b in range(m):
                j = b - K
                if i + j < 0:
                    row[b] = -np.inf
                    continue
                wv = _geom(gen, lq)
                if i + j == 0:
                    row[b] = wv - pen[a]
                else:
                    up = row[b] if a > 0 else -np.inf
                    left = row[b - 1] if b > 0 else -np.inf
                    row[b] = wv + max(up, left)
        out[s] = row[m - 1]
    return out


def _generators(seed, n_blocks):
    ss = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(c)) for c in ss.spawn(n_blocks)]


def _run_blocks(job, sizes):
    workers = min(thread_count(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(job, range(len(sizes))))
    return [job(i) for i in range(len(sizes))]


def sample_lpp(config: LppConfig, rng: np.random.Generator) -> int:
    """One draw of L using the generator ``rng``."""
    return int(_lpp_block(rng, 1, config.N, config.q, config.alpha_minus, config.alpha_plus)[0])


def dequantize(values, seed: int) -> np.ndarray:
    """values + U with U uniform on [0, 1), from a substream reserved for this.

    L is integer valued; the jitter turns its CDF into the piecewise linear
    interpolation of the lattice CDF, so quantiles and KS distances against
    continuous laws are not dominated by the lattice step.
    """
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), 0x6A17])))
    return np.asarray(values, dtype=float) + gen.random(len(values))


def sample_many(config: LppConfig) -> LppSample:
    """``n_samples`` draws in blocks of 64, each block on its own Philox substream."""
    sizes = [min(BLOCK, config.n_samples - i) for i in range(0, config.n_samples, BLOCK)]
    gens = _generators(config.seed, len(sizes))

    def job(i):
        return _lpp_block(gens[i], sizes[i], config.N, config.q, config.alpha_minus, config.alpha_plus)

    return LppSample(np.concatenate(_run_blocks(job, sizes)), config)


# ---------------------------------------------------------------------------
# scaling and comparison with the limit laws


def _quantile(cdf, p, lo=-8.0, hi=6.0):
    return optimize.brentq(lambda r: float(cdf(r)) - p, lo, hi, xtol=1e-12)


def gue_iqr() -> float:
    return _quantile(painleve.f_gue_p, 0.75) - _quantile(painleve.f_gue_p, 0.25)


@functools.lru_cache(maxsize=None)
def _gue_moments() -> tuple[float, float]:
    # E r = int_0 (1 - F) - int^0 F, E r^2 likewise with weight 2r
    F = lambda r: float(painleve.f_gue_p(r))
    lo, hi = -9.5, 7.5
    m1 = integrate.quad(lambda r: 1 - F(r), 0, hi, limit=200)[0] - integrate.quad(F, lo, 0, limit=200)[0]
    m2 = integrate.quad(lambda r: 2 * r * (1 - F(r)), 0, hi, limit=200)[0] - integrate.quad(lambda r: 2 * r * F(r), lo, 0, limit=200)[0]
    return m1, m2


def gue_mean() -> float:
    return _gue_moments()[0]


def gue_std() -> float:
    m1, m2 = _gue_moments()
    return math.sqrt(m2 - m1 * m1)


def estimate_scaling(q: float, N_list, samples_per_N: int, seed: int = 0) -> ScalingFit:
    """c1 and c2 from point-to-point samples.

    c2 matches the standard deviation at the largest N to that of F_GUE
    (the IQR is about 1.5 times noisier at a few thousand samples).  The
    sample means are then fit by weighted least squares to
    mean(L) = c1 N + c2 mu_GUE N^{1/3} + d, with the N^{1/3} coefficient
    pinned by the known limit mean; leaving it free biases c1 low by about
    2e-3 relative at these sizes, enough to shift the rescaled law by 0.1.
    """
    N_list = tuple(sorted(int(n) for n in N_list))
    if len(N_list) < 2 or N_list[-1] < 2 * N_list[0]:
        raise ValueError("N_list must contain at least two sizes spanning a factor >= 2")
    ss = np.random.SeedSequence(seed)
    seeds = ss.generate_state(len(N_list))
    samples = [sample_many(LppConfig(q, 0.0, 0.0, n, samples_per_N, int(sd))).values for n, sd in zip(N_list, seeds)]
    big = dequantize(samples[-1], int(seeds[-1]))
    c2 = big.std(ddof=1) / (gue_std() * N_list[-1] ** (1.0 / 3.0))
    means = np.array([s.mean() for s in samples])
    sem = np.array([s.std(ddof=1) / math.sqrt(len(s)) for s in samples])
    Ns = np.array(N_list, dtype=float)
    pinned = means - c2 * gue_mean() * np.cbrt(Ns)
    X = np.column_stack([Ns, np.ones_like(Ns)])
    # weighted by the standard errors of the means
    Xw = X / sem[:, None]
    coef, *_ = np.linalg.lstsq(Xw, pinned / sem, rcond=None)
    cov = np.linalg.inv(Xw.T @ Xw)
    resid = pinned - X @ coef
    r2 = 1.0 - np.sum(resid**2) / np.sum((means - means.mean()) ** 2)
    if not (coef[0] > 0 and c2 > 0):
        raise ValueError(f"degenerate fit c1={coef[0]}, c2={c2}")
    return ScalingFit(float(coef[0]), float(c2), float(r2), resid, N_list, means, float(coef[1]), float(math.sqrt(cov[0, 0])))


def _clamped(fn, lo=-9.5, hi=7.5):
    def f(r):
        r = np.asarray(r, dtype=float)
        inside = np.clip(r, lo, hi)
        v = np.asarray(fn(inside), dtype=float)
        return np.where(r < lo, 0.0, np.where(r > hi, 1.0, v))

    return f


TARGETS = {
    "gue": _clamped(painleve.f_gue_p),
    "goe2": _clamped(lambda r: painleve.f_goe_p(r) ** 2),
    "br": _clamped(painleve.f_br),
}


def rescale(values, N: int, fit: ScalingFit) -> np.ndarray:
    return (np.asarray(values, dtype=float) - fit.c1 * N) / (fit.c2 * N ** (1.0 / 3.0))


def empirical_rescaled_cdf(config: LppConfig, fit: ScalingFit, target: str | None = None):
    """Rescaled empirical CDF and its KS distance to the limit law of the config."""
    target = target or config.target
    sample = sample_many(config)
    ecdf = EmpiricalCdf(rescale(dequantize(sample.values, config.seed), config.N, fit))
    return ecdf, ecdf.ks_distance(TARGETS[target])


# ---------------------------------------------------------------------------
# dominance experiment


def limiting_dominance(r_values=(-2.0, 0.0, 2.0)) -> list[dict]:
    """F_GOE(r)^4 < F_BR(r) F_GUE(r), the N -> infinity content of the experiment."""
    out = []
    for r in r_values:
        lhs = float(painleve.f_goe_p(r)) ** 4
        rhs = float(painleve.f_br(r) * painleve.f_gue_p(r))
        out.append({"r": r, "goe4": lhs, "br_gue": rhs, "pass": lhs < rhs})
    return out


def dominance_experiment(q: float, N: int, n_samples: int, seed: int = 0, seed2: int | None = None, grid_points: int = 41) -> dict:
    """Compare max{L_(1,0), L_(0,1)} with max{L_(0,0), L_(1,1)} at finite N.

    L^1 and L^2 come from disjoint substreams; passing the same value for
    ``seed`` and ``seed2`` is rejected.  The report says whether the first
    empirical CDF lies below the second on the grid; that finite-N ordering
    is an open question and is reported, not asserted.
    """
    if seed2 is not None and seed2 == seed:
        raise ValueError("the two weight arrays need different seeds")
    if seed2 is None:
        s1, s2 = (int(x) for x in np.random.SeedSequence(seed).generate_state(2))
    else:
        s1, s2 = int(seed), int(seed2)
    sub1 = np.random.SeedSequence(s1).generate_state(2)
    sub2 = np.random.SeedSequence(s2).generate_state(2)

    def draw(am, ap, sd):
        return sample_many(LppConfig(q, am, ap, N, n_samples, int(sd))).values

    a = np.maximum(draw(1.0, 0.0, sub1[0]), draw(0.0, 1.0, sub2[0]))
    b = np.maximum(draw(0.0, 0.0, sub1[1]), draw(1.0, 1.0, sub2[1]))
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    grid = np.linspace(lo, hi, grid_points)
    ea, eb = EmpiricalCdf(a), EmpiricalCdf(b)
    fa, fb = ea(grid), eb(grid)
    limit = limiting_dominance()
    return {
        "config": {"q": q, "N": N, "n_samples": n_samples, "seed": seed, "seed2": seed2},
        "grid": grid.tolist(),
        "cdf_max_10_01": fa.tolist(),
        "cdf_max_00_11": fb.tolist(),
        "finite_n_dominance": bool(np.all(fa <= fb)),
        "max_violation": float(np.max(fa - fb)),
        "limiting_check": limit,
        "pass": all(x["pass"] for x in limit),
    }


# ---------------------------------------------------------------------------
# point-to-curve profiles


def profile_penalty(N: int, K: int, profile: Profile, fit: ScalingFit) -> np.ndarray:
    """Penalty sign * kappa * c2 * |k|^a at start point k = -K..K, in lattice units.

    In the KPZ scaling k = u N^{2/3} this is kappa c2 N^{1/3} |u|^a N^{(2a-1)/3}:
    it blows up for a > 1/2 (curved), vanishes for a < 1/2 (flat) and at
    a = 1/2 is exactly kappa |u|^{1/2} in fluctuation units.  N only enters
    through that reading.
    """
    k = np.abs(np.arange(-K, K + 1, dtype=float))
    shape = k**profile.exponent if profile.exponent > 0 else np.ones_like(k)
    del N
    return profile.sign * profile.amplitude * fit.c2 * shape


def profile_lpp(config: LppConfig, fit: ScalingFit, K: int | None = None) -> EmpiricalCdf:
    """Point-to-curve passage times from the antidiagonal, rescaled like point-to-point.

    Maximises -penalty(k) + L((k, -k) -> (N, N)) over |k| <= K (default N)
    with bulk weights Geom(q) everywhere.
    """
    if config.profile is None:
        raise ValueError("config has no profile")
    K = config.N if K is None else int(K)
    pen = profile_penalty(config.N, K, config.profile, fit)
    # penalty array indexed by the row a = i + K of the start cell (i, -i)
    sizes = [min(BLOCK, config.n_samples - i) for i in range(0, config.n_samples, BLOCK)]
    gens = _generators(config.seed, len(sizes))

    def job(i):
        return _line_block(gens[i], sizes[i], config.N, K, config.q, pen)

    values = dequantize(np.concatenate(_run_blocks(job, sizes)), config.seed)
    return EmpiricalCdf(rescale(values, config.N, fit))


def affine_ks(ecdf: EmpiricalCdf, cdf) -> tuple[float, float, float]:
    """Smallest KS distance to cdf((x - loc)/scale) over loc and scale, with the fit."""
    x = ecdf.sorted_samples

    def ks(p):
        loc, log_scale = p
        e = EmpiricalCdf((x - loc) / math.exp(log_scale))
        return e.ks_distance(cdf)

    q25, q75 = np.percentile(x, [25, 75])
    c25, c75 = _quantile(cdf, 0.25), _quantile(cdf, 0.75)
    s0 = (q75 - q25) / (c75 - c25)
    p0 = (q25 - s0 * c25, math.log(s0))
    res = optimize.minimize(ks, p0, method="Nelder-Mead", options={"xatol": 1e-4, "fatol": 1e-5})
    return float(res.fun), float(res.x[0]), float(math.exp(res.x[1]))


def goe_flat_cdf(r):
    """F_GOE(4^{1/3} r), the flat-line law in the point-to-point scaling."""
    return _clamped(painleve.f_goe_p)(4 ** (1.0 / 3.0) * np.asarray(r, dtype=float))
