import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from kpzlab import barrier as B


# ---------------------------------------------------------------- closed forms


def test_rho_const_translation_and_mass():
    assert B.rho_const(-1.0, 1.0, 0.7) == pytest.approx(B.rho_const(0.0, 2.0, 0.7), rel=1e-15)
    mass, _ = integrate.quad(lambda t: B.rho_const(0.0, 1.0, t), 0, 200, limit=500, points=[0.1, 1, 10])
    assert abs(mass - 1) <= 1e-3 + math.erfc(1 / (2 * math.sqrt(200)))
    part, _ = integrate.quad(lambda t: B.rho_const(0.0, 1.0, t), 0, 2, epsabs=1e-13)
    assert abs(part - math.erfc(1 / (2 * math.sqrt(2)))) <= 1e-6


@given(st.floats(0.05, 3), st.floats(0.01, 10))
def test_cdf_const_is_integral_of_density(d, t):
    val, _ = integrate.quad(lambda s: B.rho_const(0.0, d, s), 0, t, epsabs=1e-12, limit=200)
    assert B.cdf_const(0.0, d, t) == pytest.approx(val, abs=1e-9)


def test_rho_const_rejects_start_above():
    with pytest.raises(ValueError):
        B.rho_const(1.0, 0.0, 1.0)


def test_rho_linear():
    assert B.rho_linear(0.0, 1.0, 0.0, 0.5) == pytest.approx(B.rho_const(0.0, 1.0, 0.5), rel=1e-15)
    mass, _ = integrate.quad(lambda t: B.rho_linear(0.0, 1.0, 1.0, t), 0, 500, limit=500, points=[0.1, 1, 10])
    assert mass <= 1.0
    # escape probability for drift away: P(hit) = e^{-d s} for diffusion 2
    assert mass == pytest.approx(math.exp(-1.0), abs=1e-6)


@given(st.floats(0.1, 3), st.floats(-2, 2), st.floats(0.05, 8))
def test_cdf_linear_is_integral_of_density(d, s, t):
    val, _ = integrate.quad(lambda u: B.rho_linear(0.0, d, s, u), 0, t, epsabs=1e-12, limit=200)
    assert B.cdf_linear(0.0, d, s, t) == pytest.approx(val, abs=1e-8)


# ---------------------------------------------------------------- sqrt series


def test_rho_sqrt_small_b_rate():
    # the b -> 0 limit is approached linearly in b; at b = 0.05 the gap on
    # [0.2, 5] is about 0.04, so the 0.02 level is only reached for b <~ 0.025
    t = np.linspace(0.2, 5, 241)
    ref = B.rho_const(-1.0, 0.0, t)
    gaps = [np.max(np.abs(B.rho_sqrt(-1.0, 0.0, b, t) - ref)) for b in (0.05, 0.01)]
    assert gaps[1] <= 0.02
    assert gaps[0] / gaps[1] == pytest.approx(5.0, rel=0.1)


def test_rho_sqrt_series_truncation():
    assert abs(B.rho_sqrt(-1.0, 0.0, 1.0, 1.0, 30) - B.rho_sqrt(-1.0, 0.0, 1.0, 1.0, 60)) < 1e-8


def test_sqrt_series_vs_volterra():
    t = np.linspace(0.05, 5, 100)
    sol = B.first_passage_volterra(B.Sqrt(0.0, 1.0), np.array([-1.0, -0.3]), horizon=5.0)
    for i, y in enumerate((-1.0, -0.3)):
        assert np.max(np.abs(np.interp(t, sol.t, sol.cdf[i]) - B.cdf_sqrt(y, 0.0, 1.0, t))) < 5e-5


def test_cdf_sqrt_bounded_by_constant_barrier():
    t = np.geomspace(1e-4, 10, 50)
    c = B.cdf_sqrt(-0.5, 0.0, 2.0, t)
    assert np.all(c <= B.cdf_const(-0.5, 0.0, t) + 1e-15)
    assert np.all(np.diff(c) >= -1e-11)


# ---------------------------------------------------------------- parabola series


def test_rho_parbl_small_beta():
    t = np.linspace(0.2, 5, 241)
    gap = np.max(np.abs(B.rho_parbl(-1.0, 0.0, 0.05, t) - B.rho_const(-1.0, 0.0, t)))
    assert gap <= 0.02


def test_rho_parbl_truncation():
    # the k-th term is damped by e^{beta^{2/3} a_k t}; with 20 terms that is ~1e-9
    d = abs(B.rho_parbl(-1.0, 0.0, 1.0, 1.0, 20) - B.rho_parbl(-1.0, 0.0, 1.0, 1.0, 40))
    assert d < 1e-9
    assert abs(B.rho_parbl(-1.0, 0.0, 1.0, 1.0, 40) - B.rho_parbl(-1.0, 0.0, 1.0, 1.0, 80)) < 1e-15


def test_rho_parbl_series_vs_contour():
    for t in (0.3, 1.0, 3.0):
        assert B.rho_parbl(-1.0, 0.0, 1.0, t) == pytest.approx(B.rho_parbl_contour(-1.0, 0.0, 1.0, t), abs=1e-8)


def test_rho_parbl_mass_vs_mc():
    x = np.concatenate([np.geomspace(0.1, 1, 200), np.linspace(1, 50, 2000)[1:]])
    sol = B.first_passage_volterra(B.Parabola(0.0, 1.0), np.array([-1.0]), horizon=1.0)
    mass = integrate.simpson(B.rho_parbl(-1.0, 0.0, 1.0, x), x=x) + np.interp(0.1, sol.t, sol.cdf[0])
    assert mass < 1
    n = 20000
    mc = B.mc_first_passage(B.Parabola(0.0, 1.0), -1.0, horizon=50.0, n_paths=n, step=1e-2, seed=3)
    se = math.sqrt(mc.hit_fraction * (1 - mc.hit_fraction) / n)
    assert abs(mass - mc.hit_fraction) <= 3 * se


# ---------------------------------------------------------------- Volterra


def test_volterra_linear_matches_closed_form():
    t = np.linspace(0.01, 4, 50)
    sol = B.first_passage_volterra(B.Linear(0.0, 0.7), np.array([-0.5, -2.0]), horizon=4.0)
    for i, y in enumerate((-0.5, -2.0)):
        assert np.max(np.abs(np.interp(t, sol.t, sol.cdf[i]) - B.cdf_linear(y, 0.0, 0.7, t))) < 1e-5


def test_volterra_start_next_to_barrier():
    sol = B.first_passage_volterra(B.Parabola(0.0, 1.0), np.array([-1e-4]), horizon=6.0)
    c = sol.cdf[0]
    assert np.all(np.diff(c) >= -1e-12)
    assert c[-1] > 0.999


def test_general_branch_matches_builtin():
    sq = B.Sqrt(0.0, 1.0)
    gen = B.General(sq.value, sq.slope, (), "sqrt")
    a = B.first_passage_volterra(sq, np.array([-0.8]), horizon=3.0)
    b = B.first_passage_volterra(gen, np.array([-0.8]), horizon=3.0)
    assert np.max(np.abs(a.cdf - b.cdf)) < 1e-12


# ---------------------------------------------------------------- Barrier


def test_barrier_evaluation_and_resplit():
    g = B.Barrier(0.0, B.Sqrt(0.0, 1.0), B.Parabola(0.0, 0.5))
    x = np.linspace(-3, 3, 13)
    want = np.where(x >= 0, 0.5 * x * x, np.sqrt(np.abs(x)))
    assert np.allclose(g(x), want, atol=1e-15)
    h = g.resplit(0.7)
    assert h.split == 0.7
    assert np.allclose(h(x), want, atol=1e-15)
    assert np.allclose(g.shifted(1.5)(x), want + 1.5)
    assert g.value_at_split == 0.0


def test_narrow_wedge_needs_point():
    with pytest.raises(ValueError):
        B.Barrier(0.0, B.Infinite(), B.Infinite())
    nw = B.Barrier(0.0, B.Infinite(), B.Infinite(), point=0.3)
    assert nw.narrow_wedge and nw.value_at_split == 0.3
    with pytest.raises(ValueError):
        nw.resplit(1.0)


# ---------------------------------------------------------------- Monte Carlo


def test_mc_constant_barrier_at_t2():
    n = 100_000
    s = B.mc_first_passage(B.Constant(0.0), -1.0, horizon=2.0, n_paths=n, seed=11)
    assert abs(s.cdf(2.0) - math.erfc(1 / (2 * math.sqrt(2)))) <= 3 / math.sqrt(n)


def test_mc_linear_ks():
    s = B.mc_first_passage(B.Linear(0.0, 0.5), -1.0, horizon=5.0, n_paths=100_000, seed=2)
    assert s.cdf.ks_distance(lambda t: B.cdf_linear(-1.0, 0.0, 0.5, t)) <= 0.01


def test_mc_sqrt_ks_horizon_10():
    s = B.mc_first_passage(B.Sqrt(0.0, 1.0), -1.0, horizon=10.0, n_paths=100_000, seed=4)
    assert s.cdf.ks_distance(lambda t: B.cdf_sqrt(-1.0, 0.0, 1.0, t)) <= 0.015


def test_mc_start_at_barrier():
    medians = []
    for step in (1e-2, 1e-3):
        s = B.mc_first_passage(B.Constant(0.0), -1e-9, horizon=1.0, n_paths=2000, step=step, seed=5)
        assert s.hit_fraction == 1.0
        medians.append(np.median(s.cdf.sorted_samples))
    assert medians[1] < medians[0] <= 1e-2


def test_mc_deterministic_across_threads(monkeypatch):
    runs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("KPZLAB_THREADS", threads)
        s = B.mc_first_passage(B.Sqrt(0.0, 1.0), -1.0, horizon=1.0, n_paths=5000, seed=9, block=700)
        runs.append(s.cdf.sorted_samples)
    assert np.array_equal(runs[0], runs[1])


def test_mc_rejects_start_above():
    with pytest.raises(ValueError):
        B.mc_first_passage(B.Constant(0.0), 0.5)


# ---------------------------------------------------------------- EmpiricalCdf


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=40))
def test_ks_distance_brute_force(xs):
    from scipy.special import ndtr

    e = B.EmpiricalCdf(np.array(xs))
    s = np.sort(xs)
    brute = max(max(abs((i + 1) / len(s) - ndtr(v)), abs(i / len(s) - ndtr(v))) for i, v in enumerate(s))
    assert e.ks_distance(ndtr) == pytest.approx(brute, abs=1e-15)


def test_empirical_cdf_with_censoring():
    e = B.EmpiricalCdf(np.array([0.3, 0.1]), n=4)
    assert e(0.2) == 0.25 and e(1.0) == 0.5


def test_oracle_checks_pass():
    assert all(c.passed for c in B.oracle_checks(n_paths=20_000))
