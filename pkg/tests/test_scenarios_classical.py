import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modphi.engine import check_h2, check_h3_domination, local_limit
from modphi.fourier import Region, stable_constant
from modphi.scenarios import classical
from modphi.scenarios.classical import (
    cms_sample,
    cycles_charfn,
    cycles_pmf,
    gamma_shift_scenario,
    poisson_charfn,
    poisson_scenario,
    sample_cycle_counts,
    stable_scenario,
    winding_charfn,
    winding_envelope_constant,
    winding_scenario,
)

mpmath.mp.dps = 30


def _empirical_charfn(values: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.exp(1j * np.outer(t, values)).mean(axis=1)


# stable sums


def test_cauchy_closed_form():
    scn = stable_scenario(1.0, "cauchy", [10**3])
    rep = local_limit(scn, 10**3, Region.interval(-1, 1))
    assert rep.scaled_probability == pytest.approx(1e3 * 2 * math.atan(1e-3) / math.pi, rel=1e-12)
    assert rep.predicted_limit == pytest.approx(2 / math.pi, rel=1e-12)


def test_exact_stable_monte_carlo():
    scn = stable_scenario(1.5, "exact-stable", [10**4])
    rep = local_limit(scn, 10**4, Region.interval(0, 1), method="monte-carlo", samples=10**6, seed=11)
    assert abs(rep.scaled_probability - stable_constant(1.5)) <= 4 * rep.stderr


def test_exact_stable_probability_matches_inversion():
    scn = stable_scenario(1.5, "exact-stable", [100])
    exact = local_limit(scn, 100, Region.interval(-2, 3))
    analytic = local_limit(scn, 100, Region.interval(-2, 3), method="analytic")
    assert exact.scaled_probability == pytest.approx(analytic.scaled_probability, abs=1e-9)


def test_uniform_increments_close_to_gaussian_constant():
    scn = stable_scenario(2.0, "uniform-symmetric", [10**3])
    rep = local_limit(scn, 10**3, Region.interval(-0.5, 0.5), method="analytic")
    assert rep.scaled_probability == pytest.approx(stable_constant(2.0), rel=0.1)
    mc = local_limit(scn, 10**3, Region.interval(-0.5, 0.5), method="monte-carlo", samples=40_000, seed=2)
    assert abs(mc.scaled_probability - rep.scaled_probability) <= 4 * mc.stderr


def test_exact_stable_scaled_charfn_is_the_limit():
    t = np.linspace(-6, 6, 121)
    for p in (0.7, 1.0, 1.5, 2.0):
        scn = stable_scenario(p, "exact-stable", [10, 10**4])
        for n in scn.index_set:
            assert np.max(np.abs(scn.scaled_charfn(n, t) - np.exp(-np.abs(t) ** p))) <= 1e-14


def test_stable_reference_density_is_stable_constant():
    for p in (0.8, 1.3, 2.0):
        scn = stable_scenario(p, "exact-stable", [10])
        assert scn.reference.density_at(0.0) == pytest.approx(stable_constant(p), rel=1e-9)


def test_stable_validation():
    with pytest.raises(ValueError):
        stable_scenario(1.0, "bernoulli", [10])
    with pytest.raises(ValueError):
        stable_scenario(1.5, "cauchy", [10])
    with pytest.raises(ValueError):
        stable_scenario(1.5, "uniform-symmetric", [10])
    with pytest.raises(ValueError):
        stable_scenario(2.5, "exact-stable", [10])


@pytest.mark.parametrize("p", [0.6, 1.0, 1.5, 2.0])
def test_cms_sampler_charfn(p):
    rng = np.random.default_rng(17)
    x = cms_sample(p, rng, 40_000)
    t = np.array([0.2, 0.5, 1.0, 1.5, 2.5])
    assert np.max(np.abs(_empirical_charfn(x, t) - np.exp(-np.abs(t) ** p))) <= 4 / math.sqrt(40_000)


# winding number


def _winding_mpmath(u, t):
    z = mpmath.mpf(1) / (4 * u)
    a = abs(mpmath.mpf(t))
    s = mpmath.besseli((a - 1) / 2, z) + mpmath.besseli((a + 1) / 2, z)
    return float(mpmath.sqrt(mpmath.pi / 2) * mpmath.sqrt(z) * mpmath.exp(-z) * s)


@pytest.mark.parametrize("log_u", [0.5, 3.0, 40.0, 1e4])
def test_winding_charfn_at_zero(log_u):
    assert winding_charfn(log_u, 0.0)[0] == pytest.approx(1.0, abs=1e-12)


def test_winding_charfn_matches_extended_precision():
    for u, t in [(10.0, 3.0), (10.0, 0.4), (2.0, 7.5), (1e6, 1.0)]:
        assert winding_charfn(math.log(u), t)[0] == pytest.approx(_winding_mpmath(u, t), rel=1e-11)


def test_winding_cauchy_limit():
    log_u = 1e4
    assert winding_charfn(log_u, 2.0 / log_u)[0] == pytest.approx(math.exp(-1), abs=1e-3)


@given(st.floats(0.0, 50.0), st.floats(1.1, 60.0))
def test_winding_charfn_is_a_charfn(t, log_u):
    v = winding_charfn(log_u, np.array([t, -t]))
    assert v[0] == v[1]
    assert abs(v[0]) <= 1 + 1e-12


def test_winding_envelope_dominates():
    B = winding_envelope_constant()
    s = np.linspace(0, 30, 301)
    for log_u in (math.log(0.25) + 1e-9, 0.0, 2.0, 20.0):
        bound = B * np.exp(-0.5 * s * (math.log(4.0) + log_u))
        assert np.all(np.abs(winding_charfn(log_u, s)) <= bound * (1 + 1e-12))


def test_winding_local_limit_trend():
    scn = winding_scenario([10.0, 20.0, 40.0])
    vals = [local_limit(scn, lu, Region.interval(-1, 1), method="analytic").scaled_probability for lu in scn.index_set]
    assert vals[1] == pytest.approx(2 / math.pi, rel=0.15)
    devs = [abs(v - 2 / math.pi) for v in vals]
    assert devs[0] > devs[1] > devs[2]


def test_winding_symmetric_regions():
    scn = winding_scenario([20.0])
    prob = scn.info["analytic_probability"]
    assert abs(prob(20.0, Region.interval(0.2, 1.3)) - prob(20.0, Region.interval(-1.3, -0.2))) < 1e-10


def test_winding_h2_and_domination():
    scn = winding_scenario([10.0, 40.0])
    res = check_h2(scn, [40.0], np.linspace(-5, 5, 101))
    assert res.values[0] < 0.02
    dom = check_h3_domination(scn, 2.0, [10.0, 40.0], np.linspace(-20, 20, 401))
    assert dom.holds


def test_winding_has_no_sampler():
    scn = winding_scenario([10.0])
    assert scn.sampler is None
    with pytest.raises(ValueError):
        winding_scenario([0.5])


# relaxed Poisson


def test_poisson_charfn_exact_at_zero():
    for lam in (10.0, 1e4, 1e8):
        assert poisson_charfn(lam, np.array([0.0]))[0] == 1.0


def test_poisson_charfn_formula():
    lam, t = 50.0, np.array([0.3, -1.2, 2.0])
    c = lam ** (1 / 3)
    direct = np.exp(-1j * t * lam ** (2 / 3)) * np.exp(lam * (np.exp(1j * t / c) - 1))
    assert np.max(np.abs(poisson_charfn(lam, t) - direct)) < 1e-12


@pytest.mark.parametrize("lam", [1e4, 1e6])
def test_poisson_gaussian_bound_range(lam):
    scn = poisson_scenario([lam])
    t = np.linspace(-(lam**0.25), lam**0.25, 801)
    assert np.all(np.abs(scn.scaled_charfn(lam, t)) <= np.exp(-(t**2) / 4) * (1 + 1e-12))


def test_poisson_local_limit_large_lambda():
    scn = poisson_scenario([1e8])
    rep = local_limit(scn, 1e8, Region.interval(0, 1))
    assert rep.scaled_probability == pytest.approx(1 / math.sqrt(2 * math.pi), rel=0.05)


def test_poisson_local_limit_improves():
    scn = poisson_scenario([1e4, 1e6])
    target = 2 / math.sqrt(2 * math.pi)
    devs = [abs(local_limit(scn, lam, Region.interval(-1, 1)).scaled_probability - target) for lam in scn.index_set]
    assert devs[0] < 0.1 * target
    assert devs[1] < devs[0]


def test_poisson_exact_matches_direct_pmf_sum():
    lam = 30.0
    scn = poisson_scenario([lam])
    c = lam ** (1 / 3)
    lo, hi = math.floor(lam - c) + 1, math.ceil(lam + 2 * c) - 1
    direct = math.fsum(math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1)) for k in range(lo, hi + 1))
    assert scn.exact_prob(lam, Region.interval(-1, 2)) == pytest.approx(direct, rel=1e-12)


def test_poisson_validation():
    with pytest.raises(ValueError):
        poisson_scenario([5.0])
    with pytest.raises(ValueError):
        poisson_scenario([10.0], variant="binomial")
    with pytest.raises(ValueError):
        poisson_scenario([math.log(1e6)], variant="permutation-cycles")


def test_poisson_sampler_charfn():
    scn = poisson_scenario([1e4])
    x = scn.sampler(1e4, np.random.default_rng(4), 40_000)
    t = np.array([0.1, 0.4, 0.8, 1.5, 3.0])
    assert np.max(np.abs(_empirical_charfn(x, t) - scn.charfn_of(1e4)(t))) <= 4 / math.sqrt(40_000)


# permutation cycles


def _cycles_pmf_exact(n):
    # unsigned Stirling numbers of the first kind over n!
    row = [1]
    for j in range(n):
        row = [0] + row
        for k in range(len(row) - 1):
            row[k] += j * row[k + 1]
    fact = math.factorial(n)
    return [v / fact for v in row]


def test_cycles_pmf_matches_stirling_numbers():
    for n in (5, 12, 30):
        ref = _cycles_pmf_exact(n)
        for use in (True, False):
            got = cycles_pmf(n, kmax=n, use_numba=use)
            assert np.max(np.abs(got - np.array(ref))) < 1e-13


def test_cycles_pmf_backends_agree_large_n():
    a = cycles_pmf(10**5, use_numba=True)
    b = cycles_pmf(10**5, use_numba=False)
    assert np.max(np.abs(a - b)) < 1e-14
    assert a.sum() == pytest.approx(1.0, abs=1e-12)


def test_log_gamma_ratio_against_mpmath():
    w = np.exp(1j * np.array([0.0, 0.3, 2.0, -3.0]))
    for n in (10, 29, 30, 999, 10**6, 10**9):
        got = classical._log_gamma_ratio(n, w)
        ref = [complex(mpmath.loggamma(n + mpmath.mpc(v)) - mpmath.loggamma(n + 1)) for v in w]
        assert np.max(np.abs(got - np.array(ref))) < 1e-14


def test_cycles_charfn_matches_bernoulli_product():
    n = 300
    t = np.array([0.0, 0.5, -1.7, 2.0])
    lam = math.log(n)
    w = np.exp(1j * t / lam ** (1 / 3))
    prod = np.ones_like(w)
    for j in range(1, n + 1):
        prod *= (j - 1 + w) / j
    direct = prod * np.exp(-1j * t * lam ** (2 / 3))
    assert np.max(np.abs(cycles_charfn(n, t) - direct)) < 1e-12


def test_cycles_h2_decreasing():
    ns = [10**2, 10**4, 10**6]
    scn = poisson_scenario(ns, variant="permutation-cycles")
    res = check_h2(scn, ns, np.linspace(-2, 2, 81))
    assert res.improving
    # the mean is H_n = log n + gamma, not log n, which keeps the deviation above 0.05 here
    assert res.values == pytest.approx((0.16, 0.10, 0.079), abs=0.01)


def test_cycle_sampler_matches_pmf():
    n = 1000
    counts = sample_cycle_counts(n, np.random.default_rng(8), 200_000)
    pmf = cycles_pmf(n, kmax=40)
    freq = np.bincount(counts, minlength=41)[:41] / counts.size
    se = np.sqrt(pmf * (1 - pmf) / counts.size)
    assert np.all(np.abs(freq - pmf) <= 5 * se + 1e-6)


def test_cycles_exact_probability():
    n = 12
    scn = poisson_scenario([n], variant="permutation-cycles")
    lam = math.log(n)
    c = lam ** (1 / 3)
    ref = _cycles_pmf_exact(n)
    ks = [k for k in range(n + 1) if -1 < (k - lam) / c < 1]
    assert scn.exact_prob(n, Region.interval(-1, 1)) == pytest.approx(sum(ref[k] for k in ks), abs=1e-13)


# Gamma shift


def test_gamma_unshifted_limit_is_zero():
    scn = gamma_shift_scenario([10**4])
    rep = local_limit(scn, 10**4, Region.interval(1, 2))
    assert rep.predicted_limit == 0.0
    assert rep.scaled_probability <= 1e-3


@pytest.mark.parametrize("c,region,target", [(1.0, (0, 1), math.exp(-1)), (2.0, (-1, 1), 4 * math.exp(-2))])
def test_gamma_shift_limits(c, region, target):
    scn = gamma_shift_scenario([10**4], c=c)
    rep = local_limit(scn, 10**4, Region.interval(*region))
    assert rep.scaled_probability == pytest.approx(target, rel=0.01)
    assert rep.predicted_limit == pytest.approx(target, rel=1e-9)


def test_gamma_interval_probability_closed_form():
    # P[x < G < y] = (1 + x) e^{-x} - (1 + y) e^{-y}
    for x, y in [(0.0, 1.0), (0.5, 3.0), (2.0, 2.001)]:
        ref = (1 + x) * math.exp(-x) - (1 + y) * math.exp(-y)
        assert classical._gamma2_interval(x, y) == pytest.approx(ref, rel=1e-12)
    assert classical._gamma2_interval(3.0, 1.0) == 0.0


def test_gamma_validation():
    with pytest.raises(ValueError):
        gamma_shift_scenario([10], c=-1.0)


def test_module_exports():
    for name in classical.__all__:
        assert hasattr(classical, name)
