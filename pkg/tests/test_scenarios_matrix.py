import cmath
import functools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats
from scipy.special import j1, loggamma

from modphi.engine import check_h2, mc_probability
from modphi.fourier import Region
from modphi.scenarios import matrix
from modphi.scenarios.matrix import (
    EigenvalueAtOneError,
    biased_so_asymptotic,
    biased_so_charfn,
    biased_so_scenario,
    centering,
    haar_sample,
    importance_summary,
    ks_conjecture_phi,
    ks_scenario,
    ks_surrogate_charfn,
    log_det_one_minus,
    phi_group,
    sample_log_det,
    scale_factor,
    stochastic_zeta_charfn,
    stochastic_zeta_scenario,
)

mpmath.mp.dps = 30


def u_exact_charfn(n, t1, t2):
    """E[exp(i t1 Re log Z + i t2 Im log Z)], Z = det(1 - g), g Haar in U(n).

    Finite-n moment formula prod_j Gamma(j) Gamma(j + s) / (Gamma(j + (s+u)/2) Gamma(j + (s-u)/2))
    with s = i t1, u = t2.
    """
    j = np.arange(1, n + 1)[:, None]
    s = 1j * np.atleast_1d(np.asarray(t1, float))[None, :]
    u = np.atleast_1d(np.asarray(t2, float))[None, :]
    lg = loggamma(j) + loggamma(j + s) - loggamma(j + (s + u) / 2) - loggamma(j + (s - u) / 2)
    return np.exp(lg.sum(axis=0))


@functools.lru_cache(maxsize=None)
def u_disc_scaled_probability(n):
    """(log n / 2) P[|log det(1 - g)| < 1] by polar Fourier inversion of the exact formula."""
    x, w = np.polynomial.legendre.leggauss(200)
    R = 12 / math.sqrt(math.log(n) / 2)
    r, wr = 0.5 * R * (x + 1), 0.5 * R * w
    th = 2 * math.pi * np.arange(256) / 256
    rr, tt = np.meshgrid(r, th, indexing="ij")
    phi = u_exact_charfn(n, (rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()).reshape(rr.shape)
    angular = phi.real.mean(axis=1) * 2 * math.pi
    kernel = 2 * math.pi * j1(r) / r
    return math.log(n) / 2 * float(np.sum(wr * r * angular * kernel)) / (4 * math.pi**2)


# Haar sampling


@pytest.mark.parametrize("family,n", [("U", 7), ("SO", 5), ("USp", 4)])
def test_haar_is_in_the_group(family, n):
    g = haar_sample(family, n, np.random.default_rng(1), 20)
    eye = np.eye(g.shape[1])
    assert np.max(np.abs(np.conj(np.swapaxes(g, 1, 2)) @ g - eye)) < 1e-10
    if family == "SO":
        assert np.all(np.isrealobj(g))
        assert np.max(np.abs(np.linalg.det(g) - 1)) < 1e-10
    if family == "USp":
        j = matrix._symplectic_form(n)
        assert np.max(np.abs(np.swapaxes(g, 1, 2) @ j @ g - j)) < 1e-10


@pytest.mark.parametrize("family", ["SO", "USp"])
def test_eigenvalues_unit_circle_and_conjugate_pairs(family):
    g = haar_sample(family, 6, np.random.default_rng(2), 10)
    for ev in np.linalg.eigvals(g):
        assert np.max(np.abs(np.abs(ev) - 1)) < 1e-10
        ang = np.angle(ev)
        assert np.max(np.abs(np.sort(ang) - np.sort(-ang))) < 1e-9


def test_unitary_eigenangles_uniform():
    g = haar_sample("U", 16, np.random.default_rng(3), 10_000)
    ang = np.angle(np.linalg.eigvals(g)).ravel()
    counts, _ = np.histogram(ang, bins=32, range=(-math.pi, math.pi))
    assert stats.chisquare(counts).pvalue > 1e-3


@pytest.mark.parametrize("n", [8, 64])
def test_unitary_trace_second_moment(n):
    g = haar_sample("U", n, np.random.default_rng(4), 4000)
    tr2 = np.abs(np.trace(g, axis1=1, axis2=2)) ** 2
    # |tr g|^2 is Exp(1) in the limit and has variance 1 already for n >= 2
    assert abs(tr2.mean() - 1) <= 4 * tr2.std() / math.sqrt(tr2.size)


def test_haar_validation():
    with pytest.raises(ValueError):
        haar_sample("GL", 3, np.random.default_rng(0))
    with pytest.raises(ValueError):
        haar_sample("U", 0, np.random.default_rng(0))


# log det(1 - g)


def test_log_det_examples():
    assert log_det_one_minus(-np.eye(2), "U") == pytest.approx(math.log(4), abs=1e-14)
    for theta in (0.3, 1.0, 2.5):
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        assert log_det_one_minus(rot, "SO") == pytest.approx(math.log(2 - 2 * c), abs=1e-13)


def test_log_det_matches_dense_determinant():
    g = haar_sample("U", 8, np.random.default_rng(5), 50)
    got = log_det_one_minus(g, "U")
    dets = np.linalg.det(np.eye(8) - g)
    assert np.max(np.abs(np.exp(got) - dets)) < 1e-10
    # each term has argument in [-pi/2, pi/2], so the sum lies within n pi/2
    assert np.all(np.abs(got.imag) <= 8 * math.pi / 2)


def test_log_det_additive_on_direct_sums():
    rng = np.random.default_rng(6)
    a, b = haar_sample("U", 3, rng)[0], haar_sample("U", 5, rng)[0]
    block = np.zeros((8, 8), dtype=complex)
    block[:3, :3], block[3:, 3:] = a, b
    assert log_det_one_minus(block, "U") == pytest.approx(log_det_one_minus(a, "U") + log_det_one_minus(b, "U"), abs=1e-12)


def test_log_det_eigenvalue_at_one():
    with pytest.raises(EigenvalueAtOneError):
        log_det_one_minus(np.eye(3), "U")


def test_verblunsky_sampler_matches_eigenvalues():
    rng = np.random.default_rng(7)
    a = sample_log_det("U", 16, rng, 4000, "eig")
    b = sample_log_det("U", 16, rng, 4000, "verblunsky")
    assert stats.ks_2samp(a.real, b.real).pvalue > 1e-3
    assert stats.ks_2samp(a.imag, b.imag).pvalue > 1e-3
    with pytest.raises(ValueError):
        sample_log_det("SO", 4, rng, 10, "verblunsky")


# Keating-Snaith scaling and limiting functions


def test_phi_group_at_origin():
    assert phi_group("U", np.array([0.0, 0.0])) == pytest.approx(1.0, abs=1e-14)
    assert phi_group("USp", 0.0) == pytest.approx(1.0, abs=1e-14)
    assert phi_group("SO", 0.0) == pytest.approx(1.0, abs=1e-14)


def test_phi_group_against_mpmath():
    t1, t2 = 0.8, -0.6
    ref = mpmath.barnesg(1 + (1j * t1 - t2) / 2) * mpmath.barnesg(1 + (1j * t1 + t2) / 2) / mpmath.barnesg(1 + 1j * t1)
    assert abs(phi_group("U", np.array([t1, t2])) - complex(ref)) < 1e-10
    assert abs(phi_group("USp", 1.3) - complex(mpmath.barnesg(1.5) / mpmath.barnesg(1.5 + 1.3j))) < 1e-10
    assert abs(phi_group("SO", 0.4) - complex(mpmath.barnesg(0.5) / mpmath.barnesg(0.5 + 0.4j))) < 1e-10


def test_scaling_table():
    assert scale_factor("U", 64) == pytest.approx(math.sqrt(math.log(64) / 2))
    assert scale_factor("SO", 64) == pytest.approx(math.sqrt(math.log(32)))
    assert centering("U", 10) == 0.0
    assert centering("USp", 10) == pytest.approx(0.5 * math.log(5 * math.pi))
    assert centering("SO", 10) == pytest.approx(0.5 * math.log(0.8 * math.pi))


@pytest.mark.parametrize("n", [4, 16, 64, 256])
def test_surrogate_is_one_at_origin(n):
    assert ks_surrogate_charfn("U", n, np.zeros((1, 2)))[0] == pytest.approx(1.0, abs=1e-14)
    assert ks_surrogate_charfn("USp", n, np.zeros(1))[0] == pytest.approx(1.0, abs=1e-14)


def test_surrogate_close_to_exact_unitary_formula():
    n = 64
    t = np.array([[1.0, 0.0], [0.0, 1.0], [0.7, -0.5], [1.5, 1.0]])
    exact = u_exact_charfn(n, t[:, 0], t[:, 1])
    sur = ks_surrogate_charfn("U", n, t)
    assert np.max(np.abs(exact - sur)) < 0.01


def test_unitary_empirical_charfn():
    # the n = 64, 10^4 sample version runs in the acceptance suite
    n, samples = 32, 5000
    scn = ks_scenario("U", [n])
    x = scn.sampler(n, np.random.default_rng(8), samples)
    emp = np.mean(np.exp(1j * x[:, 0]))
    # both the real and imaginary parts are means of bounded variables
    sur = ks_surrogate_charfn("U", n, np.array([[1.0, 0.0]]))[0]
    exact = u_exact_charfn(n, [1.0], [0.0])[0]
    assert abs(emp - exact) <= 4 * math.sqrt(2 / samples)
    assert abs(emp - sur) <= 4 * math.sqrt(2 / samples)


def test_unitary_disc_probability_oracle():
    # frozen from the exact formula above
    assert u_disc_scaled_probability(16) == pytest.approx(0.28917, abs=1e-4)
    assert u_disc_scaled_probability(64) == pytest.approx(0.34011, abs=1e-4)
    assert u_disc_scaled_probability(256) == pytest.approx(0.37083, abs=1e-4)


@pytest.mark.parametrize("n,method,samples", [(16, "eig", 20_000), (256, "verblunsky", 50_000)])
def test_unitary_disc_monte_carlo_matches_exact(n, method, samples):
    scn = ks_scenario("U", [n], sampler_method=method)
    p, se = mc_probability(scn, n, Region.disc(0, 0, 1), samples, seed=21)
    det = scn.scaling.det_a(n)
    assert abs(det * p - u_disc_scaled_probability(n)) <= 4 * det * se


def test_ks_scenario_h2_trend():
    scn = ks_scenario("U", [16, 64, 256])
    res = check_h2(scn, [16, 64, 256], np.array([[0.5, 0.0], [0.0, 0.5], [0.3, 0.4]]))
    # the surrogate is phi(A_n t / A_n) Phi(t / A_n) -> exp(-|t|^2/2)
    assert res.improving


# determinant-biased SO(2n)


@pytest.mark.parametrize("n", [1, 2, 7, 20, 50])
def test_biased_so_normalization(n):
    assert biased_so_charfn(n, 0.0)[0] == pytest.approx(1.0, abs=1e-10)


def test_biased_so_against_mpmath_product():
    n, t = 5, 0.7
    it = 1j * t
    prod = mpmath.mpf(2) ** (2 * n * (1 + it))
    for j in range(1, n + 1):
        prod *= mpmath.gamma(j + n - 1) * mpmath.gamma(j + it + 0.5) / (mpmath.gamma(j - 0.5) * mpmath.gamma(j + it + n))
    assert abs(biased_so_charfn(n, t)[0] - complex(prod) / 2) < 1e-12


@given(st.floats(-6.0, 6.0), st.integers(1, 40))
def test_biased_so_conjugate_symmetry(t, n):
    a, b = biased_so_charfn(n, np.array([t, -t]))
    assert abs(a - np.conj(b)) < 1e-12
    assert abs(a) <= 1 + 1e-10


def test_biased_so_asymptotic():
    n, t = 256, 1.0
    exact = biased_so_charfn(n, t)[0]
    asym = biased_so_asymptotic(n, t)[0]
    assert abs(asym - exact) < 0.05 * abs(exact)
    # the stated 32 pi n phase is off by the constant factor 4^{-it}
    stated = asym * cmath.exp(0.5j * t * math.log(16))
    assert abs(stated * 4 ** (-1j * t) - exact) < 0.05 * abs(exact)


def test_importance_weights_normalized():
    s = importance_summary(8, 10_000, seed=3)
    assert abs(s.mean - 1) <= 4 * s.stderr
    assert 0 < s.ess <= s.samples


def test_biased_so_weighted_charfn():
    n, samples = 8, 20_000
    scn = biased_so_scenario([n])
    x, w = scn.sampler(n, np.random.default_rng(5), samples)
    assert np.all(w >= 0)
    for t in (0.3, 1.0):
        f = w * np.exp(1j * t * x)
        emp = f.mean() / w.mean()
        se = 4 * (np.std(f.real) + np.std(f.imag)) / math.sqrt(samples)
        assert abs(emp - scn.charfn_of(n)(np.array([t]))[0]) <= se


def test_biased_so_validation():
    with pytest.raises(ValueError):
        biased_so_scenario([2])


# random Euler product


def test_stochastic_zeta_at_origin():
    assert stochastic_zeta_charfn(10**4, np.zeros((1, 2)))[0] == 1.0


def test_stochastic_zeta_single_prime_factor():
    # E exp(i t . (-log(1 - Y/sqrt p))) with Y uniform on the circle, by quadrature
    p, t1, t2 = 2.0, 0.9, -0.4

    def integrand(theta, part):
        v = -cmath.log(1 - cmath.exp(1j * theta) / math.sqrt(p))
        z = cmath.exp(1j * (t1 * v.real + t2 * v.imag))
        return z.real if part == 0 else z.imag

    re = integrate.quad(integrand, 0, 2 * math.pi, args=(0,), epsabs=1e-13)[0] / (2 * math.pi)
    im = integrate.quad(integrand, 0, 2 * math.pi, args=(1,), epsabs=1e-13)[0] / (2 * math.pi)
    assert abs(stochastic_zeta_charfn(2, np.array([[t1, t2]]))[0] - complex(re, im)) < 1e-12


def test_stochastic_zeta_empirical_charfn():
    x, samples = 1000, 20_000
    scn = stochastic_zeta_scenario([x])
    v = scn.sampler(x, np.random.default_rng(6), samples)
    emp = np.mean(np.exp(1j * (v[:, 0] + v[:, 1])))
    assert abs(emp - stochastic_zeta_charfn(x, np.array([[1.0, 1.0]]))[0]) <= 4 * math.sqrt(2 / samples)


def test_stochastic_zeta_h2_decreasing():
    xs = [100, 1000, 10**4]
    scn = stochastic_zeta_scenario(xs)
    r = np.linspace(0, 2, 9)
    grid = np.array([[a * math.cos(b), a * math.sin(b)] for a in r for b in np.linspace(0, math.pi, 7)])
    res = check_h2(scn, xs, grid)
    assert res.improving
    assert res.values[0] > res.values[1] > res.values[2]


def test_stochastic_zeta_envelope():
    scn = stochastic_zeta_scenario([10**4])
    h = scn.domination_h(3.0)
    r = np.linspace(0, 3, 31)
    pts = np.stack([r, 0.5 * r], axis=1)
    assert np.all(np.abs(scn.scaled_charfn(10**4, pts)) <= h(pts) + 1e-12)


# conjectural limiting function


def test_conjecture_phi_origin():
    assert ks_conjecture_phi(0.0, 0.0).value == pytest.approx(1.0, abs=1e-14)


def test_conjecture_phi_truncation_stable():
    a = ks_conjecture_phi(1.0, 0.0, prime_cutoff=10**4).value
    b = ks_conjecture_phi(1.0, 0.0, prime_cutoff=2 * 10**4).value
    assert abs(a - b) < 1e-6
    auto = ks_conjecture_phi(1.0, 0.0)
    assert auto.tail_bound <= 1e-8


@pytest.mark.parametrize("t1,t2", [(0.5, 0.2), (1.0, -1.0), (2.0, 0.5)])
def test_conjecture_phi_conjugation(t1, t2):
    a = ks_conjecture_phi(-t1, t2, prime_cutoff=5000).value
    b = ks_conjecture_phi(t1, t2, prime_cutoff=5000).value
    assert abs(a - np.conj(b)) < 1e-12


def test_module_exports():
    for name in matrix.__all__:
        assert hasattr(matrix, name)
