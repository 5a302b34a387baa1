"""Acceptance suite: twelve end-to-end criteria at their stated tolerances.

Each check runs inside ``criterion("<number> <what>")`` so the terminal
summary prints one PASS or FAIL line per criterion.  Checks known to fail
at desk scale live in their own test functions and are left red.
"""

import contextlib
import functools
import json
import math
import os
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from modphi import arith, cli
from modphi.engine import balancedness_check, check_h2, local_limit, mc_probability
from modphi.fourier import Region, sandwich_approximation, stable_constant
from modphi.scenarios.arithmetic import (
    coprime_ratio_sum,
    dedekind_scenario,
    eta_constant,
    squarefree_scenario,
    zeta_dist_scenario,
)
from modphi.scenarios.classical import (
    gamma_shift_scenario,
    poisson_scenario,
    stable_scenario,
    winding_charfn,
    winding_scenario,
)
from modphi.scenarios.matrix import (
    biased_so_charfn,
    importance_summary,
    ks_scenario,
    ks_surrogate_charfn,
    stochastic_zeta_charfn,
    stochastic_zeta_scenario,
)

SEED = 2024
TESTS_DIR = Path(__file__).resolve().parent


@contextlib.contextmanager
def within(verdict, seconds: float):
    """Record a verdict for the block, failing it if it runs over ``seconds``."""
    with verdict:
        start = time.perf_counter()
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < seconds, f"took {elapsed:.1f} s, limit {seconds} s"


def strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def charfn_sigma(z: np.ndarray) -> float:
    # standard error of the empirical mean of complex unit-modulus samples
    return math.sqrt((z.real.var() + z.imag.var()) / z.size)


# 1. constants


def test_criterion_01_constants(criterion):
    with within(criterion("1 constants"), 10):
        assert abs(stable_constant(1.0) - 1 / math.pi) < 1e-10
        assert abs(stable_constant(2.0) - 1 / (2 * math.sqrt(math.pi))) < 1e-10
        eta = eta_constant()
        assert abs(eta.value - 0.454867) < 1e-4
        assert abs(eta.via_rho - 0.454867) < 1e-4
        assert abs(eta.value - eta.via_rho) < 1e-4


# 2. Cauchy sums


def test_criterion_02_cauchy(criterion):
    with within(criterion("2 cauchy"), 1):
        n, a, b = 10**6, -1.0, 2.0
        scn = stable_scenario(1.0, "cauchy", [n])
        rep = local_limit(scn, n, Region.interval(a, b))
        closed = n * (math.atan(b / n) - math.atan(a / n)) / math.pi
        assert rep.scaled_probability == pytest.approx(closed, rel=1e-12)
        assert abs(rep.scaled_probability - (b - a) / math.pi) / ((b - a) / math.pi) < 1e-5
        assert rep.predicted_limit == pytest.approx((b - a) / math.pi, rel=1e-12)


# 3. Gamma shift


@pytest.mark.parametrize("c,alpha,beta", [(1.0, 0.0, 1.0), (2.0, -1.0, 1.0)])
def test_criterion_03_gamma_shift(criterion, c, alpha, beta):
    with within(criterion(f"3 gamma shift c={c:g}"), 1):
        n = 10**4
        scn = gamma_shift_scenario([n], c=c)
        rep = local_limit(scn, n, Region.interval(alpha, beta), method="exact")
        target = c * math.exp(-c) * (beta - alpha)
        assert abs(rep.scaled_probability - target) < 0.01 * target


# 4. relaxed Poisson


def test_criterion_04_poisson(criterion):
    with within(criterion("4 relaxed poisson"), 30):
        lambdas = [1e4, 1e6, 1e8]
        scn = poisson_scenario(lambdas)
        target = 1 / math.sqrt(2 * math.pi)
        vals = [local_limit(scn, lam, Region.interval(0, 1), method="exact").scaled_probability for lam in lambdas]
        assert abs(vals[-1] - target) < 0.05 * target
        assert strictly_decreasing([abs(v - target) for v in vals])


# 5. winding number


def test_criterion_05_winding(criterion):
    with within(criterion("5 winding"), 60):
        log_u = 1e4
        t = np.linspace(-5, 5, 2001)
        dev = np.max(np.abs(winding_charfn(log_u, 2 * t / log_u) - np.exp(-np.abs(t))))
        assert dev < 0.01

        log_us = [10.0, 20.0, 40.0]
        scn = winding_scenario(log_us)
        target = 2 / math.pi
        vals = [local_limit(scn, lu, Region.interval(-1, 1), method="analytic").scaled_probability for lu in log_us]
        assert abs(vals[-1] - target) < 0.15 * target
        assert strictly_decreasing([abs(v - target) for v in vals])


# 6. Dedekind sums


def test_criterion_06_dedekind(criterion):
    with within(criterion("6 dedekind"), 120):
        rng = np.random.default_rng(SEED)
        checked = 0
        while checked < 200:
            c = int(rng.integers(2, 10**4 + 1))
            d = int(rng.integers(1, c))
            if math.gcd(d, c) != 1:
                continue
            brute = arith.dedekind_sum_bruteforce(d, c)
            assert arith.dedekind_sum(d, c) == brute
            nums, dens = arith.dedekind_numerators(c, c + 1)
            coprime = [e for e in range(1, c) if math.gcd(e, c) == 1]
            k = coprime.index(d)
            assert Fraction(int(nums[k]), int(dens[k])) == brute
            checked += 1

        scn = dedekind_scenario([300, 3000])
        target = 2 / math.pi
        vals = [local_limit(scn, N, Region.interval(-1, 1)).scaled_probability for N in (300, 3000)]
        assert abs(vals[1] - target) < 0.3 * target
        assert abs(vals[1] - target) < abs(vals[0] - target)


# 7. zeta distribution


def test_criterion_07_zeta_distribution(criterion):
    with within(criterion("7 zeta distribution"), 60):
        sigma = 1.01
        corollary = (sigma - 1) * coprime_ratio_sum(sigma, 1.0, 2.0)
        target = 3 / math.pi**2 * math.log(2)
        assert abs(corollary - target) < 0.05 * target

        scn = zeta_dist_scenario([1.05])
        rep = local_limit(scn, 1.05, Region.interval(-1, 1))
        assert abs(scn.scaling.det_a(1.05) - 1 / 0.05) < 1e-9
        assert abs(rep.scaled_probability - 1) < 0.1


# 8. squarefree model


def test_criterion_08_squarefree(criterion, capsys):
    with within(criterion("8 squarefree"), 300):
        xs = [100, 1000, 10**4]
        scn = squarefree_scenario(xs)
        h2 = check_h2(scn, [10**4], np.linspace(-5, 5, 201))
        assert h2.values[0] < 0.05

        target = 2 * eta_constant().value
        reps = [local_limit(scn, x, Region.interval(0, 2), method="monte-carlo", samples=200_000, seed=SEED)
                for x in xs]
        assert abs(reps[-1].scaled_probability - target) < 0.2 * target
        assert strictly_decreasing([abs(r.scaled_probability - target) for r in reps])

        code = cli.main(["run", "squarefree", "--variant", "fq", "--q", "2", "--ns", "50", "--region", "0.25,0.75"])
        (report,) = json.loads(capsys.readouterr().out)
        assert code == 2
        assert report["scaled_probability"] == 0.0
        assert report["diagnostics"]["h2_deviation"] < 0.05


# 9. random matrices


def test_criterion_09_random_matrices(criterion):
    with within(criterion("9 biased SO and unitary charfn"), 600):
        for n in range(1, 51):
            assert abs(2 * biased_so_charfn(n, 0.0)[0] - 2) < 1e-10

        imp = importance_summary(32, 10_000, seed=SEED)
        assert abs(imp.mean - 1) <= 4 * imp.stderr

        n = 64
        scn = ks_scenario("U", [n])
        x = scn.sampler(n, np.random.default_rng(SEED), 10_000)
        z = np.exp(1j * x[:, 0])
        predicted = ks_surrogate_charfn("U", n, np.array([[1.0, 0.0]]))[0]
        assert abs(z.mean() - predicted) <= 4 * charfn_sigma(z)


@functools.lru_cache(maxsize=None)
def _unitary_disc_scaled(n: int) -> tuple[float, float]:
    scn = ks_scenario("U", [n], sampler_method="verblunsky")
    p, se = mc_probability(scn, n, Region.disc(0, 0, 1), 200_000, seed=SEED, workers=4)
    det = scn.scaling.det_a(n)
    return det * p, det * se


def test_criterion_09_unitary_disc_trend(criterion):
    with criterion("9 unitary disc trend"):
        vals = [_unitary_disc_scaled(n)[0] for n in (16, 64, 256)]
        assert strictly_decreasing([abs(v - 0.5) for v in vals])


def test_criterion_09_unitary_disc_within_25_percent(criterion):
    # known red: the exact finite-n formula gives 0.3708 at n = 256, about 25.8% below 1/2
    with criterion("9 unitary disc within 25% at n=256"):
        value, _ = _unitary_disc_scaled(256)
        assert abs(value - 0.5) <= 0.25 * 0.5


# 10. stochastic zeta


def test_criterion_10_stochastic_zeta(criterion):
    with criterion("10 stochastic zeta"):
        x = 10**4
        scn = stochastic_zeta_scenario([x])
        v = scn.sampler(x, np.random.default_rng(SEED), 100_000)
        for point in ([1.0, 0.5], [0.0, 1.0], [1.5, -1.0]):
            z = np.exp(1j * (v @ np.array(point)))
            exact = stochastic_zeta_charfn(x, np.array([point]))[0]
            assert abs(z.mean() - exact) <= 4 * charfn_sigma(z)

        xs = [100, 1000, 10**4]
        scn = stochastic_zeta_scenario(xs)
        r = np.linspace(0, 2, 9)
        grid = np.array([[a * math.cos(b), a * math.sin(b)] for a in r for b in np.linspace(0, math.pi, 7)])
        assert strictly_decreasing(check_h2(scn, xs, grid).values)


# 11. sandwich


def test_criterion_11_sandwich(criterion):
    with within(criterion("11 sandwich"), 30):
        pair = sandwich_approximation(lambda x: np.clip(1.0 - np.abs(x), 0.0, None), 0.5, check_nodes=4096)
        assert pair.x.shape == (4096,)
        assert np.all(pair.g2 <= pair.f) and np.all(pair.f <= pair.g1)
        assert pair.gap_integral <= 0.5
        assert pair.spectral_mass_outside() < 1e-6


# 12. property suites and balancedness


def test_criterion_12_property_suites(criterion):
    with criterion("12 module property suites"):
        files = sorted(str(p) for p in TESTS_DIR.glob("test_*.py") if p.name != "test_acceptance.py")
        proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *files],
                              capture_output=True, text=True, env=dict(os.environ), timeout=1800)
        assert proc.returncode == 0, proc.stdout[-3000:]


def test_criterion_12_balancedness_dimension_one(criterion):
    with criterion("12 balancedness accepts d=1"):
        rng = np.random.default_rng(SEED)
        for _ in range(50):
            s, t, e = rng.uniform(0.1, 10), rng.uniform(0.1, 10), rng.uniform(0.1, 1)
            res = balancedness_check(lambda n: s * n**-e, lambda n: t * n**e, [10, 100, 10**4], c_max=1 / t)
            assert res.holds


def test_criterion_12_balancedness_rejects_counterexample(criterion):
    # known red: as defined the witness is |T_n^{-1}| = n^{-1/8}, which tends to 0
    with criterion("12 balancedness rejects d=2 counterexample"):
        res = balancedness_check(
            lambda n: np.diag([n**-0.25, n**-0.5]),
            lambda n: np.array([[0.0, n**0.125], [n**0.125, 0.0]]),
            [10, 100, 10**4],
            c_max=1.0,
        )
        assert not res.holds
