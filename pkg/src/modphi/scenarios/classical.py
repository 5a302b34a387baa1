"""Probabilistic scenarios.

Sums of symmetric stable-type increments, the winding number of planar
Brownian motion, relaxed Poisson variables (with the cycle count of a
random permutation as a variant) and the shifted Gamma example.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import stats

from .. import fourier, specfun
from .._accel import USE_NUMBA, njit
from ..engine import ReferenceLaw, ScalingSeq, Scenario, shift_mean
from ..fourier import CharFn, Region

__all__ = [
    "stable_scenario",
    "cms_sample",
    "winding_charfn",
    "winding_envelope_constant",
    "winding_scenario",
    "poisson_charfn",
    "cycles_charfn",
    "cycles_pmf",
    "sample_cycle_counts",
    "poisson_scenario",
    "gamma_shift_scenario",
]

_INCREMENTS = ("exact-stable", "uniform-symmetric", "cauchy")


# ---------------------------------------------------------------------------
# stable sums


def cms_sample(p: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Symmetric stable draws with characteristic function ``exp(-|t|**p)``.

    Chambers-Mallows-Stuck construction from a uniform angle and an
    exponential variable.
    """
    v = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    w = rng.exponential(1.0, size)
    if p == 1.0:
        return np.tan(v)
    return np.sin(p * v) / np.cos(v) ** (1.0 / p) * (np.cos((1.0 - p) * v) / w) ** ((1.0 - p) / p)


def _stable_interval_prob(p: float, scale: float, region: Region) -> float:
    # P[scale * S in region] for S with characteristic function exp(-|t|**p)
    a, b = region.params
    if p == 1.0:
        return (math.atan(b / scale) - math.atan(a / scale)) / math.pi
    if p == 2.0:
        s = 2.0 * scale  # standard deviation sqrt(2) * scale
        return 0.5 * (math.erf(b / s) - math.erf(a / s))
    phi = CharFn(1, lambda t: np.exp(-np.abs(t) ** p), lambda r: np.exp(-(r**p)))
    return fourier.interval_probability(phi, Region.interval(a / scale, b / scale), 1e-12)


def stable_scenario(p: float, increment: str, ns: Sequence[int], b_of=None) -> Scenario:
    """Normalized sums ``S_n = X_1 + ... + X_n`` of symmetric increments.

    Parameters
    ----------
    p : float
        Stable index in (0, 2].
    increment : {'exact-stable', 'uniform-symmetric', 'cauchy'}
        Law of the increments.  Uniform increments on [-1, 1] need
        ``p = 2`` and default to ``b_n = sqrt(n / 6)``.
    ns : sequence of int
    b_of : callable, optional
        Override for the scaling ``b_n``.

    Raises
    ------
    ValueError
        For lattice increments or inconsistent ``p``.
    """
    if increment not in _INCREMENTS:
        raise ValueError(f"increment must be one of {_INCREMENTS}; lattice laws are not allowed")
    if not 0 < p <= 2:
        raise ValueError("p must lie in (0, 2]")
    if increment == "cauchy" and p != 1:
        raise ValueError("Cauchy increments have p = 1")
    if increment == "uniform-symmetric" and p != 2:
        raise ValueError("uniform increments are attracted to p = 2")

    if increment == "uniform-symmetric":
        b_of = b_of or (lambda n: math.sqrt(n / 6.0))

        def charfn_of(n):
            return CharFn(1, lambda t: np.sinc(t / math.pi) ** n, lambda r: np.minimum(1.0, 1.0 / np.maximum(r, 1e-300)) ** n)

        def exact(n, region):
            return fourier.interval_probability(charfn_of(n), region, 1e-12)

        block = max(1, (1 << 22) // max(int(ns[-1]) if ns else 1, 1))

        def sampler(n, rng, size):
            out = np.empty(size)
            for i in range(0, size, block):
                m = min(block, size - i)
                out[i : i + m] = rng.uniform(-1.0, 1.0, (m, int(n))).sum(axis=1)
            return out

        domination = None
    else:
        b_of = b_of or (lambda n: float(n) ** (1.0 / p))

        def charfn_of(n):
            return CharFn(1, lambda t: np.exp(-n * np.abs(t) ** p), lambda r: np.exp(-n * r**p))

        def exact(n, region):
            return _stable_interval_prob(p, float(n) ** (1.0 / p), region)

        def sampler(n, rng, size):
            if increment == "cauchy":
                return float(n) * rng.standard_cauchy(size)
            return float(n) ** (1.0 / p) * cms_sample(p, rng, size)

        def domination(k):
            return lambda t: np.exp(-np.abs(t) ** p)

    return Scenario(
        name="stable",
        dim=1,
        index_set=tuple(ns),
        charfn_of=charfn_of,
        scaling=ScalingSeq.scalar(1, b_of),
        reference=ReferenceLaw.stable(p),
        exact_prob=exact,
        sampler=sampler,
        domination_h=domination,
        discrete=False,
        variant=increment,
        info={"p": p},
    )


# ---------------------------------------------------------------------------
# winding number


def winding_charfn(log_u: float, t) -> np.ndarray:
    """Characteristic function of the winding angle at time ``u = exp(log_u)``.

    ``sqrt(pi/2) sqrt(z) exp(-z) (I_{(|t|-1)/2}(z) + I_{(|t|+1)/2}(z))``
    with ``z = 1/(4u)``, evaluated in log space so that ``log_u`` can be
    as large as ``10**4``.
    """
    log_z = -math.log(4.0) - log_u
    z = math.exp(log_z) if log_z > -700 else 0.0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t.shape)
    for i, ti in np.ndenumerate(t):
        a = abs(ti)
        total = 0.0
        for nu in (0.5 * (a - 1.0), 0.5 * (a + 1.0)):
            log_pre, red = specfun.bessel_i_log_reduced(nu, log_z)
            total += math.exp(0.5 * math.log(0.5 * math.pi) + 0.5 * log_z - z + log_pre) * red
        out[i] = total
    return out


def winding_envelope_constant() -> float:
    """Constant ``B`` with ``|phi_u(s)| <= B (4u)**(-|s|/2)`` for ``u >= 1/4``.

    From the series: ``sqrt(z) I_nu(z) <= 2**(1/2) z**(nu+1/2) e**(1/4) / min Gamma``
    for ``z <= 1`` and ``nu >= -1/2``; the minimum of Gamma on ``[1/2, inf)``
    is about 0.8856.
    """
    gamma_min = 0.8856031944108887
    return math.sqrt(0.5 * math.pi) * 2.0 * math.sqrt(2.0) * math.exp(0.25) / gamma_min


def winding_scenario(log_us: Sequence[float]) -> Scenario:
    """Winding angle ``theta_u`` indexed by ``log u``.

    Probabilities come from Fourier inversion of :func:`winding_charfn`;
    the scaling is ``A = (log u) / 2`` and the limit is standard Cauchy.
    """
    if any(lu <= 1.0 for lu in log_us):
        raise ValueError("winding scenario needs u > e")
    B = winding_envelope_constant()

    def charfn_of(lu):
        rate = 0.5 * (math.log(4.0) + lu)
        return CharFn(1, lambda t: winding_charfn(lu, t).astype(complex), lambda r: B * np.exp(-rate * r))

    def exact(lu, region):
        return fourier.interval_probability(charfn_of(lu), region, 1e-10)

    def domination(k):
        return lambda t: B * np.exp(-np.abs(t) / k)

    return Scenario(
        name="winding",
        dim=1,
        index_set=tuple(log_us),
        charfn_of=charfn_of,
        scaling=ScalingSeq.scalar(1, lambda lu: 0.5 * lu),
        reference=ReferenceLaw.cauchy(),
        exact_prob=None,
        sampler=None,
        domination_h=domination,
        discrete=False,
        info={"index": "log u", "analytic_probability": exact},
    )


# ---------------------------------------------------------------------------
# relaxed Poisson and permutation cycles


def _lambda_sin_minus(lam: float, theta: np.ndarray) -> np.ndarray:
    # lam * (sin(theta) - theta) without cancellation
    small = np.abs(theta) < 0.1
    th = np.where(small, theta, 0.0)
    th2 = th * th
    series = -th * th2 / 6.0 * (1.0 - th2 / 20.0 * (1.0 - th2 / 42.0 * (1.0 - th2 / 72.0 * (1.0 - th2 / 110.0))))
    direct = np.sin(theta) - theta
    return lam * np.where(small, series, direct)


def poisson_charfn(lam: float, t) -> np.ndarray:
    """Characteristic function of ``(P - lam) / lam**(1/3)``, ``P ~ Poisson(lam)``."""
    t = np.asarray(t, dtype=float)
    theta = t / lam ** (1.0 / 3.0)
    modulus = -2.0 * lam * np.sin(0.5 * theta) ** 2
    phase = _lambda_sin_minus(lam, theta) + t * (lam / lam ** (1.0 / 3.0) - lam ** (2.0 / 3.0))
    return np.exp(modulus + 1j * phase)


def _log_gamma_ratio(n: int, w: np.ndarray) -> np.ndarray:
    """``log Gamma(n + w) - log Gamma(n + 1)`` without cancellation for large ``n``.

    Stirling's series for both terms, differenced analytically; every
    remaining term is ``O(log n)`` instead of ``O(n log n)``.
    """
    w = np.asarray(w, dtype=complex)
    if n < 30:
        return specfun.log_gamma(n + w) - specfun.log_gamma(np.array([n + 1.0]))[0]
    m = n + 1.0
    d = w - 1.0
    z = m + d

    def corr(x):
        x2 = x * x
        return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x

    # numpy's complex log1p is log(1 + x) and loses tiny arguments
    x = d / m
    log1p_x = 0.5 * np.log1p(2.0 * x.real + np.abs(x) ** 2) + 1j * np.arctan2(x.imag, 1.0 + x.real)
    return (z - 0.5) * log1p_x + d * math.log(m) - d + corr(z) - corr(m)


def cycles_charfn(n: int, t) -> np.ndarray:
    """Characteristic function of ``(C_n - log n) / (log n)**(1/3)``.

    ``C_n`` is the number of cycles of a uniform permutation of size ``n``,
    a sum of independent Bernoulli(1/j).  Its generating function
    ``prod_j (j - 1 + w) / j`` equals ``Gamma(n + w) / (Gamma(w) n!)``.
    """
    lam = math.log(n)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    w = np.exp(1j * t / lam ** (1.0 / 3.0))
    logs = _log_gamma_ratio(n, w) - specfun.log_gamma(w)
    return np.exp(logs - 1j * t * lam ** (2.0 / 3.0))


_CYCLES_DP_MAX_N = 10**5


@njit
def _cycles_dp(n: int, kmax: int) -> np.ndarray:
    pmf = np.zeros(kmax + 1)
    pmf[1] = 1.0  # j = 1 always opens a cycle
    for j in range(2, n + 1):
        q = 1.0 / j
        for k in range(kmax, 0, -1):
            pmf[k] = pmf[k] * (1.0 - q) + pmf[k - 1] * q
        pmf[0] = pmf[0] * (1.0 - q)
    return pmf


def _cycles_dft(n: int, kmax: int) -> np.ndarray:
    # pmf from the generating function on the unit circle
    m = 2 * (kmax + 1)
    w = np.exp(2j * math.pi * np.arange(m) / m)
    w[0] = 1.0
    logs = _log_gamma_ratio(n, w) - specfun.log_gamma(w)
    coeffs = np.fft.fft(np.exp(logs)) / m
    return np.clip(coeffs.real[: kmax + 1], 0.0, None)


def cycles_pmf(n: int, kmax: int | None = None, use_numba: bool | None = None) -> np.ndarray:
    """Probabilities ``P[C_n = k]`` for ``k = 0..kmax``.

    Two algorithms: the Poisson-binomial recursion, compiled with numba and
    costing ``O(n kmax)``, and the discrete Fourier transform of the
    generating function, costing ``O(kmax log kmax)``.  By default the
    recursion runs only when numba is active and ``n <= 10**5``.
    ``use_numba`` forces one or the other.
    """
    if kmax is None:
        kmax = int(math.log(n) + 12.0 * math.sqrt(math.log(n)) + 20.0)
    use = (USE_NUMBA and n <= _CYCLES_DP_MAX_N) if use_numba is None else use_numba
    if use:
        return _cycles_dp(int(n), int(kmax))
    return _cycles_dft(int(n), int(kmax))


def sample_cycle_counts(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Cycle counts by jumping between successes of the Bernoulli(1/j) sequence.

    After a success at ``j`` the next success index ``J`` satisfies
    ``P[J > m] = j / m``, so ``J = floor(j / U) + 1``.  Each draw costs
    ``O(log n)`` steps.
    """
    count = np.ones(size, dtype=np.int64)
    pos = np.ones(size)
    active = np.ones(size, dtype=bool)
    while np.any(active):
        idx = np.flatnonzero(active)
        u = 1.0 - rng.random(idx.size)  # in (0, 1]
        nxt = np.floor(pos[idx] / u) + 1.0
        hit = nxt <= n
        count[idx[hit]] += 1
        pos[idx[hit]] = nxt[hit]
        active[idx[~hit]] = False
    return count


def poisson_scenario(lambdas: Sequence[float], variant: str = "poisson") -> Scenario:
    """Relaxed Poisson variables ``(P - lam) / lam**(1/3)`` with ``A = lam**(1/6)``.

    With ``variant='permutation-cycles'`` the index is the permutation
    size ``n`` and ``lam = log n``.
    """
    if variant not in ("poisson", "permutation-cycles"):
        raise ValueError("variant must be 'poisson' or 'permutation-cycles'")
    cycles = variant == "permutation-cycles"
    lam_of = (lambda n: math.log(n)) if cycles else (lambda lam: float(lam))
    if not cycles and any(lam < 10 for lam in lambdas):
        raise ValueError("poisson scenario needs lambda >= 10")
    if cycles and any(n != int(n) or n < 3 for n in lambdas):
        raise ValueError("permutation-cycles indices are permutation sizes n >= 3")

    def charfn_of(idx):
        if cycles:
            return CharFn(1, lambda t: cycles_charfn(int(idx), t))
        lam = lam_of(idx)
        return CharFn(1, lambda t: poisson_charfn(lam, t))

    def exact(idx, region):
        lam = lam_of(idx)
        c = lam ** (1.0 / 3.0)
        a, b = region.params
        lo = math.floor(lam + a * c) + 1
        hi = math.ceil(lam + b * c) - 1
        if hi < lo:
            return 0.0
        if cycles:
            pmf = cycles_pmf(int(idx), kmax=max(hi, 1))
            return float(math.fsum(pmf[max(lo, 0) : hi + 1]))
        # everything outside lam +- 12 sqrt(lam) is below double precision
        guard = 12.0 * math.sqrt(lam) + 12.0
        lo = max(lo, int(lam - guard), 0)
        hi = min(hi, int(lam + guard) + 1)
        if hi < lo:
            return 0.0
        k = np.arange(lo, hi + 1)
        return float(math.fsum(stats.poisson.pmf(k, lam)))

    def sampler(idx, rng, size):
        lam = lam_of(idx)
        if cycles:
            counts = sample_cycle_counts(int(idx), rng, size)
        else:
            counts = rng.poisson(lam, size)
        return (counts - lam) / lam ** (1.0 / 3.0)

    def domination(k):
        return lambda t: np.exp(-0.25 * np.asarray(t, float) ** 2)

    return Scenario(
        name="cycles" if cycles else "poisson",
        dim=1,
        index_set=tuple(lambdas),
        charfn_of=charfn_of,
        scaling=ScalingSeq.scalar(1, lambda idx: lam_of(idx) ** (1.0 / 6.0)),
        reference=ReferenceLaw.gaussian_real(),
        exact_prob=exact,
        sampler=sampler,
        domination_h=domination,
        discrete=True,
        variant=variant,
    )


# ---------------------------------------------------------------------------
# Gamma shift


def _gamma2_interval(x: float, y: float) -> float:
    # P[x < G < y] for G ~ Gamma(2, 1)
    x, y = max(x, 0.0), max(y, 0.0)
    if y <= x:
        return 0.0
    d = y - x
    return math.exp(-x) * (-(1.0 + x) * math.expm1(-d) - d * math.exp(-d))


def gamma_shift_scenario(ns: Sequence[float], c: float = 0.0) -> Scenario:
    """``X_n = n (E_1 + E_2)`` with ``A_n = n``, optionally shifted by ``c n``.

    Without a shift the local limit is 0 (the Gamma(2) density vanishes at
    the origin); the shift ``alpha_n = c n`` targets the density ``c e^{-c}``.
    """
    if c < 0:
        raise ValueError("c must be nonnegative")

    def charfn_of(n):
        return CharFn(1, lambda t: 1.0 / (1.0 - 1j * n * t) ** 2, lambda r: 1.0 / (1.0 + (n * r) ** 2))

    def exact(n, region):
        a, b = region.params
        return _gamma2_interval(a / n, b / n)

    def sampler(n, rng, size):
        return float(n) * rng.gamma(2.0, 1.0, size)

    base = Scenario(
        name="gamma-shift",
        dim=1,
        index_set=tuple(ns),
        charfn_of=charfn_of,
        scaling=ScalingSeq.scalar(1, lambda n: float(n)),
        reference=ReferenceLaw.exp_sum(),
        exact_prob=exact,
        sampler=sampler,
        discrete=False,
        info={"c": c},
    )
    if c == 0:
        return base
    return shift_mean(base, c, lambda n: c * float(n))
