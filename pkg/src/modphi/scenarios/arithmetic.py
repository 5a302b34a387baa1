"""Arithmetic scenarios.

Dedekind sums over coprime pairs, differences of two zeta-distributed
variables, random squarefree integers and two lattice-valued relatives
for which the local limit fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .. import arith, fourier, specfun
from ..engine import ReferenceLaw, ScalingSeq, Scenario, linear_change, trend
from ..fourier import CharFn, Region
from ..limits import check_capacity


__all__ = [
    "dedekind_values",
    "dedekind_scenario",
    "default_tau",
    "vardi_bound_check",
    "zeta_dist_interval",
    "coprime_ratio_sum",
    "zeta_dist_scenario",
    "squarefree_limit_charfn",
    "squarefree_reference",
    "squarefree_charfn",
    "squarefree_scenario",
    "eta_constant",
    "one_sided_limit",
    "SQUAREFREE_VARIANTS",
]

SQUAREFREE_VARIANTS = ("symmetrized", "one-sided", "fq", "lattice")


# ---------------------------------------------------------------------------
# Dedekind sums


@lru_cache(maxsize=4)
def _dedekind_table(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    nums, dens = arith.dedekind_numerators(2, n_max)
    return nums, dens


def dedekind_values(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact Dedekind sums over ``Omega_N = {0 < d < c < N, gcd(d, c) = 1}``.

    Returns ``(nums, dens)`` with ``s(d, c) = nums / dens``.
    """
    if N < 3:
        raise ValueError("N must be at least 3")
    check_capacity("dedekind_scenario", N)
    nums, dens = _dedekind_table(int(N))
    return nums, dens


def _dedekind_floats(N: int) -> np.ndarray:
    nums, dens = dedekind_values(N)
    return nums / dens


def _dedekind_charfn(N: int) -> CharFn:
    s = _dedekind_floats(N)

    def ev(t):
        out = np.empty(t.shape, dtype=complex)
        for i in range(0, t.size, 16):
            # symmetric law: the characteristic function is real
            out[i : i + 16] = np.cos(np.outer(t[i : i + 16], s)).mean(axis=1)
        return out

    return CharFn(1, ev)


def default_tau(n: int) -> float:
    """Default rescaling ``(log N)**(1/4)``: tends to infinity slower than ``log N``."""
    return math.log(n) ** 0.25


def dedekind_scenario(ns: Sequence[int], taus: Sequence[float] | None = None) -> Scenario:
    """Dedekind sums ``X_N = s(d, c)`` on ``Omega_N``, rescaled by ``tau_N``.

    The base sequence has ``A_N = log N / (2 pi)``; dividing by ``tau_N``
    (default ``(log N)**(1/4)``) gives ``A_N = log N / (2 pi tau_N)`` and a
    Cauchy limit.  Pass ``taus`` of ones for the unscaled statement.

    Notes
    -----
    Since the probability is at most 1, the scaled value never exceeds
    ``log N / (2 pi tau_N)``.  With ``tau_N = sqrt(log N)`` that cap is
    0.45 at ``N = 3000``, so the slower default is used.
    """
    ns = tuple(int(n) for n in ns)
    for n in ns:
        check_capacity("dedekind_scenario", n)
    if taus is None:
        taus = [default_tau(n) for n in ns]
    tau_of = dict(zip(ns, (float(t) for t in taus)))

    def exact(n, region):
        s = _dedekind_floats(n)
        a, b = region.params
        return float(np.count_nonzero((s > a) & (s < b))) / s.size

    def sampler(n, rng, size):
        s = _dedekind_floats(n)
        return s[rng.integers(0, s.size, size)]

    base = Scenario(
        name="dedekind",
        dim=1,
        index_set=ns,
        charfn_of=_dedekind_charfn,
        scaling=ScalingSeq.scalar(1, lambda n: math.log(n) / (2 * math.pi)),
        reference=ReferenceLaw.cauchy(),
        exact_prob=exact,
        sampler=sampler,
        discrete=True,
        info={"taus": dict(tau_of)},
    )
    if all(t == 1.0 for t in tau_of.values()):
        return base
    return linear_change(base, lambda n: tau_of[n] if n in tau_of else default_tau(n))


@dataclass(frozen=True)
class VardiResult:
    """Smallest constant ``C`` per ``N`` with ``|phi_N(2 pi t)| <= C N**-|t| + N**(-1/3)``."""

    ns: tuple[int, ...]
    constants: tuple[float, ...]
    drifts_up: bool
    moduli: tuple[tuple[float, ...], ...]


def vardi_bound_check(ns: Sequence[int], t_grid: Sequence[float]) -> VardiResult:
    """Fit the constant in the Vardi-type bound on ``t`` in ``(0, 1/4]``."""
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= 0) or np.any(t > 0.25):
        raise ValueError("t_grid must lie in (0, 1/4]")
    consts, mods = [], []
    for n in ns:
        mod = np.abs(_dedekind_charfn(int(n))(2 * math.pi * t))
        c = np.max((mod - n ** (-1.0 / 3.0)) * n ** np.abs(t))
        consts.append(float(max(c, 0.0)))
        mods.append(tuple(float(v) for v in mod))
    drift = not trend(consts, slack=0.25).improving
    return VardiResult(tuple(int(n) for n in ns), tuple(consts), drift, tuple(mods))


# ---------------------------------------------------------------------------
# zeta distribution


def zeta_dist_interval(sigma: float, a: float, b: float, head: int = 1 << 17) -> tuple[float, float]:
    """``P[a < Y < b]`` for ``Y = log k - log n`` with ``k, n`` zeta(sigma) distributed.

    The double sum is taken exactly over ``n <= head`` with the inner sum
    over ``k`` in closed form through :func:`specfun.zeta_tail`; the part
    ``n > head`` uses the integral of the inner sum.

    Returns
    -------
    prob : float
    tail_bound : float
        Bound on the error of the ``n > head`` approximation.
    """
    if not 1.0 < sigma <= 2.0:
        raise ValueError("sigma must lie in (1, 2]")
    if not b > a:
        return 0.0, 0.0
    # the n > head tail below needs a >= 0; Y is symmetric with an atom at 0
    if b <= 0.0:
        return zeta_dist_interval(sigma, -b, -a, head)
    if a < 0.0:
        left, lb = zeta_dist_interval(sigma, 0.0, -a, head)
        right, rb = zeta_dist_interval(sigma, 0.0, b, head)
        atom = specfun.zeta_real(2.0 * sigma) / specfun.zeta_real(sigma) ** 2
        return left + atom + right, lb + rb
    z = specfun.zeta_real(sigma)
    n = np.arange(1, head + 1, dtype=float)
    lo = np.floor(n * math.exp(a)) + 1.0
    hi = np.ceil(n * math.exp(b))
    inner = np.where(hi > lo, specfun.zeta_tail(sigma, lo) - specfun.zeta_tail(sigma, np.maximum(hi, 1.0)), 0.0)
    body = math.fsum(n ** (-sigma) * inner)
    k = (math.exp(a * (1.0 - sigma)) - math.exp(b * (1.0 - sigma))) / (sigma - 1.0)
    tail = k * specfun.zeta_tail(2.0 * sigma - 1.0, head + 1)
    bound = 2.0 * math.exp(-a * sigma) * specfun.zeta_tail(2.0 * sigma, head + 1)
    return (body + tail) / (z * z), bound / (z * z)


def coprime_ratio_sum(sigma: float, alpha: float, beta: float) -> float:
    """``sum_{(k,n)=1, alpha < k/n < beta} (k n)**(-sigma)``.

    Removing common factors turns the unrestricted sum into this one times
    ``zeta(2 sigma)``.
    """
    p, _ = zeta_dist_interval(sigma, math.log(alpha), math.log(beta))
    z = specfun.zeta_real(sigma)
    return p * z * z / specfun.zeta_real(2.0 * sigma)


class _ZetaSampler:
    # inverse CDF of n with P[n] = n**-sigma / zeta(sigma); returns log n
    def __init__(self, sigma: float, table: int = 1 << 16):
        self.sigma = sigma
        self.z = specfun.zeta_real(sigma)
        self.tails = specfun.zeta_tail(sigma, np.arange(1, table + 2, dtype=float))
        self.table = table

    def log_n(self, rng: np.random.Generator, size: int) -> np.ndarray:
        v = (1.0 - rng.random(size)) * self.z
        # n = max{m : T(m) >= v}
        idx = np.searchsorted(-self.tails, -v, side="right")
        out = np.log(np.maximum(idx, 1).astype(float))
        far = v < self.tails[-1]
        s1 = self.sigma - 1.0
        out[far] = -np.log(v[far] * s1) / s1
        return out


def zeta_dist_scenario(sigmas: Sequence[float]) -> Scenario:
    """``Y = X_1 - X_2`` for independent zeta(sigma) variables, indexed by ``sigma``.

    ``A = 1 / (sigma - 1)``; the limit is Laplace with density 1/2 at 0.
    """
    if any(not 1.0 < s <= 2.0 for s in sigmas):
        raise ValueError("sigma must lie in (1, 2]")
    samplers: dict[float, _ZetaSampler] = {}

    def charfn_of(sigma):
        z = specfun.zeta_real(sigma)
        return CharFn(1, lambda t: np.abs(specfun.zeta_complex(sigma, t)) ** 2 / (z * z))

    def exact(sigma, region):
        a, b = region.params
        return zeta_dist_interval(sigma, a, b)[0]

    def sampler(sigma, rng, size):
        if sigma not in samplers:
            samplers[sigma] = _ZetaSampler(sigma)
        s = samplers[sigma]
        return s.log_n(rng, size) - s.log_n(rng, size)

    return Scenario(
        name="zeta-dist",
        dim=1,
        index_set=tuple(float(s) for s in sigmas),
        charfn_of=charfn_of,
        scaling=ScalingSeq.scalar(1, lambda s: 1.0 / (s - 1.0)),
        reference=ReferenceLaw.laplace(),
        exact_prob=exact,
        sampler=sampler,
        discrete=True,
    )


# ---------------------------------------------------------------------------
# squarefree model

_SMALL_T = 1e-3
_CI_MAX = 0.4720006513070787  # Ci(pi/2), the maximum of Ci on (0, inf)


def squarefree_limit_charfn(t):
    """``exp(-4 int_0^1 sin(t v / 2)**2 dv / v)``.

    Uses ``exp(-2 gamma - 2 log|t| + 2 Ci(|t|))`` for ``|t| > 1e-3`` and
    direct quadrature below, where the closed form cancels badly.
    """
    scalar = np.ndim(t) == 0
    t = np.abs(np.atleast_1d(np.asarray(t, dtype=float)))
    out = np.ones_like(t)
    big = t > _SMALL_T
    if np.any(big):
        tb = t[big]
        out[big] = np.exp(-2.0 * specfun.EULER_GAMMA - 2.0 * np.log(tb) + 2.0 * specfun.cosine_integral(tb))
    for i in np.flatnonzero(~big & (t > 0)):
        ti = t[i]
        val, _ = fourier.integrate_adaptive(lambda v: np.sin(0.5 * ti * v) ** 2 / np.where(v > 0, v, 1.0), 0.0, 1.0, abs_tol=1e-18, rel_tol=1e-13)
        out[i] = math.exp(-4.0 * val.real)
    return float(out[0]) if scalar else out


def _squarefree_phi() -> CharFn:
    bound = math.exp(-2.0 * specfun.EULER_GAMMA + 2.0 * _CI_MAX)
    return CharFn(1, lambda t: squarefree_limit_charfn(t).astype(complex),
                  lambda r: np.minimum(1.0, bound / np.maximum(r, 1e-300) ** 2))


def squarefree_reference() -> ReferenceLaw:
    """Limit law of the symmetrized squarefree model; density ``eta`` at 0."""
    phi = _squarefree_phi()

    def density(x):
        if x[0] == 0.0:
            return eta_constant().value
        return fourier.density_at(phi, x, 1e-9)

    return ReferenceLaw("squarefree-phi", phi, density)


def _dickman_reference() -> ReferenceLaw:
    # law with density exp(-gamma) rho(u) on u >= 0 (limit of the one-sided model)
    u_max = 30.0
    table = specfun.dickman_table(u_max)
    u = np.linspace(0.0, u_max, table.size)
    w = np.full(u.size, u[1] - u[0])
    w[0] = w[-1] = 0.5 * w[0]
    scale = math.exp(-specfun.EULER_GAMMA)

    def ev(t):
        return scale * np.exp(1j * np.outer(t, u)) @ (w * table)

    def density(x):
        return scale * float(specfun.dickman_rho(x[0])) if x[0] >= 0 else 0.0

    return ReferenceLaw("dickman", CharFn(1, ev), density)


@lru_cache(maxsize=8)
def _primes_upto(x: int) -> np.ndarray:
    return arith.sieve_primes(int(x))


def _irreducible_counts(q: int, n: int) -> np.ndarray:
    out = np.empty(n)
    for j in range(1, n + 1):
        if q**j < 2**63:
            out[j - 1] = arith.count_irreducible(q, j)
        else:
            out[j - 1] = sum(arith.mobius(d) * float(q) ** (j // d) for d in range(1, j + 1) if j % d == 0) / j
    return out


def squarefree_charfn(x: int, t, variant: str = "symmetrized", q: int = 2) -> np.ndarray:
    """Exact characteristic function of the unscaled variable.

    ``symmetrized``: ``prod_{p<=x} (1 - 4p/(p+1)**2 sin(t log p / 2)**2)``;
    ``one-sided``: ``prod_{p<=x} (p + exp(i t log p)) / (p + 1)``;
    ``fq``: index ``x = n`` and ``prod_j (1 - 4 q**j/(q**j+1)**2 sin(j t / 2)**2)**Pi_q(j)``;
    ``lattice``: ``prod_{j<=n} |1 + (exp(i j t) - 1) / j|**2``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if variant == "symmetrized":
        p = _primes_upto(int(x)).astype(float)
        w = 4.0 * p / (p + 1.0) ** 2
        lp = np.log(p)
        out = np.empty(t.size)
        for i in range(0, t.size, 64):
            s = np.sin(0.5 * np.outer(t[i : i + 64], lp)) ** 2
            out[i : i + 64] = np.exp(np.log1p(-w * s).sum(axis=1))
        return out.astype(complex)
    if variant == "one-sided":
        p = _primes_upto(int(x)).astype(float)
        lp = np.log(p)
        out = np.empty(t.size, dtype=complex)
        for i in range(0, t.size, 64):
            e = np.exp(1j * np.outer(t[i : i + 64], lp))
            out[i : i + 64] = np.exp(np.log((p + e) / (p + 1.0)).sum(axis=1))
        return out
    if variant == "fq":
        n = int(x)
        j = np.arange(1, n + 1, dtype=float)
        counts = _irreducible_counts(q, n)
        qj = float(q) ** j
        w = 4.0 * qj / (qj + 1.0) ** 2
        s = np.sin(0.5 * np.outer(t, j)) ** 2
        return np.exp((counts * np.log1p(-w * s)).sum(axis=1)).astype(complex)
    if variant == "lattice":
        n = int(x)
        j = np.arange(1, n + 1, dtype=float)
        e = np.exp(1j * np.outer(t, j))
        return np.exp(np.log(np.abs(1.0 + (e - 1.0) / j) ** 2).sum(axis=1)).astype(complex)
    raise ValueError(f"unknown variant {variant!r}")


def _lattice_prob(charfn, a: float, b: float) -> float:
    # P[a < X < b] for an integer-valued symmetric X from its 2 pi-periodic charfn
    lo, hi = math.floor(a) + 1, math.ceil(b) - 1
    if hi < lo:
        return 0.0
    m = np.arange(lo, hi + 1, dtype=float)
    f = lambda s: (charfn(s).real[:, None] * np.cos(np.outer(s, m))).sum(axis=1)  # noqa: E731
    val, _ = fourier.integrate_adaptive(f, 0.0, math.pi, abs_tol=1e-13, rel_tol=1e-11, initial_panels=64)
    return float(val.real) / math.pi


def _smooth_squarefree_weights(limit: int, x: int) -> np.ndarray:
    # 1/k on squarefree k <= limit whose prime factors are all <= x, else 0
    sf = arith.squarefree_indicator(limit).astype(bool)
    if x < limit:
        rough = np.zeros(limit + 1, dtype=bool)
        for p in arith.sieve_primes(limit):
            if p > x:
                rough[p::p] = True
        sf &= ~rough
    k = np.arange(limit + 1, dtype=float)
    out = np.zeros(limit + 1)
    out[1:] = np.where(sf[1:], 1.0 / k[1:], 0.0)
    return out


def squarefree_scenario(xs: Sequence[int], variant: str = "symmetrized", q: int = 2) -> Scenario:
    """Random squarefree models.

    Parameters
    ----------
    xs : sequence of int
        Prime cutoffs ``x`` (``symmetrized``, ``one-sided``) or degrees
        ``n`` (``fq``, ``lattice``).
    variant : {'symmetrized', 'one-sided', 'fq', 'lattice'}
        ``symmetrized``: ``X = sum_{p<=x} eta_p log p`` with
        ``P[eta_p = +-1] = p/(p+1)**2``, scaled by ``log p_max``.
        ``one-sided``: ``log Y = sum nu_p log p`` with ``nu_p`` Bernoulli
        ``1/(p+1)``.  ``fq``: degree-weighted analogue over F_q[X], scaled
        by ``n``.  ``lattice``: ``sum_{j<=n} (D_j - E_j)`` with
        ``P[D_j = j] = 1/j``, scaled by ``n``.
    q : int
        Field size for ``fq``.
    """
    if variant not in SQUAREFREE_VARIANTS:
        raise ValueError(f"variant must be one of {SQUAREFREE_VARIANTS}")
    xs = tuple(int(x) for x in xs)
    arith_variant = variant in ("symmetrized", "one-sided")
    if arith_variant:
        for x in xs:
            check_capacity("squarefree_x", x)
            if x < 2:
                raise ValueError("x must be at least 2")

    def log_pmax(x):
        return math.log(float(_primes_upto(x)[-1]))

    scale = log_pmax if arith_variant else (lambda n: float(n))

    def charfn_of(x):
        return CharFn(1, lambda t: squarefree_charfn(x, t, variant, q))

    exact = None
    reference = squarefree_reference()
    block = 65536
    if variant == "symmetrized":
        def sampler(x, rng, size):
            p = _primes_upto(x).astype(float)
            w = p / (p + 1.0) ** 2
            lp = np.log(p)
            out = np.empty(size)
            step = max(1, (1 << 22) // p.size)
            for i in range(0, size, step):
                m = min(step, size - i)
                u = rng.random((m, p.size))
                out[i : i + m] = (u < w).astype(float) @ lp - (u > 1.0 - w).astype(float) @ lp
            return out
    elif variant == "one-sided":
        reference = _dickman_reference()

        def sampler(x, rng, size):
            p = _primes_upto(x).astype(float)
            w = 1.0 / (p + 1.0)
            lp = np.log(p)
            out = np.empty(size)
            step = max(1, (1 << 22) // p.size)
            for i in range(0, size, step):
                m = min(step, size - i)
                out[i : i + m] = (rng.random((m, p.size)) < w).astype(float) @ lp
            return out

        def exact(x, region):
            a, b = region.params
            if b > math.log(1e7):
                raise ValueError("one-sided exact probabilities need exp(b) <= 1e7")
            limit = int(math.ceil(math.exp(b)))
            wts = _smooth_squarefree_weights(limit, x)
            k = np.arange(limit + 1, dtype=float)
            inside = (k > math.exp(a)) & (k < math.exp(b))
            p = _primes_upto(x).astype(float)
            z = math.exp(np.log1p(1.0 / p).sum())
            return math.fsum(wts[inside]) / z
    elif variant == "fq":
        counts_cache: dict[int, np.ndarray] = {}

        def sampler(n, rng, size):
            if n not in counts_cache:
                counts_cache[n] = _irreducible_counts(q, n)
            counts = counts_cache[n]
            out = np.zeros(size)
            for j in range(1, n + 1):
                qj = float(q) ** j
                w = qj / (qj + 1.0) ** 2
                c = int(round(counts[j - 1]))
                plus = rng.binomial(c, w, size)
                minus = rng.binomial(c - plus, w / (1.0 - w))
                out += j * (plus - minus)
            return out

        def exact(n, region):
            a, b = region.params
            return _lattice_prob(lambda s: squarefree_charfn(n, s, "fq", q), a, b)
    else:
        def sampler(n, rng, size):
            return _success_position_sum(n, rng, size) - _success_position_sum(n, rng, size)

        def exact(n, region):
            a, b = region.params
            return _lattice_prob(lambda s: squarefree_charfn(n, s, "lattice"), a, b)

    return Scenario(
        name="squarefree",
        dim=1,
        index_set=xs,
        charfn_of=charfn_of,
        scaling=ScalingSeq.scalar(1, scale),
        reference=reference,
        exact_prob=exact,
        sampler=sampler,
        discrete=True,
        variant=variant if variant != "fq" else f"fq(q={q})",
        mc_block=block,
        info={"q": q} if variant == "fq" else {},
    )


def _success_position_sum(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    # sum of j * B_j with B_j ~ Bernoulli(1/j), by jumping between successes
    total = np.ones(size)
    pos = np.ones(size)
    active = np.ones(size, dtype=bool)
    while np.any(active):
        idx = np.flatnonzero(active)
        u = 1.0 - rng.random(idx.size)
        nxt = np.floor(pos[idx] / u) + 1.0
        hit = nxt <= n
        total[idx[hit]] += nxt[hit]
        pos[idx[hit]] = nxt[hit]
        active[idx[~hit]] = False
    return total


@dataclass(frozen=True)
class EtaResult:
    """``eta`` from the characteristic function and from the Dickman function."""

    value: float
    via_rho: float
    residual: float


@lru_cache(maxsize=1)
def eta_constant() -> EtaResult:
    """``eta = (1/2 pi) int phi = exp(-2 gamma) int rho(u)**2 du``.

    Raises
    ------
    ArithmeticError
        If the two computations differ by more than 1e-4.
    """
    T = 4000.0
    g = math.exp(-2.0 * specfun.EULER_GAMMA)
    head, _ = fourier.integrate_adaptive(squarefree_limit_charfn, 0.0, T, abs_tol=1e-12, rel_tol=1e-12, initial_panels=2048)
    # beyond T, phi(t) = g t**-2 (1 + 2 Ci(t) + O(t**-2)) and int_T^inf 2 Ci(t) t**-2 dt = O(T**-3)
    via_phi = (head.real + g / T) / math.pi
    u_max = 24.0
    table = specfun.dickman_table(u_max)
    steps = (table.size - 1) // int(u_max)
    h = 1.0 / steps
    total = 0.0
    for k in range(int(u_max)):
        seg = table[k * steps : (k + 1) * steps + 1] ** 2
        total += h / 3.0 * (seg[0] + seg[-1] + 4.0 * seg[1:-1:2].sum() + 2.0 * seg[2:-1:2].sum())
    via_rho = g * total
    residual = abs(via_phi - via_rho)
    if residual > 1e-4:
        raise ArithmeticError(f"eta cross-check failed: {via_phi} vs {via_rho}")
    return EtaResult(via_phi, via_rho, residual)


@dataclass(frozen=True)
class OneSidedResult:
    """Limit constant for ``(log p) P[Y < e**a]`` and its finite-``x`` values."""

    a: float
    constant: float
    exact_at_x: float | None
    empirical: float | None
    stderr: float | None
    x: int | None


def one_sided_limit(a: float, x: int | None = 10_000, samples: int = 0, seed: int = 0) -> OneSidedResult:
    """``zeta(2) e**-gamma sum_{k < e**a} mu(k)**2 / k`` with optional finite-``x`` checks.

    ``exact_at_x`` is ``(log p_max) P[Y < e**a]`` summed exactly; with
    ``samples > 0`` a Monte Carlo estimate from the ``nu_p`` model is added.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    limit = int(math.ceil(math.exp(a)))
    sf = arith.squarefree_indicator(limit)
    k = np.arange(1, limit + 1)
    below = k < math.exp(a)
    s = math.fsum(1.0 / k[below & (sf[1:] > 0)])
    constant = specfun.zeta_real(2.0) * math.exp(-specfun.EULER_GAMMA) * s
    exact_x = emp = se = None
    if x is not None:
        scn = squarefree_scenario([x], "one-sided")
        det = scn.scaling.det_a(x)
        if a <= math.log(1e7):
            exact_x = det * scn.exact_prob(x, Region.interval(-1.0, a))
        if samples > 0:
            from ..engine import mc_probability

            p, err = mc_probability(scn, x, Region.interval(-1.0, a), samples, seed)
            emp, se = det * p, det * err
    return OneSidedResult(a, constant, exact_x, emp, se, x)
