"""Integer and prime utilities.

Sieving, squarefree tests, exact Dedekind sums, coprime-pair enumeration,
counts of irreducible polynomials over finite fields and a comparison of
sums over primes with the matching logarithmic integral.

Exact rationals are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np
from scipy import integrate

from . import _accel
from ._accel import njit
from .limits import CapacityError, check_capacity

__all__ = [
    "CoprimePair",
    "PrimeSumComparison",
    "sieve_primes",
    "mobius",
    "mobius_squared",
    "squarefree_indicator",
    "totients",
    "dedekind_sum",
    "dedekind_sum_bruteforce",
    "dedekind_numerators",
    "enumerate_coprime_pairs",
    "count_coprime_pairs",
    "count_irreducible",
    "prime_sum_vs_integral",
]


@dataclass(frozen=True)
class CoprimePair:
    d: int
    c: int

    def __post_init__(self) -> None:
        if not (0 < self.d < self.c and math.gcd(self.d, self.c) == 1):
            raise ValueError("need 0 < d < c with gcd(d, c) = 1")


# ---------------------------------------------------------------------------
# sieve


@njit
def _sieve_loop(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=np.bool_)
    flags[0] = False
    flags[1] = False
    i = 2
    while i * i <= limit:
        if flags[i]:
            for j in range(i * i, limit + 1, i):
                flags[j] = False
        i += 1
    return flags


def _sieve_numpy(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return flags


def sieve_primes(limit: int, use_numba: bool | None = None) -> np.ndarray:
    """Primes up to ``limit`` in ascending order.

    Parameters
    ----------
    limit : int
        Upper bound, at least 2 and at most the ``sieve`` capacity.
    use_numba : bool, optional
        Force a backend; defaults to the import-time selection.
    """
    limit = int(limit)
    if limit < 2:
        raise ValueError("limit must be at least 2")
    check_capacity("sieve", limit)
    use = _accel.USE_NUMBA if use_numba is None else use_numba
    flags = _sieve_loop(limit) if use else _sieve_numpy(limit)
    return np.flatnonzero(flags).astype(np.int64)


# ---------------------------------------------------------------------------
# Moebius and friends


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(n: int) -> int:
    """Moebius function by trial division."""
    if n < 1:
        raise ValueError("n must be positive")
    exps = _factor(n)
    if any(e > 1 for e in exps.values()):
        return 0
    return -1 if len(exps) % 2 else 1


def mobius_squared(n: int) -> int:
    """1 if ``n`` is squarefree, else 0."""
    if n < 1:
        raise ValueError("n must be positive")
    return 1 if mobius(n) != 0 else 0


def squarefree_indicator(limit: int) -> np.ndarray:
    """Boolean array ``a`` with ``a[k]`` true iff ``k`` is squarefree, for ``k <= limit``."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[0] = False
    for p in sieve_primes(max(2, math.isqrt(limit))):
        flags[p * p :: p * p] = False
    return flags


def totients(limit: int) -> np.ndarray:
    """Euler phi of ``0..limit`` by a multiplicative sieve."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in sieve_primes(max(2, limit)):
        phi[p::p] -= phi[p::p] // p
    return phi


# ---------------------------------------------------------------------------
# Dedekind sums


@njit
def _dedekind_12c(d: int, c: int) -> int:
    # 12 c s(d, c) via the telescoped reciprocity law along Euclid's algorithm
    a = c
    b = d
    x0 = 0
    x1 = 1
    alt = 0
    sign = 1
    steps = 0
    while b != 0:
        q = a // b
        alt += sign * q
        sign = -sign
        steps += 1
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
    inv = x0 % c
    return c * (alt - 1 - 2 * (steps % 2)) + d + inv


def dedekind_sum(d: int, c: int) -> Fraction:
    """Exact Dedekind sum ``s(d, c)``.

    ``s(d, c) = sum_{0<k<c} ((k/c)) ((kd/c))`` with the sawtooth
    ``((x)) = x - floor(x) - 1/2`` (zero on integers).  The reciprocity law
    telescoped along the Euclidean algorithm for ``c/d`` gives

    ``12 c s(d, c) = c (sum_i (-1)**i q_i - 1 - 2 [n odd]) + d + d'``

    where ``q_0..q_{n-1}`` are the partial quotients and ``d'`` is the
    inverse of ``d`` modulo ``c``.  Everything is integer arithmetic.

    Parameters
    ----------
    d, c : int
        ``0 < d < c`` and ``gcd(d, c) = 1``.
    """
    d, c = int(d), int(c)
    CoprimePair(d, c)
    return Fraction(int(_dedekind_12c.py_func(d, c)), 12 * c)


def dedekind_sum_bruteforce(d: int, c: int) -> Fraction:
    """Direct O(c) evaluation of the defining sum (test oracle)."""
    d, c = int(d), int(c)
    CoprimePair(d, c)
    check_capacity("dedekind_bruteforce", c)
    k = np.arange(1, c, dtype=np.int64)
    r = (k * d) % c
    # ((k/c)) ((kd/c)) = (2k - c)(2r - c) / (4 c^2); r is never 0 here
    total = int(np.sum((2 * k - c) * (2 * r - c)))
    return Fraction(total, 4 * c * c)


@njit
def _dedekind_block_loop(c_lo: int, c_hi: int, total: int):
    nums = np.empty(total, dtype=np.int64)
    dens = np.empty(total, dtype=np.int64)
    pos = 0
    for c in range(c_lo, c_hi):
        for d in range(1, c):
            a = c
            b = d
            while b != 0:
                a, b = b, a % b
            if a == 1:
                nums[pos] = _dedekind_12c(d, c)
                dens[pos] = 12 * c
                pos += 1
    return nums, dens


def _dedekind_block_numpy(c_lo: int, c_hi: int):
    nums = []
    dens = []
    for c in range(c_lo, c_hi):
        d = np.arange(1, c, dtype=np.int64)
        d = d[np.gcd(d, c) == 1]
        a = np.full_like(d, c)
        b = d.copy()
        x0 = np.zeros_like(d)
        x1 = np.ones_like(d)
        alt = np.zeros_like(d)
        sign = np.ones_like(d)
        steps = np.zeros_like(d)
        live = b != 0
        while np.any(live):
            bb = np.where(live, b, 1)
            q = np.where(live, a // bb, 0)
            alt += sign * q
            sign = np.where(live, -sign, sign)
            steps += live
            a, b = np.where(live, b, a), np.where(live, a - q * b, b)
            x0, x1 = np.where(live, x1, x0), np.where(live, x0 - q * x1, x1)
            live = b != 0
        inv = x0 % c
        nums.append(c * (alt - 1 - 2 * (steps % 2)) + d + inv)
        dens.append(np.full_like(d, 12 * c))
    if not nums:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(nums), np.concatenate(dens)


def dedekind_numerators(c_lo: int, c_hi: int, use_numba: bool | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Exact Dedekind sums for all coprime ``0 < d < c`` with ``c_lo <= c < c_hi``.

    Returns
    -------
    nums, dens : ndarray of int64
        ``s(d, c) = nums / dens`` with ``dens = 12 c``, ordered by ``c``
        then ``d``.
    """
    c_lo = max(2, int(c_lo))
    use = _accel.USE_NUMBA if use_numba is None else use_numba
    if use:
        total = int(totients(max(c_hi - 1, 2))[c_lo:c_hi].sum())
        return _dedekind_block_loop(c_lo, c_hi, total)
    return _dedekind_block_numpy(c_lo, c_hi)


# ---------------------------------------------------------------------------
# coprime pairs


def count_coprime_pairs(N: int) -> int:
    """``#{(d, c): 0 < d < c < N, gcd(d, c) = 1} = sum_{c=2}^{N-1} phi(c)``."""
    if N < 3:
        raise ValueError("N must be at least 3")
    return int(totients(N - 1)[2:].sum())


def enumerate_coprime_pairs(N: int) -> Iterator[CoprimePair]:
    """Stream every coprime pair ``0 < d < c < N`` once, ordered by ``c`` then ``d``.

    Use :func:`count_coprime_pairs` for the count without iterating.
    """
    if N < 3:
        raise ValueError("N must be at least 3")
    check_capacity("coprime_pairs", N)
    for c in range(2, N):
        for d in range(1, c):
            if math.gcd(d, c) == 1:
                yield CoprimePair(d, c)


# ---------------------------------------------------------------------------
# irreducible polynomials


def count_irreducible(q: int, j: int) -> int:
    """Number of monic irreducible polynomials of degree ``j`` over F_q.

    ``Pi_q(j) = (1/j) sum_{d | j} mu(d) q**(j/d)``.

    Raises
    ------
    OverflowError
        If ``q**j`` does not fit in a signed 64-bit integer.
    """
    if q < 2 or j < 1:
        raise ValueError("need q >= 2 and j >= 1")
    if q**j >= 2**63:
        raise OverflowError("q**j exceeds the 64-bit range")
    total = 0
    for d in range(1, j + 1):
        if j % d == 0:
            total += mobius(d) * q ** (j // d)
    if total % j:
        raise ArithmeticError("necklace count is not an integer; q is not a prime power?")
    return total // j


# ---------------------------------------------------------------------------
# sums over primes


@dataclass(frozen=True)
class PrimeSumComparison:
    prime_sum: float
    integral: float
    discrepancy: float
    envelope: float


def prime_sum_vs_integral(
    f: Callable[[np.ndarray], np.ndarray],
    y: float,
    x: float,
    fprime: Callable[[np.ndarray], np.ndarray] | None = None,
    power: float = 2.0,
) -> PrimeSumComparison:
    """Compare ``sum_{y <= p <= x} f(p)`` with ``int_y^x f(u) du / log u``.

    The envelope is ``x|f(x)|/(log x)**A + y|f(y)|/(log y)**A
    + int_y^x |f'(u)| u du/(log u)**A`` with ``A = power``; the discrepancy
    is expected to be at most a constant multiple of it.

    Parameters
    ----------
    f : callable
        Vectorised smooth function on ``[y, x]``.
    y, x : float
        ``2 <= y < x``.
    fprime : callable, optional
        Derivative of ``f``; a central difference is used when omitted.
    """
    if not (2 <= y < x):
        raise ValueError("need 2 <= y < x")
    check_capacity("sieve", x)
    primes = sieve_primes(int(x))
    primes = primes[primes >= y]
    total = float(np.sum(f(primes.astype(float)))) if primes.size else 0.0

    # integrate in v = log u so oscillations in log u stay resolved
    def g(v):
        u = math.exp(v)
        return float(f(np.array([u]))[0]) * u / v

    lo, hi = math.log(y), math.log(x)
    integral = integrate.quad(g, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-11)[0]

    if fprime is None:

        def fprime(u):
            h = 1e-6 * u
            return (f(u + h) - f(u - h)) / (2 * h)

    def gd(v):
        u = math.exp(v)
        return abs(float(fprime(np.array([u]))[0])) * u * u / v**power

    tail = integrate.quad(gd, lo, hi, limit=400)[0]
    fx = abs(float(f(np.array([float(x)]))[0]))
    fy = abs(float(f(np.array([float(y)]))[0]))
    envelope = x * fx / math.log(x) ** power + y * fy / math.log(y) ** power + tail
    return PrimeSumComparison(total, integral, total - integral, envelope)


__all__ += ["CapacityError"]
