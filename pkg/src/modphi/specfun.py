"""Scalar special functions used across the scenarios.

Everything here is hand-written on top of :mod:`math` and :mod:`numpy`:
log-Gamma, Bessel I of real order, the Barnes G function, the Gauss series
2F1(a, b; 1; x), the cosine integral, the Dickman-de Bruijn function and the
Riemann zeta function to the right of the line Re s = 1.

Complex inputs and outputs use the native :class:`complex` type (and complex
numpy arrays where a function is vectorised).  Non-finite results raise
:class:`SpecialFunctionError` rather than leak NaN.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from . import _accel
from ._accel import njit

__all__ = [
    "EULER_GAMMA",
    "LOG_GLAISHER",
    "PrecisionPolicy",
    "SpecialFunctionError",
    "log_gamma",
    "bessel_i",
    "bessel_i_log_reduced",
    "barnes_g_log",
    "hyp2f1_c1",
    "cosine_integral",
    "dickman_rho",
    "dickman_table",
    "zeta_real",
    "zeta_complex",
    "zeta_tail",
]

EULER_GAMMA = 0.57721566490153286061
# log of the Glaisher-Kinkelin constant, 1/12 - zeta'(-1)
LOG_GLAISHER = 0.24875447703378426
_LOG_2PI = math.log(2.0 * math.pi)

# B_2, B_4, ..., B_24
_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
)


class SpecialFunctionError(ArithmeticError):
    """Raised on poles, domain violations and non-convergence."""


@dataclass(frozen=True)
class PrecisionPolicy:
    """Accuracy knobs shared by the series-based functions.

    Parameters
    ----------
    rel_tol : float
        Series are truncated once the next term is below ``rel_tol`` times
        the running sum.
    max_terms : int
        Hard cap on the number of series terms.
    """

    rel_tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


DEFAULT_POLICY = PrecisionPolicy()


def _check_finite(value, name: str):
    if not np.all(np.isfinite(value)):
        raise SpecialFunctionError(f"{name} produced a non-finite value")
    return value


def _is_nonpositive_integer(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


# ---------------------------------------------------------------------------
# log Gamma


def _stirling_log_gamma(z: np.ndarray) -> np.ndarray:
    # valid for |z| >= 15 in the right half plane
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    power = inv
    for k, b in enumerate(_BERNOULLI_EVEN[:10], start=1):
        series = series + b / (2 * k * (2 * k - 1)) * power
        power = power * inv2
    return (z - 0.5) * np.log(z) - z + 0.5 * _LOG_2PI + series


def log_gamma(z):
    """Principal branch of log Gamma.

    Parameters
    ----------
    z : complex or array_like of complex
        Argument, not a nonpositive integer.

    Returns
    -------
    complex or ndarray
        ``log Gamma(z)``.  The branch is the one obtained by upward
        recursion from the Stirling region, continuous off the negative
        real axis and real for real positive ``z``.
    """
    scalar = np.ndim(z) == 0
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(_is_nonpositive_integer(arr)):
        raise SpecialFunctionError("log_gamma has a pole at nonpositive integers")
    shift = int(max(0, math.ceil(15.0 - float(arr.real.min()))))
    acc = np.zeros_like(arr)
    w = arr.copy()
    for _ in range(shift):
        acc = acc + np.log(w)
        w = w + 1.0
    out = _stirling_log_gamma(w) - acc
    # keep exact zero imaginary part on the positive real axis
    out = np.where((arr.imag == 0) & (arr.real > 0), out.real + 0j, out)
    _check_finite(out, "log_gamma")
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Bessel I


def bessel_i_log_reduced(nu: float, log_z: float, policy: PrecisionPolicy = DEFAULT_POLICY) -> tuple[float, float]:
    """Bessel I split as ``(z/2)**nu * R`` with R returned separately.

    Working from ``log z`` lets callers handle arguments such as
    ``exp(-10**4)`` that underflow in double precision.

    Parameters
    ----------
    nu : float
        Order, ``nu >= -1/2``.
    log_z : float
        Natural log of the argument.

    Returns
    -------
    log_prefactor : float
        ``nu * log(z / 2)``.
    reduced : float
        ``sum_m (z/2)**(2m) / (m! Gamma(nu + m + 1))``.
    """
    if nu < -0.5:
        raise SpecialFunctionError("bessel_i requires nu >= -1/2")
    log_half = log_z - math.log(2.0)
    q = math.exp(2.0 * log_half) if log_half > -350.0 else 0.0
    term = math.exp(-math.lgamma(nu + 1.0))
    total = term
    for m in range(1, policy.max_terms + 1):
        term *= q / (m * (nu + m))
        total += term
        if abs(term) <= policy.rel_tol * abs(total):
            break
    else:
        raise SpecialFunctionError("bessel_i series did not converge")
    return nu * log_half, total


def bessel_i(nu: float, z: float, policy: PrecisionPolicy = DEFAULT_POLICY) -> float:
    """Modified Bessel function of the first kind from its Taylor series.

    Parameters
    ----------
    nu : float
        Order, ``nu >= -1/2``.
    z : float
        Argument, ``z >= 0``.

    Returns
    -------
    float
        ``sum_{m>=0} (z/2)**(nu+2m) / (m! Gamma(nu+m+1))``.
    """
    if z < 0:
        raise SpecialFunctionError("bessel_i requires z >= 0")
    if z == 0.0:
        if nu == 0.0:
            return 1.0
        if nu > 0.0:
            return 0.0
        raise SpecialFunctionError("bessel_i diverges at z=0 for negative order")
    log_pre, reduced = bessel_i_log_reduced(nu, math.log(z), policy)
    return float(_check_finite(math.exp(log_pre) * reduced, "bessel_i"))


# ---------------------------------------------------------------------------
# Barnes G


def _barnes_asymptotic(z: np.ndarray) -> np.ndarray:
    # log G(z + 1) for large |z|
    logz = np.log(z)
    z2 = z * z
    out = 0.5 * z2 * logz - 0.75 * z2 + 0.5 * z * _LOG_2PI - LOG_GLAISHER + 1.0 / 12.0 - logz / 12.0
    inv2 = 1.0 / z2
    power = inv2
    for k in range(1, 10):
        out = out + _BERNOULLI_EVEN[k] / (4.0 * k * (k + 1)) * power
        power = power * inv2
    return out


def barnes_g_log(z):
    """Logarithm of the Barnes G function.

    The argument is shifted up to ``Re z >= 20`` with
    ``G(z+1) = Gamma(z) G(z)``, accumulating log Gamma terms so that the
    branch stays continuous along the shift path, then the large-argument
    expansion of ``log G`` is applied.

    Parameters
    ----------
    z : complex or array_like of complex
        Not a nonpositive integer.

    Returns
    -------
    complex or ndarray
        ``log G(z)`` with ``log G(1) = log G(2) = 0``.
    """
    scalar = np.ndim(z) == 0
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(_is_nonpositive_integer(arr)):
        raise SpecialFunctionError("barnes_g_log has a zero of G at nonpositive integers")
    shift = int(max(0, math.ceil(20.0 - float(arr.real.min()))))
    acc = np.zeros_like(arr)
    w = arr.copy()
    for _ in range(shift):
        acc = acc + log_gamma(w)
        w = w + 1.0
    out = _barnes_asymptotic(w - 1.0) - acc
    out = np.where((arr.imag == 0) & (arr.real > 0), out.real + 0j, out)
    # small positive integers exactly: G(n) = prod_{k < n-1} k!
    for idx in np.flatnonzero((arr.imag == 0) & (arr.real >= 1) & (arr.real <= 30) & (arr.real == np.round(arr.real))):
        n = int(arr.real[idx])
        out[idx] = sum(math.log(math.factorial(k)) for k in range(1, n - 1))
    _check_finite(out, "barnes_g_log")
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# 2F1(a, b; 1; x)


def hyp2f1_c1(a, b, x, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Gauss hypergeometric series with third parameter equal to 1.

    Parameters
    ----------
    a, b : complex or array_like of complex
        Upper parameters.
    x : float or array_like of float
        Argument in ``[0, 1)``; broadcasts with ``a`` and ``b``.

    Returns
    -------
    complex or ndarray
        ``sum_m (a)_m (b)_m / (m!)**2 x**m``.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0) or np.any(x_arr >= 1.0):
        raise SpecialFunctionError("hyp2f1_c1 requires 0 <= x < 1")
    scalar = np.ndim(a) == 0 and np.ndim(b) == 0 and x_arr.ndim == 0
    a_arr, b_arr, x_arr = np.broadcast_arrays(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex), x_arr)
    term = np.ones(a_arr.shape, dtype=complex)
    total = term.copy()
    if np.any(x_arr != 0.0):
        for m in range(policy.max_terms):
            # IEEE complex multiplication commutes, so the result is symmetric in (a, b) bitwise
            term = term * ((a_arr + m) * (b_arr + m)) * (x_arr / ((m + 1.0) ** 2))
            total = total + term
            # the term ratio tends to x, so the neglected tail is about term * x / (1 - x)
            if np.all(np.abs(term) * x_arr <= 0.1 * (1.0 - x_arr) * policy.rel_tol * np.abs(total)):
                break
        else:
            raise SpecialFunctionError("hyp2f1_c1 did not converge")
    _check_finite(total, "hyp2f1_c1")
    return complex(total.reshape(-1)[0]) if scalar else total


# ---------------------------------------------------------------------------
# Cosine integral

_CI_SWITCH = 8.0


def _ci_series(t: np.ndarray) -> np.ndarray:
    t2 = t * t
    term = np.ones_like(t)
    total = np.zeros_like(t)
    for k in range(1, 60):
        term = -term * t2 / ((2 * k - 1) * (2 * k))
        total = total + term / (2 * k)
    return EULER_GAMMA + np.log(t) + total


def _ci_continued_fraction(t: np.ndarray) -> np.ndarray:
    # modified Lentz evaluation of E1(i t); Ci(t) = -Re E1(i t)
    tiny = 1e-300
    b = 1.0 + 1j * t
    c = np.full(t.shape, 1.0 / tiny, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 200):
        a = -float(i * i)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    h = (np.cos(t) - 1j * np.sin(t)) * h
    return -h.real


def cosine_integral(t):
    """Cosine integral ``Ci(t) = gamma + log t + int_0^t (cos u - 1)/u du``.

    A power series is used for ``t <= 8``.  Beyond that the function is
    read off the continued fraction of ``E1(i t)``, which is the convergent
    form of the large-``t`` expansion ``sin t / t - cos t / t**2 + ...``.

    Parameters
    ----------
    t : float or array_like
        Strictly positive argument.
    """
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(arr <= 0):
        raise SpecialFunctionError("cosine_integral requires t > 0")
    out = np.empty_like(arr)
    small = arr <= _CI_SWITCH
    if np.any(small):
        out[small] = _ci_series(arr[small])
    if np.any(~small):
        out[~small] = _ci_continued_fraction(arr[~small])
    _check_finite(out, "cosine_integral")
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Dickman-de Bruijn rho

_RHO_STEPS = 1024
_rho_lock = threading.Lock()
_rho_table: np.ndarray = np.ones(_RHO_STEPS + 1)


@njit
def _rho_extend(old: np.ndarray, steps: int, new_len: int) -> np.ndarray:
    # rho(u) = rho(u_i) - int_{u_i}^{u} rho(v-1)/v dv, Simpson per step with the
    # midpoint lag value from a cubic stencil kept inside one unit interval
    h = 1.0 / steps
    out = np.empty(new_len)
    n_old = old.shape[0]
    for i in range(n_old):
        out[i] = old[i]
    for i in range(n_old - 1, new_len - 1):
        u0 = i * h
        j = i - steps  # lag index of u0 - 1
        # midpoint lag value rho(u0 - 1 + h/2)
        cell = j // steps
        lo = cell * steps
        s = j - 1
        if s < lo:
            s = lo
        if s + 3 > lo + steps:
            s = lo + steps - 3
        x = (j + 0.5 - s)
        y0 = out[s]
        y1 = out[s + 1]
        y2 = out[s + 2]
        y3 = out[s + 3]
        mid = (
            -y0 * (x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0
            + y1 * x * (x - 2.0) * (x - 3.0) / 2.0
            - y2 * x * (x - 1.0) * (x - 3.0) / 2.0
            + y3 * x * (x - 1.0) * (x - 2.0) / 6.0
        )
        g0 = out[j] / u0
        gm = mid / (u0 + 0.5 * h)
        g1 = out[j + 1] / (u0 + h)
        out[i + 1] = out[i] - h * (g0 + 4.0 * gm + g1) / 6.0
    return out


def dickman_table(u_max: float) -> np.ndarray:
    """Grid values of rho on ``[0, u_max]`` with step 1/1024.

    The table is memoised and only ever replaced by a longer copy, so
    concurrent readers always see a complete immutable array.
    """
    global _rho_table
    need = int(math.ceil(u_max * _RHO_STEPS)) + 2
    table = _rho_table
    if table.shape[0] >= need:
        return table
    with _rho_lock:
        if _rho_table.shape[0] < need:
            kernel = _rho_extend if _accel.USE_NUMBA else _rho_extend.py_func
            new = kernel(_rho_table, _RHO_STEPS, max(need, 2 * _rho_table.shape[0]))
            new.setflags(write=False)
            _rho_table = new
        return _rho_table


def dickman_rho(u):
    """Dickman-de Bruijn function.

    ``rho = 1`` on ``[0, 1]`` and ``u rho'(u) = -rho(u - 1)`` beyond.
    Values come from a memoised grid of step 1/1024 and are linearly
    interpolated between nodes.

    Parameters
    ----------
    u : float or array_like
        Nonnegative argument.
    """
    scalar = np.ndim(u) == 0
    arr = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(arr < 0):
        raise SpecialFunctionError("dickman_rho requires u >= 0")
    table = dickman_table(float(arr.max()))
    pos = arr * _RHO_STEPS
    idx = np.minimum(np.floor(pos).astype(np.int64), table.shape[0] - 2)
    frac = pos - idx
    out = table[idx] * (1.0 - frac) + table[idx + 1] * frac
    out = np.where(arr <= 1.0, 1.0, out)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Riemann zeta for Re s > 1


def zeta_complex(sigma: float, t=0.0):
    """Riemann zeta at ``sigma + i t`` by Euler-Maclaurin summation.

    Parameters
    ----------
    sigma : float
        Real part, ``sigma > 1``.
    t : float or array_like
        Imaginary part(s).

    Returns
    -------
    complex or ndarray
    """
    if not sigma > 1.0:
        raise SpecialFunctionError("zeta requires sigma > 1")
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    s = sigma + 1j * tt
    n_terms = int(20 + math.ceil(float(np.abs(tt).max()) if tt.size else 0.0))
    k = np.arange(1, n_terms, dtype=float)
    # head sum, vectorised over t
    head = np.exp(-np.outer(s, np.log(k))).sum(axis=1) if n_terms > 1 else np.zeros_like(s)
    big_n = float(n_terms)
    out = head + big_n ** (1.0 - s) / (s - 1.0) + 0.5 * big_n ** (-s)
    # Bernoulli correction terms
    rising = s.copy()
    power = big_n ** (-s - 1.0)
    fact = 2.0
    for j, b in enumerate(_BERNOULLI_EVEN, start=1):
        out = out + b / fact * rising * power
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        power = power / (big_n * big_n)
        fact = fact * (2 * j + 1) * (2 * j + 2)
    _check_finite(out, "zeta_complex")
    return complex(out[0]) if scalar else out


def zeta_real(sigma: float) -> float:
    """Riemann zeta at real ``sigma > 1``; same code path as :func:`zeta_complex`."""
    return zeta_complex(sigma, 0.0).real


def zeta_tail(s: float, m):
    """Tail sums ``sum_{k >= m} k**(-s)`` for real ``s > 1`` and integers ``m >= 1``.

    Euler-Maclaurin from ``max(m, 16)`` with the missing head terms added
    directly.  Vectorised over ``m``.
    """
    if not s > 1.0:
        raise SpecialFunctionError("zeta_tail requires s > 1")
    scalar = np.ndim(m) == 0
    mm = np.atleast_1d(np.asarray(m, dtype=float))
    if np.any(mm < 1):
        raise SpecialFunctionError("zeta_tail requires m >= 1")
    start = np.maximum(mm, 16.0)
    out = start ** (1.0 - s) / (s - 1.0) + 0.5 * start ** (-s)
    rising = s
    power = start ** (-s - 1.0)
    fact = 2.0
    for j, b in enumerate(_BERNOULLI_EVEN[:8], start=1):
        out = out + b / fact * rising * power
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        power = power / (start * start)
        fact = fact * (2 * j + 1) * (2 * j + 2)
    for k in range(15, 0, -1):
        out = out + np.where(mm <= k, float(k) ** (-s), 0.0)
    return float(out[0]) if scalar else out
