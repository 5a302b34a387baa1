"""Random-matrix scenarios.

Characteristic polynomials of Haar matrices in U(n), SO(2n) and USp(2n),
the determinant-biased SO(2n) ensemble, the random Euler product model
of the zeta function and the conjectural limiting function on the
critical line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .. import arith, specfun
from ..engine import ReferenceLaw, ScalingSeq, Scenario
from ..fourier import CharFn
from ..limits import check_capacity

__all__ = [
    "FAMILIES",
    "EigenvalueAtOneError",
    "TruncationError",
    "haar_sample",
    "log_det_one_minus",
    "sample_log_det",
    "centering",
    "scale_factor",
    "phi_group",
    "ks_surrogate_charfn",
    "ks_scenario",
    "biased_so_charfn",
    "biased_so_asymptotic",
    "biased_so_scenario",
    "importance_summary",
    "ImportanceSummary",
    "stochastic_zeta_charfn",
    "stochastic_zeta_scenario",
    "ks_conjecture_phi",
    "ConjecturePhi",
]

FAMILIES = ("U", "SO", "USp")


class EigenvalueAtOneError(ArithmeticError):
    """``det(1 - g)`` vanishes to working precision."""


class TruncationError(ArithmeticError):
    """A truncated prime product misses its tail tolerance."""


def _family(name: str) -> str:
    for f in FAMILIES:
        if name.lower() == f.lower():
            return f
    raise ValueError(f"family must be one of {FAMILIES}, got {name!r}")


def matrix_size(family: str, n: int) -> int:
    return n if _family(family) == "U" else 2 * n


# ---------------------------------------------------------------------------
# Haar sampling


def _symplectic_form(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


def _haar_unitary(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def _haar_special_orthogonal(n2: int, rng: np.random.Generator, size: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((size, n2, n2)))
    d = np.sign(np.diagonal(r, axis1=1, axis2=2))
    d[d == 0] = 1.0
    q = q * d[:, None, :]
    # right multiplication by a fixed reflection maps the det = -1 coset onto SO
    flip = np.linalg.det(q) < 0
    q[flip, :, 0] *= -1.0
    return q


def _haar_symplectic(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    # quaternionic Gram-Schmidt: columns come in pairs (v, J^T conj(v))
    jt = _symplectic_form(n).T
    g = (rng.standard_normal((size, 2 * n, n)) + 1j * rng.standard_normal((size, 2 * n, n))) / math.sqrt(2.0)
    out = np.zeros((size, 2 * n, 2 * n), dtype=complex)
    for k in range(n):
        v = g[:, :, k]
        if k:
            basis = np.concatenate([out[:, :, :k], out[:, :, n : n + k]], axis=2)
            for _ in range(2):
                coef = np.einsum("sji,sj->si", basis.conj(), v)
                v = v - np.einsum("sij,sj->si", basis, coef)
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        out[:, :, k] = v
        out[:, :, n + k] = v.conj() @ jt.T
    return out


def haar_sample(family: str, n: int, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """Haar-distributed matrices of shape ``(size, N, N)``.

    Parameters
    ----------
    family : {'U', 'SO', 'USp'}
        ``U(n)`` has ``N = n``; ``SO(2n)`` and ``USp(2n)`` have ``N = 2n``.
    n : int
    rng : numpy.random.Generator
    size : int
    """
    fam = _family(family)
    if n < 1:
        raise ValueError("n must be positive")
    check_capacity("haar_size", matrix_size(fam, n))
    if fam == "U":
        return _haar_unitary(n, rng, size)
    if fam == "SO":
        return _haar_special_orthogonal(2 * n, rng, size)
    g = _haar_symplectic(n, rng, size)
    j = _symplectic_form(n)
    resid = np.max(np.abs(np.swapaxes(g, 1, 2) @ (j @ g) - j))
    if resid > 1e-10:
        raise ArithmeticError(f"symplectic form not preserved (residual {resid:.2e})")
    return g


def log_det_one_minus(g: np.ndarray, family: str = "U"):
    """``log det(1 - g)`` as a sum of principal ``log(1 - lambda)`` over eigenvalues.

    Each term has imaginary part in ``[-pi/2, pi/2]``, which is the
    Taylor-series determination at 1.  For SO and USp the value is real.

    Parameters
    ----------
    g : ndarray
        One matrix ``(N, N)`` or a stack ``(size, N, N)``.

    Raises
    ------
    EigenvalueAtOneError
    """
    fam = _family(family)
    stack = np.asarray(g)
    single = stack.ndim == 2
    if single:
        stack = stack[None]
    ev = np.linalg.eigvals(stack)
    gap = np.abs(1.0 - ev)
    if np.any(gap < 1e-12):
        raise EigenvalueAtOneError("an eigenvalue equals 1 to working precision")
    if fam == "U":
        out = np.log(1.0 - ev).sum(axis=1)
    else:
        out = np.log(gap).sum(axis=1)
    return out[0] if single else out


def _log_det_unitary_verblunsky(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    # det(1 - g) for Haar U(n) has the law of prod_k (1 - e^{i w_k} sqrt(B_k)),
    # B_0 = 1 and B_k ~ Beta(1, k); the principal logs add up the same way
    out = np.log(1.0 - np.exp(2j * math.pi * rng.random(size)))
    for k in range(1, n):
        r = np.sqrt(rng.beta(1.0, k, size))
        out += np.log(1.0 - r * np.exp(2j * math.pi * rng.random(size)))
    return out


def sample_log_det(family: str, n: int, rng: np.random.Generator, size: int, method: str = "auto") -> np.ndarray:
    """Samples of ``log det(1 - g)`` for Haar ``g``.

    ``method='eig'`` diagonalises Haar matrices; ``'verblunsky'`` (U only)
    draws the product of independent factors with the same law in O(n).
    ``'auto'`` uses eigenvalues up to ``n = 64``.
    """
    fam = _family(family)
    if method == "auto":
        method = "verblunsky" if fam == "U" and n > 64 else "eig"
    if method == "verblunsky":
        if fam != "U":
            raise ValueError("the product sampler is implemented for U(n) only")
        return _log_det_unitary_verblunsky(n, rng, size)
    if method != "eig":
        raise ValueError(f"unknown method {method!r}")
    chunk = max(1, 4096 // matrix_size(fam, n))
    parts = [log_det_one_minus(haar_sample(fam, n, rng, min(chunk, size - i)), fam) for i in range(0, size, chunk)]
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# characteristic polynomial at 1


def centering(family: str, n: int) -> float:
    """Centering ``alpha_n``: 0 for U, ``log(pi n / 2)/2`` for USp, ``log(8 pi / n)/2`` for SO."""
    fam = _family(family)
    if fam == "U":
        return 0.0
    if fam == "USp":
        return 0.5 * math.log(math.pi * n / 2.0)
    return 0.5 * math.log(8.0 * math.pi / n)


def scale_factor(family: str, n: int) -> float:
    """``sqrt(log n / 2)`` for U and ``sqrt(log(n/2))`` for SO and USp."""
    fam = _family(family)
    v = math.log(n) / 2.0 if fam == "U" else math.log(n / 2.0)
    if not v > 0:
        raise ValueError(f"scale is undefined for n = {n} in {fam}")
    return math.sqrt(v)


def phi_group(family: str, t):
    """Limiting function ``Phi_G`` as a ratio of Barnes G values.

    For U, ``t`` has shape ``(m, 2)`` (or ``(2,)``) and
    ``Phi_U = G(1 + (i t1 - t2)/2) G(1 + (i t1 + t2)/2) / G(1 + i t1)``.
    For USp, ``G(3/2)/G(3/2 + i t)``; for SO, ``G(1/2)/G(1/2 + i t)``.
    """
    fam = _family(family)
    if fam == "U":
        t = np.asarray(t, dtype=float)
        single = t.ndim == 1
        t = np.atleast_2d(t)
        t1, t2 = t[:, 0], t[:, 1]
        lg = (specfun.barnes_g_log(1.0 + 0.5 * (1j * t1 - t2)) + specfun.barnes_g_log(1.0 + 0.5 * (1j * t1 + t2))
              - specfun.barnes_g_log(1.0 + 1j * t1))
        out = np.exp(lg)
        return complex(out[0]) if single else out
    base = 1.5 if fam == "USp" else 0.5
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.exp(specfun.barnes_g_log(base) - specfun.barnes_g_log(base + 1j * tt))
    return complex(out[0]) if scalar else out


def ks_surrogate_charfn(family: str, n: int, t) -> np.ndarray:
    """``phi(A_n t) Phi_G(t)``, the large-``n`` form of ``E[exp(i t . X_n)]``.

    Valid for ``|t| <= n**(1/6)``.
    """
    fam = _family(family)
    a = scale_factor(fam, n)
    if fam == "U":
        t = np.atleast_2d(np.asarray(t, dtype=float))
        return np.exp(-0.5 * a * a * np.sum(t * t, axis=1)) * phi_group(fam, t)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.exp(-0.5 * a * a * t * t) * phi_group(fam, t)


def _phi_group_sup(family: str, k: float) -> float:
    # max |Phi_G| on |t| <= k, on a grid with a small safety factor
    fam = _family(family)
    r = np.linspace(0.0, k, 129)
    if fam == "U":
        th = np.linspace(0.0, 2 * math.pi, 73)
        pts = np.stack([np.outer(r, np.cos(th)).ravel(), np.outer(r, np.sin(th)).ravel()], axis=1)
        vals = np.abs(phi_group(fam, pts))
    else:
        vals = np.abs(phi_group(fam, r))
    return 1.05 * float(vals.max())


def ks_scenario(family: str, ns: Sequence[int], sampler_method: str = "auto") -> Scenario:
    """``X_n = log det(1 - g_n) - alpha_n`` for Haar ``g_n`` in ``G_n``.

    Complex-valued (``dim = 2``) for U, real otherwise.  The
    characteristic function is the surrogate :func:`ks_surrogate_charfn`;
    ``info['valid_radius']`` holds ``n**(1/6)`` per index.
    """
    fam = _family(family)
    ns = tuple(int(n) for n in ns)
    for n in ns:
        check_capacity("haar_size", matrix_size(fam, n))
        scale_factor(fam, n)
    dim = 2 if fam == "U" else 1

    def charfn_of(n):
        return CharFn(dim, lambda t: ks_surrogate_charfn(fam, n, t).astype(complex))

    def sampler(n, rng, size):
        v = sample_log_det(fam, n, rng, size, sampler_method)
        if fam == "U":
            return np.stack([v.real, v.imag], axis=1)
        return v - centering(fam, n)

    def domination_h(k):
        m = _phi_group_sup(fam, k)
        if dim == 2:
            return lambda t: m * np.exp(-0.5 * np.sum(np.atleast_2d(t) ** 2, axis=1))
        return lambda t: m * np.exp(-0.5 * np.asarray(t, dtype=float) ** 2)

    return Scenario(
        name="rmt",
        dim=dim,
        index_set=ns,
        charfn_of=charfn_of,
        scaling=ScalingSeq.scalar(dim, lambda n: scale_factor(fam, n)),
        reference=ReferenceLaw.gaussian_complex() if dim == 2 else ReferenceLaw.gaussian_real(),
        sampler=sampler,
        domination_h=domination_h,
        variant=fam,
        mc_block=2048 if sampler_method != "eig" and fam == "U" else 512,
        info={"valid_radius": {n: n ** (1.0 / 6.0) for n in ns}, "alpha": {n: centering(fam, n) for n in ns}},
    )


# ---------------------------------------------------------------------------
# determinant-biased SO(2n)


def biased_so_charfn(n: int, t) -> np.ndarray:
    """``E[exp(i t Y_n)]`` for ``Y_n = log det(1 - g)`` under ``det(1 - g)/2 dHaar``.

    Exact finite-``n`` product
    ``2**(2n(1+it)) prod_j G(j+n-1) G(j+it+1/2) / (G(j-1/2) G(j+it+n))``
    (Gamma functions) halved, evaluated in log space.
    """
    if n < 1:
        raise ValueError("n must be positive")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    j = np.arange(1, n + 1, dtype=float)
    const = float(np.sum(specfun.log_gamma(j + n - 1.0).real - specfun.log_gamma(j - 0.5).real))
    it = 1j * t[:, None]
    var = (specfun.log_gamma(j[None, :] + it + 0.5) - specfun.log_gamma(j[None, :] + it + n)).sum(axis=1)
    log2 = 2.0 * n * (1.0 + 1j * t) * math.log(2.0)
    return 0.5 * np.exp(log2 + const + var)


def biased_so_asymptotic(n: int, t) -> np.ndarray:
    """Large-``n`` form ``Phi_USp(t) exp(-log(n/2) t**2 / 2) (2 pi n)**(i t / 2)`` of :func:`biased_so_charfn`.

    The phase constant ``2 pi n`` is the one the exact product converges
    to; ``32 pi n`` would leave a residual factor ``4**(-i t)``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return phi_group("USp", t) * np.exp(-0.5 * math.log(n / 2.0) * t * t + 0.5j * t * math.log(2.0 * math.pi * n))


def _biased_shift(n: int) -> float:
    return 0.5 * math.log(32.0 * math.pi * n)


def biased_so_scenario(ns: Sequence[int]) -> Scenario:
    """``X_n = log det(1 - g) - log(32 pi n)/2`` with ``g`` drawn from ``det(1 - g)/2 dHaar`` on SO(2n).

    Sampling is by importance weighting: Haar samples carry weight
    ``det(1 - g)/2``.  ``A_n = sqrt(log(n/2))``; the limit is standard
    Gaussian.
    """
    ns = tuple(int(n) for n in ns)
    for n in ns:
        check_capacity("biased_so_n", n)
        if n < 3:
            raise ValueError("n must be at least 3 so that log(n/2) > 0")

    def charfn_of(n):
        shift = _biased_shift(n)
        return CharFn(1, lambda t: biased_so_charfn(n, t) * np.exp(-1j * np.asarray(t) * shift))

    def sampler(n, rng, size):
        y = sample_log_det("SO", n, rng, size, "eig")
        return y - _biased_shift(n), 0.5 * np.exp(y)

    return Scenario(
        name="rmt-biased",
        dim=1,
        index_set=ns,
        charfn_of=charfn_of,
        scaling=ScalingSeq.scalar(1, lambda n: math.sqrt(math.log(n / 2.0))),
        reference=ReferenceLaw.gaussian_real(),
        sampler=sampler,
        mc_block=512,
    )


@dataclass(frozen=True)
class ImportanceSummary:
    """Haar-sample importance weights ``det(1 - g)/2`` on SO(2n)."""

    n: int
    samples: int
    mean: float
    stderr: float
    ess: float


def importance_summary(n: int, samples: int, seed: int = 0) -> ImportanceSummary:
    """Mean, standard error and effective sample size of the biased-SO weights."""
    rng = np.random.default_rng(seed)
    w = 0.5 * np.exp(sample_log_det("SO", n, rng, samples, "eig"))
    if np.any(w < 0):
        raise ArithmeticError("negative importance weight")
    mean = float(w.mean())
    se = float(w.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("nan")
    ess = float(w.sum() ** 2 / np.sum(w * w))
    return ImportanceSummary(n, samples, mean, se, ess)


# ---------------------------------------------------------------------------
# random Euler product


@lru_cache(maxsize=8)
def _primes(x: int) -> np.ndarray:
    return arith.sieve_primes(int(x)).astype(float)


def stochastic_zeta_charfn(x: int, t) -> np.ndarray:
    """``prod_{p<=x} 2F1((i t1 + t2)/2, (i t1 - t2)/2; 1; 1/p)`` at points ``t`` of shape ``(m, 2)``."""
    t = np.atleast_2d(np.asarray(t, dtype=float))
    a = 0.5 * (1j * t[:, 0] + t[:, 1])
    b = 0.5 * (1j * t[:, 0] - t[:, 1])
    inv_p = 1.0 / _primes(x)
    out = np.ones(t.shape[0], dtype=complex)
    for i in range(0, inv_p.size, 512):
        f = specfun.hyp2f1_c1(a[:, None], b[:, None], inv_p[None, i : i + 512])
        out *= np.prod(f, axis=1)
    return out


def _stochastic_scale(x: int) -> float:
    return math.sqrt(math.log(math.log(x)) / 2.0)


def stochastic_zeta_scenario(xs: Sequence[int], envelope_c: float = 1.0) -> Scenario:
    """``X_x = -sum_{p<=x} log(1 - Y_p / sqrt(p))`` with ``Y_p`` uniform on the circle.

    ``A = sqrt(log log x / 2) I``; limit standard complex Gaussian.  The
    domination envelope is ``c exp(-|t|**2 / 8)``, the scaled form of
    ``c exp(-(log log x) |s|**2 / 16)``.
    """
    xs = tuple(int(x) for x in xs)
    for x in xs:
        check_capacity("stochastic_zeta_x", x)
        if math.log(math.log(x)) <= 0:
            raise ValueError("x must exceed e")

    def charfn_of(x):
        return CharFn(2, lambda t: stochastic_zeta_charfn(x, t))

    def sampler(x, rng, size):
        inv_sqrt = 1.0 / np.sqrt(_primes(x))
        out = np.empty((size, 2))
        step = max(1, (1 << 21) // inv_sqrt.size)
        for i in range(0, size, step):
            m = min(step, size - i)
            y = np.exp(2j * math.pi * rng.random((m, inv_sqrt.size)))
            v = -np.log(1.0 - y * inv_sqrt).sum(axis=1)
            out[i : i + m, 0] = v.real
            out[i : i + m, 1] = v.imag
        return out

    def domination_h(k):
        return lambda t: envelope_c * np.exp(-0.125 * np.sum(np.atleast_2d(t) ** 2, axis=1))

    return Scenario(
        name="stochastic-zeta",
        dim=2,
        index_set=xs,
        charfn_of=charfn_of,
        scaling=ScalingSeq.scalar(2, _stochastic_scale),
        reference=ReferenceLaw.gaussian_complex(),
        sampler=sampler,
        domination_h=domination_h,
        mc_block=4096,
    )


# ---------------------------------------------------------------------------
# conjectural limiting function on the critical line


@dataclass(frozen=True)
class ConjecturePhi:
    value: complex
    prime_cutoff: int
    tail_bound: float


def ks_conjecture_phi(t1: float, t2: float, prime_cutoff: int | None = None, tol: float = 1e-8) -> ConjecturePhi:
    """``Phi_U(t) * prod_p (1 - 1/p)**(-|t|**2/4) 2F1((i t1 + t2)/2, (i t1 - t2)/2; 1; 1/p)``.

    Each factor is ``1 + O(p**-2)``; without the ``(1 - 1/p)`` power the
    product would tend to 0 like ``(log P)**(-|t|**2/4)``.  With
    ``prime_cutoff=None`` the cutoff is doubled from ``2**14`` until the
    tail estimate is below ``tol``; an explicit cutoff is used as given.

    Raises
    ------
    TruncationError
        When doubling reaches ``2**24`` without meeting ``tol``.
    """
    t = np.array([[t1, t2]], dtype=float)
    r2 = float(t1 * t1 + t2 * t2)
    a = 0.5 * (1j * t1 + t2)
    b = 0.5 * (1j * t1 - t2)
    g = complex(phi_group("U", t)[0])

    def product(cut: int) -> tuple[complex, float]:
        p = _primes(cut)
        x = 1.0 / p
        log_f = np.log(specfun.hyp2f1_c1(a, b, x)) - 0.25 * r2 * np.log1p(-x)
        # log f_p = c p**-2 + ..., so the tail is about c sum_{p > P} p**-2 <= c / (P log P)
        c = float(np.max(np.abs(log_f[-64:]) * p[-64:] ** 2))
        tail = 2.0 * c / (cut * math.log(cut))
        return np.exp(np.sum(log_f)), tail

    if prime_cutoff is not None:
        # explicit cutoff: the tail estimate is reported, not enforced
        val, tail = product(int(prime_cutoff))
        return ConjecturePhi(g * val, int(prime_cutoff), tail)
    cut = 1 << 14
    while True:
        val, tail = product(cut)
        if tail <= tol:
            return ConjecturePhi(g * val, cut, tail)
        if cut >= 1 << 24:
            raise TruncationError(f"tail estimate {tail:.2e} exceeds {tol:.0e}")
        cut *= 2
