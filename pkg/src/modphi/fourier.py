"""Fourier inversion of characteristic functions.

Densities at a point and probabilities of bounded regions are computed
from a characteristic function by truncated quadrature in frequency space.
The module also builds band-limited lower and upper approximations of a
compactly supported function (see :func:`sandwich_approximation`).

Conventions: ``phi(t) = E[exp(i t.X)]`` and
``density(x) = (2 pi)**-d int exp(-i t.x) phi(t) dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

__all__ = [
    "CharFn",
    "Region",
    "InversionResult",
    "NonIntegrableError",
    "TuningError",
    "integrate_adaptive",
    "invert",
    "density_at",
    "interval_probability",
    "stable_constant",
    "TrigPoly",
    "trig_poly_approx",
    "BandLimitedPair",
    "sandwich_approximation",
    "sandwich_tensor",
]


class NonIntegrableError(ArithmeticError):
    """The truncated frequency integral did not settle."""


class TuningError(ArithmeticError):
    """The sandwich construction could not reach the requested gap."""

    def __init__(self, message: str, achieved_gap: float):
        super().__init__(message)
        self.achieved_gap = achieved_gap


# ---------------------------------------------------------------------------
# characteristic functions and regions


@dataclass(frozen=True)
class CharFn:
    """A characteristic function on R or R^2.

    Parameters
    ----------
    dim : int
        1 or 2.
    eval : callable
        Vectorised evaluator.  Takes ``t`` of shape ``(m,)`` (d=1) or
        ``(m, 2)`` (d=2) and returns ``m`` complex values.
    decay_bound : callable, optional
        Radial envelope ``r -> B(r)`` with ``|phi(t)| <= B(|t|)``; must be
        integrable against ``r**(d-1) dr``.
    cutoff : float, optional
        Frequency radius past which ``phi`` is treated as zero.
    """

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    decay_bound: Callable[[np.ndarray], np.ndarray] | None = None
    cutoff: float | None = None

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.dim == 1:
            return np.asarray(self.eval(np.atleast_1d(t).reshape(-1)), dtype=complex)
        return np.asarray(self.eval(np.atleast_2d(t).reshape(-1, 2)), dtype=complex)


@dataclass(frozen=True)
class Region:
    """Bounded region with exact Lebesgue measure.

    Use the constructors :meth:`interval`, :meth:`box`, :meth:`disc` or
    :meth:`parse`.
    """

    kind: str
    params: tuple[float, ...]

    @classmethod
    def interval(cls, a: float, b: float) -> "Region":
        if not b >= a:
            raise ValueError("interval needs a <= b")
        return cls("interval", (float(a), float(b)))

    @classmethod
    def box(cls, x0: float, x1: float, y0: float, y1: float) -> "Region":
        if not (x1 >= x0 and y1 >= y0):
            raise ValueError("box needs x0 <= x1 and y0 <= y1")
        return cls("box", (float(x0), float(x1), float(y0), float(y1)))

    @classmethod
    def disc(cls, cx: float, cy: float, r: float) -> "Region":
        if not r >= 0:
            raise ValueError("disc needs r >= 0")
        return cls("disc", (float(cx), float(cy), float(r)))

    @classmethod
    def parse(cls, text: str) -> "Region":
        """Parse ``a,b``, ``box:x0,x1,y0,y1`` or ``disc:cx,cy,r``."""
        text = text.strip()
        if ":" in text:
            kind, rest = text.split(":", 1)
        else:
            kind, rest = "interval", text
        values = [float(v) for v in rest.split(",") if v.strip()]
        builders = {"interval": (cls.interval, 2), "box": (cls.box, 4), "disc": (cls.disc, 3)}
        if kind not in builders:
            raise ValueError(f"unknown region kind {kind!r}")
        build, arity = builders[kind]
        if len(values) != arity:
            raise ValueError(f"{kind} region needs {arity} numbers")
        return build(*values)

    @property
    def dim(self) -> int:
        return 1 if self.kind == "interval" else 2

    def measure(self) -> float:
        p = self.params
        if self.kind == "interval":
            return p[1] - p[0]
        if self.kind == "box":
            return (p[1] - p[0]) * (p[3] - p[2])
        return math.pi * p[2] ** 2

    def contains(self, x) -> np.ndarray:
        """Open-region membership test for points of shape (m,) or (m, 2)."""
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "interval":
            return (x > p[0]) & (x < p[1])
        x = x.reshape(-1, 2)
        if self.kind == "box":
            return (x[:, 0] > p[0]) & (x[:, 0] < p[1]) & (x[:, 1] > p[2]) & (x[:, 1] < p[3])
        return (x[:, 0] - p[0]) ** 2 + (x[:, 1] - p[1]) ** 2 < p[2] ** 2

    def translate(self, shift) -> "Region":
        shift = np.atleast_1d(np.asarray(shift, dtype=float))
        p = self.params
        if self.kind == "interval":
            return Region.interval(p[0] + shift[0], p[1] + shift[0])
        if self.kind == "box":
            return Region.box(p[0] + shift[0], p[1] + shift[0], p[2] + shift[1], p[3] + shift[1])
        return Region.disc(p[0] + shift[0], p[1] + shift[1], p[2])

    def fourier_indicator(self, t) -> np.ndarray:
        """``int_B exp(-i t.x) dx`` at the frequencies ``t``."""
        p = self.params
        t = np.asarray(t, dtype=float)
        if self.kind == "interval":
            a, b = p
            return np.exp(-0.5j * t * (a + b)) * (b - a) * np.sinc(t * (b - a) / (2 * math.pi))
        t = t.reshape(-1, 2)
        if self.kind == "box":
            kx = np.exp(-0.5j * t[:, 0] * (p[0] + p[1])) * (p[1] - p[0]) * np.sinc(t[:, 0] * (p[1] - p[0]) / (2 * math.pi))
            ky = np.exp(-0.5j * t[:, 1] * (p[2] + p[3])) * (p[3] - p[2]) * np.sinc(t[:, 1] * (p[3] - p[2]) / (2 * math.pi))
            return kx * ky
        cx, cy, r = p
        rho = np.hypot(t[:, 0], t[:, 1])
        safe = np.where(rho > 0, rho, 1.0)
        radial = np.where(rho > 0, 2 * math.pi * r * special.j1(r * safe) / safe, math.pi * r * r)
        return np.exp(-1j * (t[:, 0] * cx + t[:, 1] * cy)) * radial

    def indicator_envelope(self, rho) -> np.ndarray:
        """Upper bound for ``|int_B exp(-i t.x) dx|`` over the sphere ``|t| = rho``."""
        rho = np.maximum(np.asarray(rho, dtype=float), 1e-300)
        p = self.params
        area = self.measure()
        if self.kind == "interval":
            decay = 2.0 / rho
        elif self.kind == "box":
            # one coordinate of t is at least rho / sqrt(2)
            decay = 2.0 * math.sqrt(2.0) * max(p[1] - p[0], p[3] - p[2]) / rho
        else:
            # sqrt(x) |J1(x)| <= 0.83 for x > 0
            decay = 2 * math.pi * 0.83 * math.sqrt(p[2]) * rho**-1.5
        return np.minimum(area, decay)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": list(self.params), "measure": self.measure()}


# ---------------------------------------------------------------------------
# quadrature

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_GK_X = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_GK_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_GK_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_GK_X[:-1], _GK_X[::-1]])
_WK = np.concatenate([_GK_WK[:-1], _GK_WK[::-1]])
_WG = np.zeros(15)
_WG[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_GK_WG[:-1], [_GK_WG[-1]], _GK_WG[-2::-1]])


def integrate_adaptive(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-10,
    initial_panels: int = 16,
    max_panels: int = 20000,
) -> tuple[complex, float]:
    """Vectorised adaptive Gauss-Kronrod (7/15) quadrature.

    ``func`` receives all nodes of all active panels in one array.  Panel
    contributions are summed in order of their left endpoint so the result
    does not depend on the refinement history.

    Returns
    -------
    value : complex
    error : float
        Sum of the per-panel Kronrod-Gauss differences.
    """
    edges = np.linspace(a, b, initial_panels + 1)
    todo = np.stack([edges[:-1], edges[1:]], axis=1)
    done_left: list[np.ndarray] = []
    done_val: list[np.ndarray] = []
    done_err: list[np.ndarray] = []
    total_panels = todo.shape[0]
    while todo.size:
        mid = 0.5 * (todo[:, 0] + todo[:, 1])
        half = 0.5 * (todo[:, 1] - todo[:, 0])
        x = mid[:, None] + half[:, None] * _NODES[None, :]
        y = np.asarray(func(x.reshape(-1)), dtype=complex).reshape(x.shape)
        kron = (y * _WK).sum(axis=1) * half
        gauss = (y * _WG).sum(axis=1) * half
        err = np.abs(kron - gauss)
        estimate = abs(sum(done_val[i].sum() for i in range(len(done_val))) + kron.sum())
        budget = max(abs_tol, rel_tol * estimate)
        ok = err <= budget * (2 * half) / (b - a)
        if total_panels >= max_panels:
            ok[:] = True
        done_left.append(todo[ok, 0])
        done_val.append(kron[ok])
        done_err.append(err[ok])
        bad = todo[~ok]
        if bad.size:
            m = 0.5 * (bad[:, 0] + bad[:, 1])
            todo = np.concatenate([np.stack([bad[:, 0], m], 1), np.stack([m, bad[:, 1]], 1)])
            total_panels += bad.shape[0]
        else:
            todo = np.empty((0, 2))
    left = np.concatenate(done_left)
    vals = np.concatenate(done_val)[np.argsort(left, kind="stable")]
    value = complex(math.fsum(vals.real), math.fsum(vals.imag))
    return value, float(np.concatenate(done_err).sum())


def _gauss_legendre_panels(lo: float, hi: float, panels: int, order: int = 10):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
    weights = (half[:, None] * w[None, :]).reshape(-1)
    return nodes, weights


@dataclass(frozen=True)
class InversionResult:
    """Value of a frequency-space integral with its error budget.

    ``imag_residue`` is the imaginary part left over after integrating; it
    is zero in exact arithmetic whenever the integrand is Hermitian.
    """

    value: float
    imag_residue: float
    truncation: float
    tail_bound: float
    quad_error: float


def _radial_tail(decay: Callable, radius: float, dim: int, weight_env: Callable | None = None) -> float:
    # integral of envelope times weight bound outside the ball of given radius;
    # r = radius / s maps the unbounded range onto (0, 1]
    def g(s):
        if s <= 0.0:
            return 0.0
        r = radius / s
        val = float(np.asarray(decay(np.array([r])), float)[0])
        if weight_env is not None:
            val *= float(np.asarray(weight_env(np.array([r])), float)[0])
        shell = 2.0 if dim == 1 else 2 * math.pi * r
        return shell * val * radius / (s * s)

    return float(integrate.quad(g, 0.0, 1.0, limit=400, epsabs=0.0, epsrel=1e-8)[0])


def _integrate_frequency(phi: CharFn, weight: Callable[[np.ndarray], np.ndarray], T: float, tol: float) -> tuple[complex, float]:
    # int_{[-T,T]^d} phi(t) weight(t) dt
    if phi.dim == 1:
        def integrand(t):
            both = np.concatenate([t, -t])
            vals = phi(both) * weight(both)
            return vals[: t.size] + vals[t.size :]

        return integrate_adaptive(integrand, 0.0, T, abs_tol=0.1 * tol, rel_tol=1e-11, initial_panels=32)
    previous = None
    panels = 8
    while True:
        nodes, weights = _gauss_legendre_panels(-T, T, panels)
        tx, ty = np.meshgrid(nodes, nodes, indexing="ij")
        grid = np.stack([tx.reshape(-1), ty.reshape(-1)], axis=1)
        w2 = np.outer(weights, weights).reshape(-1)
        value = complex(np.sum(phi(grid) * weight(grid) * w2))
        if previous is not None and abs(value - previous) < tol:
            return value, abs(value - previous)
        if panels > 512:
            return value, abs(value - previous)
        previous = value
        panels *= 2


def invert(
    phi: CharFn,
    weight: Callable[[np.ndarray], np.ndarray],
    weight_sup: float | Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-10,
) -> InversionResult:
    """``(2 pi)**-d int phi(t) weight(t) dt`` with a controlled truncation.

    The truncation radius comes from, in order of preference, ``phi.cutoff``,
    the envelope ``phi.decay_bound`` (tail below ``0.1 * tol``), or doubling
    until two successive values agree to ``tol``.  ``weight_sup`` bounds
    ``|weight|``, either by a constant or by a radial function of ``|t|``.

    Raises
    ------
    NonIntegrableError
        When doubling does not settle after 20 rounds, or when the
        quadrature error of the truncated integral exceeds
        ``max(1e-6, 100 tol)``.
    """
    scale = (2 * math.pi) ** (-phi.dim)
    if callable(weight_sup):
        weight_env = weight_sup
    else:
        bound = float(weight_sup)
        weight_env = lambda r: np.full_like(np.asarray(r, float), bound)  # noqa: E731

    def checked(value, T, tail, qerr):
        if scale * qerr > max(1e-6, 100 * tol):
            raise NonIntegrableError(
                f"frequency quadrature did not converge on [-{T:.3g}, {T:.3g}] (error {scale * qerr:.3g})"
            )
        return InversionResult(scale * value.real, scale * value.imag, T, tail, scale * qerr)

    if phi.cutoff is not None:
        value, qerr = _integrate_frequency(phi, weight, phi.cutoff, tol / scale)
        return checked(value, phi.cutoff, 0.0, qerr)
    if phi.decay_bound is not None:
        T = 1.0
        tail = scale * _radial_tail(phi.decay_bound, T, phi.dim, weight_env)
        for _ in range(80):
            if tail < 0.1 * tol:
                break
            T *= 1.5
            tail = scale * _radial_tail(phi.decay_bound, T, phi.dim, weight_env)
        value, qerr = _integrate_frequency(phi, weight, T, tol / scale)
        return checked(value, T, tail, qerr)
    T = 1.0
    previous = _integrate_frequency(phi, weight, T, tol / scale)[0]
    for _ in range(20):
        T *= 2.0
        value, qerr = _integrate_frequency(phi, weight, T, tol / scale)
        if abs(value - previous) * scale < tol:
            return checked(value, T, scale * abs(value - previous), qerr)
        previous = value
    raise NonIntegrableError("characteristic function does not look integrable (no decay bound, truncation did not settle)")


def density_at(phi: CharFn, x, tol: float = 1e-10) -> float:
    """Density of the law with characteristic function ``phi`` at ``x``.

    Examples
    --------
    >>> import numpy as np
    >>> gauss = CharFn(1, lambda t: np.exp(-t * t / 2))
    >>> round(density_at(gauss, 0.0), 6)
    0.398942
    """
    return density_at_detailed(phi, x, tol).value


def _wynn_epsilon(partial: list[float]) -> tuple[float, float]:
    # epsilon-algorithm limit of a sequence of partial sums and a change estimate
    n = len(partial)
    table = [list(partial)]
    prev = [0.0] * (n + 1)
    best, best_err = partial[-1], abs(partial[-1] - partial[-2]) if n > 1 else math.inf
    for k in range(1, n):
        row = []
        for j in range(n - k):
            diff = table[k - 1][j + 1] - table[k - 1][j]
            if diff == 0.0:
                return table[k - 1][j + 1], best_err if k > 1 else 0.0
            row.append(prev[j + 1] + 1.0 / diff)
        prev = table[k - 1]
        table.append(row)
        if k % 2 == 0 and len(row) >= 2:
            err = abs(row[-1] - row[-2])
            if err < best_err:
                best, best_err = row[-1], err
    return best, best_err


def _oscillatory_density(phi: CharFn, x: float, tol: float, max_windows: int = 400) -> InversionResult:
    # (1/pi) int_0^inf Re(phi(t) e^{-itx}) dt with the tail taken over
    # half periods pi/|x| and the partial sums extrapolated
    half_period = math.pi / abs(x)
    f = lambda t: (phi(t) * np.exp(-1j * t * x)).real  # noqa: E731
    T1 = half_period * max(1, math.ceil(64.0 / half_period))
    head, head_err = integrate_adaptive(f, 0.0, T1, abs_tol=0.1 * tol, rel_tol=1e-12, initial_panels=64)
    nodes, weights = np.polynomial.legendre.leggauss(24)
    partial, total = [], 0.0
    estimate, change = math.nan, math.inf
    for k in range(max_windows):
        lo = T1 + k * half_period
        t = lo + 0.5 * half_period * (nodes + 1.0)
        total += 0.5 * half_period * float(np.dot(weights, f(t)))
        partial.append(total)
        if len(partial) >= 8 and k % 2 == 1:
            estimate, change = _wynn_epsilon(partial[-40:])
            if change < 0.01 * tol:
                break
    else:
        if not change < tol:
            raise NonIntegrableError(f"oscillatory tail did not settle (last change {change:.3g})")
    value = (head.real + estimate) / math.pi
    return InversionResult(value, 0.0, math.inf, change / math.pi, head_err / math.pi)


def density_at_detailed(phi: CharFn, x, tol: float = 1e-10) -> InversionResult:
    """As :func:`density_at` but returning the full :class:`InversionResult`.

    In one dimension, when the absolute tail of ``phi`` would need more
    than a few thousand oscillations of ``exp(-itx)`` to fall below
    ``tol``, the tail is integrated over half periods and the partial sums
    are extrapolated with the epsilon algorithm.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if phi.dim == 1:
        if phi.decay_bound is not None and phi.cutoff is None and x[0] != 0.0:
            T = 1.0
            while _radial_tail(phi.decay_bound, T, 1) / (2 * math.pi) >= 0.1 * tol and T < 1e15:
                T *= 1.5
            if T * abs(x[0]) / math.pi > 4000:
                return _oscillatory_density(phi, float(x[0]), tol)
        weight = lambda t: np.exp(-1j * t * x[0])  # noqa: E731
    else:
        weight = lambda t: np.exp(-1j * (t[:, 0] * x[0] + t[:, 1] * x[1]))  # noqa: E731
    return invert(phi, weight, 1.0, tol)


def interval_probability(phi: CharFn, region: Region, tol: float = 1e-10) -> float:
    """Probability of ``region`` under the law with characteristic function ``phi``.

    The density is integrated over the region in Fourier space:
    ``P[B] = (2 pi)**-d int phi(t) K_B(t) dt`` with
    ``K_B(t) = int_B exp(-i t.x) dx`` known in closed form.
    """
    return interval_probability_detailed(phi, region, tol).value


def interval_probability_detailed(phi: CharFn, region: Region, tol: float = 1e-10) -> InversionResult:
    if region.dim != phi.dim:
        raise ValueError("region and characteristic function dimensions differ")
    return invert(phi, region.fourier_indicator, region.indicator_envelope, tol)


def stable_constant(p: float) -> float:
    """``c_p = (1/2 pi) int exp(-|t|**p) dt`` by adaptive quadrature.

    For ``p >= 1`` the integral is taken in ``t``.  For ``p < 1`` the
    substitution ``u = t**p`` removes the long tail.
    """
    if not 0 < p <= 2:
        raise ValueError("p must lie in (0, 2]")
    if p >= 1:
        T = 45.0 ** (1.0 / p)
        val, _ = integrate_adaptive(lambda t: np.exp(-(t**p)), 0.0, T, abs_tol=1e-15, rel_tol=1e-13)
    else:
        def g(u):
            return np.exp(-u) * u ** (1.0 / p - 1.0) / p

        val, _ = integrate_adaptive(g, 0.0, 60.0 + 20.0 / p, abs_tol=1e-15, rel_tol=1e-13)
    return val.real / math.pi


# ---------------------------------------------------------------------------
# trigonometric approximation


@dataclass(frozen=True)
class TrigPoly:
    """Trigonometric polynomial with period ``period`` in each coordinate.

    ``coeffs`` is indexed by frequency number in FFT order; the value at
    ``x`` is ``sum_m coeffs[m] exp(2 pi i m.x / period)``.
    """

    coeffs: np.ndarray
    period: float
    degree: int

    @property
    def dim(self) -> int:
        return self.coeffs.ndim

    def on_grid(self, n: int) -> np.ndarray:
        """Values on the grid ``-period/2 + j period / n``, ``j < n`` per axis."""
        size = self.coeffs.shape[0]
        if n < size:
            raise ValueError("grid too coarse for this polynomial")
        full = np.zeros((n,) * self.dim, dtype=complex)
        half = size // 2
        idx = np.r_[0:half, n - (size - half) : n]
        full[np.ix_(*([idx] * self.dim))] = self.coeffs
        # shift so that grid node 0 sits at -period/2
        phase = np.exp(1j * math.pi * np.fft.fftfreq(n, 1.0 / n))
        for axis in range(self.dim):
            shape = [1] * self.dim
            shape[axis] = n
            full = full * (phase.reshape(shape) ** -1)
        vals = np.fft.ifftn(full) * n**self.dim
        return vals.real

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        freqs = np.fft.fftfreq(self.coeffs.shape[0], 1.0 / self.coeffs.shape[0])
        w = 2 * math.pi / self.period
        if self.dim == 1:
            return (np.exp(1j * w * np.outer(x.reshape(-1), freqs)) @ self.coeffs).real
        x = x.reshape(-1, 2)
        ex = np.exp(1j * w * np.outer(x[:, 0], freqs))
        ey = np.exp(1j * w * np.outer(x[:, 1], freqs))
        return np.einsum("ia,ab,ib->i", ex, self.coeffs, ey).real


def _grid(period: float, n: int) -> np.ndarray:
    return -0.5 * period + period * np.arange(n) / n


def trig_poly_approx(
    target: Callable[[np.ndarray], np.ndarray],
    period: float,
    tol: float,
    dim: int = 1,
    start_degree: int = 16,
    max_degree: int = 1 << 19,
    check_factor: int = 4,
) -> tuple[TrigPoly, float]:
    """Uniform trigonometric approximation of a periodic continuous function.

    Fourier coefficients are sampled by FFT and damped with de la
    Vallee Poussin weights (``2 sigma_{2M} - sigma_M`` in terms of Fejer
    means), which approximate within a factor 4 of the best uniform error.
    The degree doubles until the error on a check grid ``check_factor``
    times finer than the sampling grid is at most ``tol``.

    Parameters
    ----------
    target : callable
        Vectorised; takes ``(n,)`` points for d=1 or ``(n, 2)`` for d=2.
    period : float
    tol : float
    dim : int

    Returns
    -------
    poly : TrigPoly
    error : float
        Maximum error seen on the check grid.
    """
    degree = start_degree
    # in two dimensions the check grid is (4 * check_factor * degree)**2 points
    max_per_axis = max_degree if dim == 1 else min(max_degree, 1 << 8)
    if dim == 2:
        check_factor = min(check_factor, 2)
    while True:
        n = 4 * degree
        xs = _grid(period, n)
        if dim == 1:
            samples = target(xs)
        else:
            gx, gy = np.meshgrid(xs, xs, indexing="ij")
            samples = target(np.stack([gx.reshape(-1), gy.reshape(-1)], 1)).reshape(n, n)
        # coefficients relative to x = -period/2 + j*period/n
        coeffs = np.fft.fftn(samples) / n**dim
        k = np.fft.fftfreq(n, 1.0 / n)
        phase = np.exp(1j * math.pi * k)  # undo the -period/2 offset
        weight = np.clip(2.0 - np.abs(k) / degree, 0.0, 1.0)
        for axis in range(dim):
            shape = [1] * dim
            shape[axis] = n
            coeffs = coeffs * (phase * weight).reshape(shape)
        keep = np.r_[0 : 2 * degree, n - 2 * degree + 1 : n]
        small = coeffs[np.ix_(*([keep] * dim))]
        size = 4 * degree
        packed = np.zeros((size,) * dim, dtype=complex)
        idx = np.r_[0 : 2 * degree, size - 2 * degree + 1 : size]
        packed[np.ix_(*([idx] * dim))] = small
        poly = TrigPoly(packed, period, 2 * degree - 1)
        m = check_factor * size
        fine = _grid(period, m)
        approx = poly.on_grid(m)
        if dim == 1:
            exact = target(fine)
        else:
            gx, gy = np.meshgrid(fine, fine, indexing="ij")
            exact = target(np.stack([gx.reshape(-1), gy.reshape(-1)], 1)).reshape(m, m)
        err = float(np.max(np.abs(approx - exact)))
        if err <= tol:
            return poly, err
        if 2 * degree > max_per_axis:
            raise TuningError(f"trig_poly_approx: degree cap reached with error {err:.3g}", err)
        degree *= 2


# ---------------------------------------------------------------------------
# band-limited sandwich


def _smoothstep(s: np.ndarray) -> np.ndarray:
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)


def _fejer_window(x: np.ndarray, a: float) -> np.ndarray:
    # sin^2(a x)/(a x)^2, Fourier transform supported on [-2a, 2a]
    return np.sinc(a * x / math.pi) ** 2


def _window_periodization(y: np.ndarray, a: float, half_period: float) -> np.ndarray:
    # sum_j h(y + 2 N j) by Poisson summation; only finitely many terms survive
    period = 2 * half_period
    m_max = int(math.floor(2 * a * half_period / math.pi))
    out = np.zeros_like(y, dtype=float)
    for m in range(-m_max, m_max + 1):
        omega = 2 * math.pi * m / period
        hat = (math.pi / a) * max(0.0, 1.0 - abs(omega) / (2 * a))
        out += hat * np.cos(omega * y)
    return out / period


@dataclass
class BandLimitedPair:
    """Band-limited functions ``g2 <= f <= g1`` sampled on a check grid.

    Attributes
    ----------
    x : ndarray
        Check-grid nodes, shape ``(n,)`` for d=1 or ``(n*n, 2)`` for d=2.
    f, g1, g2 : ndarray
        Values at the nodes.
    fourier_support_radius : float
        Radius (sup-norm in frequency) outside which both transforms vanish.
    gap_integral : float
        ``int (g1 - g2)`` over the whole space.
    params : dict
        Construction parameters (eps, plateau, half_period, window_a, degree, ...).
    """

    x: np.ndarray
    f: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    fourier_support_radius: float
    gap_integral: float
    params: dict = field(default_factory=dict)
    _spectral: tuple | None = None

    def order_holds(self, slack: float = 1e-12) -> bool:
        return bool(np.all(self.g2 <= self.f + slack) and np.all(self.f <= self.g1 + slack))

    def spectral_mass_outside(self, oversample: int = 2, periods: int = 8) -> float:
        """Fraction of the energy of ``g1`` at frequencies beyond the support radius.

        ``g1`` is sampled ``oversample`` times faster than the Nyquist rate
        of the declared radius over ``periods`` periods of its polynomial
        factor, tapered by ``cos**2`` to the window edges, and the DFT
        energy beyond the radius (plus the taper's own width) is compared
        with the total.
        """
        factor_pair = getattr(self, "_factor_pair", None)
        if factor_pair is not None:
            # energy of a tensor product outside the sup-norm ball
            inside = 1.0 - factor_pair.spectral_mass_outside(oversample, periods)
            return 1.0 - inside * inside
        if self._spectral is None:
            return 0.0
        poly, a, N, dim = self._spectral
        R = self.fourier_support_radius
        fine = oversample * poly.coeffs.shape[0]
        if dim == 2:
            fine = min(fine, 256)
            periods = min(periods, 4)
        base = poly.on_grid(fine)
        reps = periods
        n = fine * reps
        step = 2 * N / fine
        L = N * reps
        xs = -L + step * np.arange(n)
        taper = np.cos(math.pi * xs / (2 * L)) ** 2
        if dim == 1:
            vals = np.tile(base, reps) * _fejer_window(xs, a) * taper
        else:
            tiled = np.tile(base, (reps, reps))
            w1 = _fejer_window(xs, a) * taper
            vals = tiled * np.outer(w1, w1)
        spec = np.abs(np.fft.fftn(vals)) ** 2
        omega = 2 * math.pi * np.fft.fftfreq(n, step)
        cut = R + math.pi / L + 1e-9 * R
        if dim == 1:
            outside = np.abs(omega) > cut
        else:
            ox, oy = np.meshgrid(omega, omega, indexing="ij")
            outside = np.maximum(np.abs(ox), np.abs(oy)) > cut
        total = spec.sum()
        return float(spec[outside].sum() / total) if total > 0 else 0.0

    def to_csv(self) -> str:
        lines = []
        if self.x.ndim == 1:
            lines.append("x,f,g1,g2")
            for row in zip(self.x, self.f, self.g1, self.g2):
                lines.append(",".join(f"{v:.12g}" for v in row))
        else:
            lines.append("x,y,f,g1,g2")
            for (px, py), fv, a, b in zip(self.x, self.f, self.g1, self.g2):
                lines.append(",".join(f"{v:.12g}" for v in (px, py, fv, a, b)))
        return "\n".join(lines) + "\n"


def _build_pair(f, dim: int, k: float, f_sup: float, f_mass: float, eps: float, plateau: float, half_period: float, check_nodes: int):
    # one attempt at the construction for fixed parameters
    N = half_period
    excess = plateau - eps

    def theta(x):
        if dim == 1:
            return eps + excess * _smoothstep(k - np.abs(x))
        return eps + excess * _smoothstep(k - np.abs(x[:, 0])) * _smoothstep(k - np.abs(x[:, 1]))

    def upper_target(x):
        return f(x) + theta(x)

    def lower_target(x):
        return f(x) - theta(x)

    tol = 0.5 * eps
    p_up, err_up = trig_poly_approx(upper_target, 2 * N, tol, dim)
    p_lo, err_lo = trig_poly_approx(lower_target, 2 * N, tol, dim)
    delta = excess / (dim * (excess + f_sup))
    a = math.sqrt(2 * delta) / k

    # excess-subtraction term for g2: K h(x) (1 - h_c(x)) S(x)
    c = math.pi / (2 * N)
    inner = k - 1.0
    # comb width about inner/sqrt(2), keeping its peak normalisation near e
    m_pow = max(8, int(math.ceil((2 * N / (math.pi * inner)) ** 2)))
    s_norm = math.cos(math.pi * inner / (2 * N)) ** (-2 * m_pow)
    worst = 1.0 - math.sin(c * inner) ** 2 / (math.pi - c * inner) ** 2
    K = max(f_sup, 0.0) / worst

    def comb(x):
        return s_norm * np.cos(math.pi * x / (2 * N)) ** (2 * m_pow)

    def window(x):
        if dim == 1:
            return _fejer_window(x, a)
        return _fejer_window(x[:, 0], a) * _fejer_window(x[:, 1], a)

    def guard(x):
        if dim == 1:
            return K * window(x) * (1.0 - _fejer_window(x, c)) * comb(x)
        hc = _fejer_window(x[:, 0], c) * _fejer_window(x[:, 1], c)
        return K * window(x) * (1.0 - hc) * comb(x[:, 0]) * comb(x[:, 1])

    # check grid: covers the central period and the first copies on each side
    L = 2 * N
    if dim == 1:
        xs = -L + 2 * L * np.arange(check_nodes) / check_nodes
        pts = xs
    else:
        side = int(round(math.sqrt(check_nodes)))
        g = -L + 2 * L * np.arange(side) / side
        gx, gy = np.meshgrid(g, g, indexing="ij")
        pts = np.stack([gx.reshape(-1), gy.reshape(-1)], 1)
    fine = 4 * p_up.coeffs.shape[0]
    grid_vals_up = p_up.on_grid(fine)
    grid_vals_lo = p_lo.on_grid(fine)

    def lookup(grid_vals, x):
        # node positions on the periodic evaluation grid
        if dim == 1:
            idx = np.round((x + N) * fine / (2 * N)).astype(np.int64) % fine
            on_grid = np.abs((x + N) * fine / (2 * N) - np.round((x + N) * fine / (2 * N))) < 1e-9
            if np.all(on_grid):
                return grid_vals[idx]
            return None
        ix = np.round((x[:, 0] + N) * fine / (2 * N)).astype(np.int64) % fine
        iy = np.round((x[:, 1] + N) * fine / (2 * N)).astype(np.int64) % fine
        ok = np.all(np.abs((x + N) * fine / (2 * N) - np.round((x + N) * fine / (2 * N))) < 1e-9)
        return grid_vals[ix, iy] if ok else None

    pu = lookup(grid_vals_up, pts)
    pl = lookup(grid_vals_lo, pts)
    if pu is None:
        pu = p_up(pts)
    if pl is None:
        pl = p_lo(pts)
    fv = f(pts)
    hv = window(pts)
    g1 = pu * hv
    g2 = pl * hv - guard(pts)

    # gap integral: periodic parts against the periodized window, guard separately
    if dim == 1:
        y = _grid(2 * N, fine)
        H = _window_periodization(y, a, N)
        periodic_part = float(np.sum((grid_vals_up - grid_vals_lo) * H) * (2 * N) / fine)
        int_up = float(np.sum(grid_vals_up * H) * (2 * N) / fine)
        int_lo = float(np.sum(grid_vals_lo * H) * (2 * N) / fine)
    else:
        y = _grid(2 * N, fine)
        H1 = _window_periodization(y, a, N)
        periodic_part = float(np.einsum("ij,i,j->", grid_vals_up - grid_vals_lo, H1, H1) * (2 * N / fine) ** 2)
        int_up = float(np.einsum("ij,i,j->", grid_vals_up, H1, H1) * (2 * N / fine) ** 2)
        int_lo = float(np.einsum("ij,i,j->", grid_vals_lo, H1, H1) * (2 * N / fine) ** 2)
    guard_mass = _guard_mass(K, a, c, N, m_pow, s_norm, dim)
    gap = periodic_part + guard_mass

    p_deg = max(p_up.degree, p_lo.degree)
    radius_g1 = 2 * a + math.pi * p_up.degree / N
    radius_g2 = max(2 * a + math.pi * p_lo.degree / N, 2 * a + 2 * c + math.pi * m_pow / N)
    radius = max(radius_g1, radius_g2)

    params = {
        "eps": eps,
        "plateau": plateau,
        "half_period": N,
        "support_k": k,
        "window_a": a,
        "delta": delta,
        "degree": p_deg,
        "approx_error": max(err_up, err_lo),
        "guard_mass": guard_mass,
        "f_mass": f_mass,
        "int_g1": int_up,
        "int_g2": int_lo - guard_mass,
    }
    return BandLimitedPair(pts, fv, g1, g2, radius, gap, params, (p_up, a, N, dim))


def _product_window_periodization(y: np.ndarray, a: float, c: float, half_period: float) -> np.ndarray:
    # sum_j (h_a h_c)(y + 2 N j); the transform of h_a h_c is a convolution of two triangles
    period = 2 * half_period

    def tri(w, b):
        return (math.pi / b) * max(0.0, 1.0 - abs(w) / (2 * b))

    m_max = int(math.floor(2 * (a + c) * half_period / math.pi))
    out = np.zeros_like(y, dtype=float)
    for m in range(-m_max, m_max + 1):
        omega = 2 * math.pi * m / period
        pts = sorted({-2 * a, 0.0, 2 * a, omega - 2 * c, omega, omega + 2 * c})
        lo, hi = max(-2 * a, omega - 2 * c), min(2 * a, omega + 2 * c)
        if hi <= lo:
            continue
        inner = [p for p in pts if lo < p < hi]
        hat = integrate.quad(lambda v: tri(v, a) * tri(omega - v, c), lo, hi, points=inner or None, epsabs=1e-14)[0]
        out += hat / (2 * math.pi) * np.cos(omega * y)
    return out / period


def _guard_mass(K: float, a: float, c: float, N: float, m_pow: int, s_norm: float, dim: int) -> float:
    # int K h (1 - h_c) S over R^dim; every factor is a product over axes and
    # each one-dimensional integral is exact through periodization
    n = 1 << int(math.ceil(math.log2(8 * m_pow + 64)))
    y = _grid(2 * N, n)
    S = s_norm * np.cos(math.pi * y / (2 * N)) ** (2 * m_pow)
    hs = float(np.sum(S * _window_periodization(y, a, N)) * 2 * N / n)
    hhs = float(np.sum(S * _product_window_periodization(y, a, c, N)) * 2 * N / n)
    if dim == 1:
        return K * (hs - hhs)
    return K * (hs * hs - hhs * hhs)


def sandwich_tensor(factor: Callable[[np.ndarray], np.ndarray], eta: float, support: float = 1.0, side: int = 64) -> BandLimitedPair:
    """Two-dimensional sandwich for a separable ``f(x, y) = b(x) b(y)``.

    With a one-dimensional pair ``g2 <= b <= g1`` (``b >= 0``), the
    functions ``G1 = g1 x g1`` and ``G2 = g1 x g2 + g2 x g1 - g1 x g1``
    satisfy ``G2 <= f <= G1`` because ``(g1 - b) x (g1 - b) >= 0``.
    ``G1`` is a two-variable trigonometric polynomial times the product
    window, and ``int (G1 - G2) = 2 int g1 * int (g1 - g2)``.
    """
    probe = np.linspace(-support, support, 4001)
    mass = float(np.trapezoid(factor(probe), probe))
    eta1 = 0.5 * (-mass + math.sqrt(mass * mass + 2.0 * eta))
    pair = sandwich_approximation(factor, eta1, dim=1, support=support, check_nodes=4096)
    if pair.params.get("degenerate"):
        int_g1 = 0.0
    else:
        int_g1 = pair.params["int_g1"]
    stride = pair.x.shape[0] // side
    idx = np.arange(0, pair.x.shape[0], stride)[:side]
    x1, f1, a1, b1 = pair.x[idx], pair.f[idx], pair.g1[idx], pair.g2[idx]
    gx, gy = np.meshgrid(x1, x1, indexing="ij")
    pts = np.stack([gx.reshape(-1), gy.reshape(-1)], 1)
    F = np.outer(f1, f1).reshape(-1)
    G1 = np.outer(a1, a1).reshape(-1)
    G2 = (np.outer(a1, b1) + np.outer(b1, a1) - np.outer(a1, a1)).reshape(-1)
    gap = 2.0 * int_g1 * pair.gap_integral
    params = dict(pair.params)
    params.update({"tensor": True, "gap_1d": pair.gap_integral})
    out = BandLimitedPair(pts, F, G1, G2, pair.fourier_support_radius, gap, params, None)
    out._factor_pair = pair
    return out


def sandwich_approximation(
    f: Callable[[np.ndarray], np.ndarray],
    eta: float,
    dim: int = 1,
    support: float = 1.0,
    check_nodes: int = 4096,
    f_sup: float | None = None,
) -> BandLimitedPair:
    """Band-limited ``g2 <= f <= g1`` with ``int (g1 - g2) <= eta``.

    ``f`` must be continuous, nonnegative and vanish outside
    ``[-support, support]**dim``; write ``k = support + 1``.  The
    construction:

    * ``theta`` equals ``eps`` outside ``[-k, k]**d`` and a plateau
      ``theta0 <= eps + eps**(1/(4d))`` on the support of ``f``, joined by
      a smooth ramp;
    * ``p`` and ``q`` are trigonometric polynomials with period ``2N``
      approximating ``f + theta`` and ``f - theta`` to within ``eps/2``;
    * ``h(x) = prod_j sin(a x_j)**2 / (a x_j)**2`` with
      ``a = sqrt(2 delta)/k`` and
      ``delta = (theta0 - eps)/(d (theta0 - eps + sup f))``;
    * ``g1 = p h`` and ``g2 = q h - E`` where ``E >= 0`` is a band-limited
      term that cancels the positive periodic copies of ``q`` away from
      the origin.

    ``eps``, the plateau and ``N`` are lowered or raised together until the
    gap target is met.

    Raises
    ------
    TuningError
        If no parameter set reaches ``eta``; carries the best gap found.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    k = support + 1.0
    if dim == 1:
        probe = np.linspace(-support, support, 4001)
        vals = f(probe)
        f_mass = float(np.trapezoid(vals, probe))
    else:
        g = np.linspace(-support, support, 401)
        gx, gy = np.meshgrid(g, g, indexing="ij")
        vals = f(np.stack([gx.reshape(-1), gy.reshape(-1)], 1))
        f_mass = float(np.trapezoid(np.trapezoid(vals.reshape(401, 401), g, axis=1), g))
    if np.any(vals < -1e-12):
        raise ValueError("f must be nonnegative")
    top = float(vals.max()) if f_sup is None else float(f_sup)
    if top < 1e-12:
        if dim == 1:
            x = -2 * k + 4 * k * np.arange(check_nodes) / check_nodes
        else:
            side = int(round(math.sqrt(check_nodes)))
            gg = -2 * k + 4 * k * np.arange(side) / side
            gx, gy = np.meshgrid(gg, gg, indexing="ij")
            x = np.stack([gx.reshape(-1), gy.reshape(-1)], 1)
        z = np.zeros(x.shape[0])
        return BandLimitedPair(x, z.copy(), z.copy(), z.copy(), 0.0, 0.0, {"degenerate": True, "half_period": k})

    best = math.inf
    vol = (2 * k) ** dim
    for exponent in np.arange(2.0, 10.01, 0.5):
        eps = 10.0 ** (-exponent)
        plateau_excess = min(eps ** (1.0 / (4 * dim)), eta / (6.0 * vol))
        if plateau_excess <= eps:
            continue
        delta = plateau_excess / (dim * (plateau_excess + top))
        a = math.sqrt(2 * delta) / k
        # budget the periodic copies of f and the eps floor
        floor_cost = 4 * eps * (math.pi / a) ** dim
        if floor_cost > eta / 4:
            continue
        copies = 2 * f_mass * dim * (math.pi**2 / 12.0) / (a * a)
        N_copy = math.sqrt(copies / (eta / 8.0))
        N = max(eps ** (-1.0 / (2 * dim)), k + 1.0, N_copy)
        N = float(2 ** math.ceil(math.log2(N)))
        if N > (1 << 10):
            continue
        try:
            pair = _build_pair(f, dim, k, top, f_mass, eps, eps + plateau_excess, N, check_nodes)
        except TuningError as exc:
            best = min(best, exc.achieved_gap)
            continue
        if pair.gap_integral <= eta and pair.order_holds():
            return pair
        best = min(best, pair.gap_integral)
    raise TuningError(f"sandwich construction could not reach gap {eta}", best)
