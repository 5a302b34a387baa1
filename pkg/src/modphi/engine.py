"""Mod-phi convergence: scenarios, hypothesis diagnostics and local limits.

A :class:`Scenario` bundles the characteristic functions of a sequence
``X_n`` with scaling matrices ``A_n`` (inverse ``Sigma_n``) and a reference
law ``mu``.  The diagnostics measure how far each hypothesis is from
holding on a finite list of indices; :func:`local_limit` compares
``|det A_n| P[X_n in B]`` with ``(d mu/dm)(0) m(B)``.

Index lists are always finite, so every limit statement becomes a
trend flag: a sequence counts as improving when each value is at most
10% above its predecessor.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

import numpy as np

from . import fourier
from .fourier import CharFn, Region

__all__ = [
    "ScalingSeq",
    "ReferenceLaw",
    "Scenario",
    "LocalLimitReport",
    "MethodUnavailableError",
    "CalibrationError",
    "BalancednessError",
    "MissingEnvelopeError",
    "TrendResult",
    "trend",
    "check_h2",
    "check_h3_domination",
    "check_h3prime",
    "check_h4prime",
    "local_limit",
    "mc_probability",
    "shift_mean",
    "linear_change",
    "balancedness_check",
    "DEFAULT_K_LIST",
    "SCHEMA",
]

SCHEMA = "v1"
DEFAULT_K_LIST = (1.0, 2.0, 5.0)
TREND_SLACK = 0.10


class MethodUnavailableError(ValueError):
    """The requested probability backend is missing or not allowed."""


class CalibrationError(ValueError):
    """``Sigma_n alpha_n`` does not settle on the requested shift."""


class BalancednessError(ValueError):
    """The balancedness condition failed for a linear change of variable."""


class MissingEnvelopeError(ValueError):
    """The scenario has no domination envelope."""


# ---------------------------------------------------------------------------
# small helpers


def _as_matrix(m, dim: int) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim == 0:
        return m * np.eye(dim)
    return m.reshape(dim, dim)


def _points(t, dim: int) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return t.reshape(-1) if dim == 1 else t.reshape(-1, 2)


def _apply_adjoint(m: np.ndarray, t: np.ndarray, dim: int) -> np.ndarray:
    # m^T t for a batch of row points
    if dim == 1:
        return m[0, 0] * t
    return t @ m


@dataclass(frozen=True)
class TrendResult:
    """Values along an index list and whether they are nonincreasing.

    ``improving`` allows each value to exceed its predecessor by 10%.
    """

    values: tuple[float, ...]
    improving: bool

    def to_dict(self) -> dict:
        return {"improving": self.improving, "values": list(self.values)}


def trend(values: Sequence[float], slack: float = TREND_SLACK, floor: float = 1e-13) -> TrendResult:
    """Nonincreasing-with-slack test.

    Values below ``floor`` count as zero, so exact agreement at every index
    is an improving trend.
    """
    vals = tuple(float(v) for v in values)
    ok = all(b <= (1.0 + slack) * a + floor for a, b in zip(vals, vals[1:]))
    return TrendResult(vals, bool(ok))


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class ScalingSeq:
    """Scaling matrices ``A_n`` with inverses ``Sigma_n``.

    Parameters
    ----------
    dim : int
        Dimension of the ambient space.
    a_of : callable
        ``n -> A_n``; a scalar means ``A_n = scalar * identity``.
    """

    dim: int
    a_of: Callable[[Any], Any]

    @classmethod
    def scalar(cls, dim: int, a_of: Callable[[Any], float]) -> "ScalingSeq":
        return cls(dim, a_of)

    def a(self, n) -> np.ndarray:
        return _as_matrix(self.a_of(n), self.dim)

    def sigma_of(self, n) -> np.ndarray:
        return np.linalg.inv(self.a(n))

    def det_a(self, n) -> float:
        return float(abs(np.linalg.det(self.a(n))))

    def validate(self, ns: Sequence) -> None:
        """Check ``A_n Sigma_n = I`` and that ``||Sigma_n||`` shrinks along ``ns``."""
        norms = []
        for n in ns:
            a, s = self.a(n), self.sigma_of(n)
            if np.max(np.abs(a @ s - np.eye(self.dim))) > 1e-12:
                raise ValueError(f"A_n Sigma_n is not the identity at n={n}")
            norms.append(np.linalg.norm(s, 2))
        if len(norms) > 1 and not norms[-1] < norms[0]:
            raise ValueError("||Sigma_n|| does not decrease along the index list")


@dataclass(frozen=True)
class ReferenceLaw:
    """Limiting law ``mu``: characteristic function plus density evaluator.

    When ``density`` is omitted it is computed by Fourier inversion.
    """

    name: str
    phi: CharFn
    density: Callable[[np.ndarray], float] | None = None

    def density_at(self, x=0.0) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.density is not None:
            return float(self.density(x))
        return fourier.density_at(self.phi, x)

    # standard laws -------------------------------------------------------

    @classmethod
    def gaussian_real(cls) -> "ReferenceLaw":
        return cls("gaussian-real", CharFn(1, lambda t: np.exp(-0.5 * t * t), lambda r: np.exp(-0.5 * r * r)),
                   lambda x: math.exp(-0.5 * x[0] ** 2) / math.sqrt(2 * math.pi))

    @classmethod
    def gaussian_complex(cls) -> "ReferenceLaw":
        # independent standard normal real and imaginary parts
        return cls("gaussian-complex",
                   CharFn(2, lambda t: np.exp(-0.5 * np.sum(t * t, axis=1)), lambda r: np.exp(-0.5 * r * r)),
                   lambda x: math.exp(-0.5 * (x[0] ** 2 + x[1] ** 2)) / (2 * math.pi))

    @classmethod
    def cauchy(cls) -> "ReferenceLaw":
        return cls("cauchy", CharFn(1, lambda t: np.exp(-np.abs(t)), lambda r: np.exp(-r)),
                   lambda x: 1.0 / (math.pi * (1.0 + x[0] ** 2)))

    @classmethod
    def laplace(cls) -> "ReferenceLaw":
        return cls("laplace", CharFn(1, lambda t: 1.0 / (1.0 + t * t), lambda r: 1.0 / (1.0 + r * r)),
                   lambda x: 0.5 * math.exp(-abs(x[0])))

    @classmethod
    def stable(cls, p: float) -> "ReferenceLaw":
        c0 = fourier.stable_constant(p)
        phi = CharFn(1, lambda t: np.exp(-np.abs(t) ** p), lambda r: np.exp(-r**p))

        def density(x):
            if x[0] == 0.0:
                return c0
            return fourier.density_at(phi, x)

        return cls(f"stable({p:g})", phi, density)

    @classmethod
    def exp_sum(cls) -> "ReferenceLaw":
        # E1 + E2 with E_i standard exponentials: density x e^{-x}
        return cls("exp-sum", CharFn(1, lambda t: 1.0 / (1.0 - 1j * t) ** 2, lambda r: 1.0 / (1.0 + r * r)),
                   lambda x: x[0] * math.exp(-x[0]) if x[0] > 0 else 0.0)


Sampler = Callable[[Any, np.random.Generator, int], Any]


@dataclass(frozen=True)
class Scenario:
    """A sequence ``X_n`` in mod-phi form.

    Parameters
    ----------
    name : str
        Registry name.
    dim : int
        1 or 2.
    index_set : sequence
        Finite, ordered list of indices (integers or real parameters).
    charfn_of : callable
        ``n -> CharFn`` of ``X_n``.
    scaling : ScalingSeq
    reference : ReferenceLaw
    exact_prob : callable, optional
        ``(n, region) -> P[X_n in region]``.
    sampler : callable, optional
        ``(n, rng, size) -> values`` or ``(values, weights)``; values have
        shape ``(size,)`` or ``(size, 2)``.
    domination_h : callable, optional
        ``k -> h`` with ``h(t) >= |phi_n(Sigma_n^T t)|`` on ``|Sigma_n^T t| <= k``.
    discrete : bool
        Lattice or atomic laws; density inversion is refused.
    variant : str, optional
    mc_block : int
        Largest batch handed to the sampler at once.
    """

    name: str
    dim: int
    index_set: tuple
    charfn_of: Callable[[Any], CharFn]
    scaling: ScalingSeq
    reference: ReferenceLaw
    exact_prob: Callable[[Any, Region], float] | None = None
    sampler: Sampler | None = None
    domination_h: Callable[[float], Callable[[np.ndarray], np.ndarray]] | None = None
    discrete: bool = False
    variant: str | None = None
    mc_block: int = 65536
    info: dict = field(default_factory=dict)

    def scaled_charfn(self, n, t) -> np.ndarray:
        """``phi_n(Sigma_n^T t)`` at points ``t``."""
        t = _points(t, self.dim)
        return self.charfn_of(n)(_apply_adjoint(self.scaling.sigma_of(n), t, self.dim))


@dataclass
class LocalLimitReport:
    """Scaled probability ``|det A_n| P[X_n in B]`` against its predicted limit."""

    scenario: str
    variant: str | None
    n: Any
    region: Region
    method: str
    scaled_probability: float
    predicted_limit: float
    stderr: float | None = None
    samples: int | None = None
    seed: int | None = None
    diagnostics: dict = field(default_factory=dict)
    trend: TrendResult | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.scaled_probability >= -1e-12:
            raise ValueError("scaled probability must be nonnegative")
        if (self.stderr is not None) != (self.method == "monte-carlo"):
            raise ValueError("stderr is reported for Monte Carlo runs only")

    @property
    def within_4_stderr(self) -> bool | None:
        """Whether the prediction lies within 4 standard errors (Monte Carlo only)."""
        if self.stderr is None:
            return None
        return abs(self.scaled_probability - self.predicted_limit) <= 4.0 * self.stderr

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "schema": SCHEMA,
            "scenario": self.scenario,
            "variant": self.variant,
            "index": self.n,
            "region": self.region.to_dict(),
            "method": self.method,
            "scaled_probability": self.scaled_probability,
            "predicted_limit": self.predicted_limit,
        }
        if self.stderr is not None:
            out["stderr"] = self.stderr
            out["samples"] = self.samples
            out["seed"] = self.seed
        out["diagnostics"] = dict(self.diagnostics)
        out["trend"] = self.trend.to_dict() if self.trend is not None else {"improving": True, "values": []}
        if self.extra:
            out["extra"] = dict(self.extra)
        return out


# ---------------------------------------------------------------------------
# diagnostics


def check_h2(scn: Scenario, ns: Sequence, t_grid) -> TrendResult:
    """``sup_t |phi_n(Sigma_n^T t) - phi(t)|`` over ``t_grid`` for each ``n``."""
    t = _points(t_grid, scn.dim)
    target = scn.reference.phi(t)
    devs = [float(np.max(np.abs(scn.scaled_charfn(n, t) - target))) for n in ns]
    return trend(devs)


@dataclass(frozen=True)
class DominationResult:
    holds: bool
    worst_ratio: float
    per_n: tuple[float, ...]


def check_h3_domination(scn: Scenario, k: float, ns: Sequence, t_grid) -> DominationResult:
    """Check ``|phi_n(Sigma_n^T t)| <= h(t)`` on ``{|Sigma_n^T t| <= k}``.

    Raises
    ------
    MissingEnvelopeError
        When the scenario provides no envelope.
    """
    if scn.domination_h is None:
        raise MissingEnvelopeError(f"scenario {scn.name!r} has no domination envelope")
    h = scn.domination_h(k)
    t = _points(t_grid, scn.dim)
    ratios = []
    for n in ns:
        s = _apply_adjoint(scn.scaling.sigma_of(n), t, scn.dim)
        r = np.abs(s) if scn.dim == 1 else np.hypot(s[:, 0], s[:, 1])
        mask = r <= k
        if not np.any(mask):
            ratios.append(0.0)
            continue
        vals = np.abs(scn.charfn_of(n)(s[mask]))
        env = np.asarray(h(t[mask]), dtype=float)
        ratios.append(float(np.max(vals / env)))
    worst = max(ratios) if ratios else 0.0
    return DominationResult(worst <= 1.0, worst, tuple(ratios))


def _polar_grid(r_lo: float, r_hi: float, n_r: int = 96, n_th: int = 96):
    # Gauss-Legendre in r times uniform angles
    x, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (r_hi - r_lo) * x + 0.5 * (r_hi + r_lo)
    wr = 0.5 * (r_hi - r_lo) * w * r
    th = np.arange(n_th) * (2 * math.pi / n_th)
    rr, tt = np.meshgrid(r, th, indexing="ij")
    pts = np.stack([(rr * np.cos(tt)).reshape(-1), (rr * np.sin(tt)).reshape(-1)], 1)
    wts = np.repeat(wr * (2 * math.pi / n_th), n_th)
    return pts, wts


def _abs_integral_1d(phi: CharFn, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    f = lambda s: np.abs(phi(s)) + np.abs(phi(-s))  # noqa: E731
    val, _ = fourier.integrate_adaptive(f, lo, hi, abs_tol=1e-12, rel_tol=1e-9, initial_panels=64)
    return float(val.real)


def check_h3prime(scn: Scenario, eps: float, k: float, ns: Sequence) -> TrendResult:
    """``|det A_n| int_{eps <= |t| <= k} |phi_n(t)| dt`` for each ``n``.

    Under H1 and H2 these values tend to 0 exactly when the mid-range
    frequencies carry no mass in the limit.
    """
    if not 0 < eps < k:
        raise ValueError("need 0 < eps < k")
    vals = []
    for n in ns:
        phi = scn.charfn_of(n)
        if scn.dim == 1:
            integral = _abs_integral_1d(phi, eps, k)
        else:
            pts, w = _polar_grid(eps, k, 128, 128)
            integral = float(np.sum(np.abs(phi(pts)) * w))
        vals.append(scn.scaling.det_a(n) * integral)
    return trend(vals)


@dataclass(frozen=True)
class H4Result:
    values: TrendResult
    reference_tail: float


def check_h4prime(scn: Scenario, a: float, eps: float, ns: Sequence) -> H4Result:
    """``int_{|t| >= a, |Sigma_n^T t| <= eps} |phi_n(Sigma_n^T t)| dt`` per ``n``.

    ``reference_tail`` is ``int_{|t| >= a} |phi|`` for calibration.
    """
    if not (a > 0 and eps > 0):
        raise ValueError("need a > 0 and eps > 0")
    vals = []
    for n in ns:
        phi = scn.charfn_of(n)
        sigma = scn.scaling.sigma_of(n)
        if scn.dim == 1:
            s = abs(sigma[0, 0])
            # substitute u = s t
            vals.append(_abs_integral_1d(phi, s * a, eps) / s)
        else:
            # substitute u = Sigma^T t, dt = |det A| du, keep |A^T u| >= a
            amat = scn.scaling.a(n)
            pts, w = _polar_grid(0.0, eps, 192, 192)
            keep = np.hypot(*(pts @ amat).T) >= a
            vals.append(scn.scaling.det_a(n) * float(np.sum(np.abs(phi(pts[keep])) * w[keep])))
    ref = scn.reference.phi
    if scn.dim == 1:
        tail = _abs_integral_1d(ref, a, a + 200.0)
    else:
        pts, w = _polar_grid(a, a + 60.0, 256, 64)
        tail = float(np.sum(np.abs(ref(pts)) * w))
    return H4Result(trend(vals), tail)


# ---------------------------------------------------------------------------
# local limits


def _worker_counts(samples: int, workers: int) -> list[int]:
    base, extra = divmod(samples, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _mc_worker(scn: Scenario, n, region: Region, count: int, seed_seq: np.random.SeedSequence) -> tuple[float, float]:
    rng = np.random.default_rng(seed_seq)
    s1 = s2 = 0.0
    done = 0
    while done < count:
        size = min(scn.mc_block, count - done)
        out = scn.sampler(n, rng, size)
        if isinstance(out, tuple):
            values, weights = out
        else:
            values, weights = out, None
        hit = region.contains(values).astype(float)
        if weights is not None:
            hit = hit * np.asarray(weights, dtype=float)
        s1 += math.fsum(hit)
        s2 += math.fsum(hit * hit)
        done += size
    return s1, s2


def mc_probability(scn: Scenario, n, region: Region, samples: int, seed: int = 0, workers: int = 1) -> tuple[float, float]:
    """Monte Carlo estimate of ``P[X_n in region]`` and its standard error.

    The seed is split into ``workers`` independent streams; the result is
    reproducible for a fixed ``(seed, workers)``.  With importance weights
    the estimate is the weighted hit mean.
    """
    if scn.sampler is None:
        raise MethodUnavailableError(f"scenario {scn.name!r} has no sampler")
    if samples < 1:
        raise ValueError("samples must be positive")
    workers = max(1, min(int(workers), samples))
    children = np.random.SeedSequence(seed).spawn(workers)
    counts = _worker_counts(samples, workers)
    if workers == 1:
        parts = [_mc_worker(scn, n, region, counts[0], children[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda i: _mc_worker(scn, n, region, counts[i], children[i]), range(workers)))
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / samples)


def local_limit(
    scn: Scenario,
    n,
    region: Region,
    method: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    tol: float = 1e-10,
) -> LocalLimitReport:
    """Compute ``|det A_n| P[X_n in B]`` and the prediction ``(d mu/dm)(0) m(B)``.

    Parameters
    ----------
    method : {'exact', 'analytic', 'monte-carlo'}
        ``exact`` uses the scenario's probability backend, ``analytic``
        inverts the characteristic function (refused for discrete laws)
        and ``monte-carlo`` draws ``samples`` points from ``seed``.

    Raises
    ------
    MethodUnavailableError
    """
    if region.dim != scn.dim:
        raise ValueError("region dimension does not match the scenario")
    det = scn.scaling.det_a(n)
    predicted = scn.reference.density_at(np.zeros(scn.dim)) * region.measure()
    stderr = None
    extra: dict = {}
    if method == "exact":
        if scn.exact_prob is None:
            raise MethodUnavailableError(f"scenario {scn.name!r} has no exact probabilities")
        p = float(scn.exact_prob(n, region))
    elif method == "analytic":
        if scn.discrete:
            raise MethodUnavailableError(f"scenario {scn.name!r} is discrete; density inversion does not apply")
        res = fourier.interval_probability_detailed(scn.charfn_of(n), region, tol)
        p = res.value
        extra = {"truncation": res.truncation, "tail_bound": res.tail_bound, "quad_error": res.quad_error}
    elif method == "monte-carlo":
        p, se = mc_probability(scn, n, region, samples, seed, workers)
        stderr = det * se
    else:
        raise MethodUnavailableError(f"unknown method {method!r}")
    return LocalLimitReport(
        scenario=scn.name,
        variant=scn.variant,
        n=n,
        region=region,
        method=method,
        scaled_probability=max(det * p, 0.0),
        predicted_limit=predicted,
        stderr=stderr,
        samples=samples if method == "monte-carlo" else None,
        seed=seed if method == "monte-carlo" else None,
        extra=extra,
    )


# ---------------------------------------------------------------------------
# transforms


def shift_mean(scn: Scenario, alpha, alpha_n: Callable[[Any], Any], tol: float = 1e-2) -> Scenario:
    """Scenario for ``Y_n = X_n - alpha_n`` with limit shifted by ``alpha``.

    The reference becomes ``psi(t) = phi(t) exp(-i t.alpha)`` with density
    ``x -> (d mu/dm)(x + alpha)``, so the local limit predicts the density
    of ``mu`` at ``alpha``.

    Raises
    ------
    CalibrationError
        When ``Sigma_n alpha_n`` does not approach ``alpha`` along the
        index list (nonincreasing distances ending below ``tol``).
    """
    dim = scn.dim
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float)).reshape(dim)
    shifts = {n: np.atleast_1d(np.asarray(alpha_n(n), dtype=float)).reshape(dim) for n in scn.index_set}
    dists = [float(np.linalg.norm(scn.scaling.sigma_of(n) @ shifts[n] - alpha)) for n in scn.index_set]
    scale = max(1.0, float(np.linalg.norm(alpha)))
    if dists and (not trend(dists).improving or dists[-1] > tol * scale):
        raise CalibrationError(f"Sigma_n alpha_n does not approach alpha: distances {dists}")

    def shift_of(n):
        return shifts[n] if n in shifts else np.atleast_1d(np.asarray(alpha_n(n), dtype=float)).reshape(dim)

    base_ref = scn.reference

    def ref_eval(t):
        t = _points(t, dim)
        phase = alpha[0] * t if dim == 1 else t @ alpha
        return base_ref.phi(t) * np.exp(-1j * phase)

    ref_phi = CharFn(dim, ref_eval, base_ref.phi.decay_bound, base_ref.phi.cutoff)
    if base_ref.density is not None:
        ref_density = lambda x: base_ref.density(np.asarray(x, float).reshape(dim) + alpha)  # noqa: E731
    else:
        ref_density = None
    reference = ReferenceLaw(f"{base_ref.name}+shift", ref_phi, ref_density)

    def charfn_of(n):
        phi = scn.charfn_of(n)
        an = shift_of(n)

        def ev(t):
            t = _points(t, dim)
            phase = an[0] * t if dim == 1 else t @ an
            return phi(t) * np.exp(-1j * phase)

        return CharFn(dim, ev, phi.decay_bound, phi.cutoff)

    exact = None
    if scn.exact_prob is not None:
        base_exact = scn.exact_prob
        exact = lambda n, region: base_exact(n, region.translate(shift_of(n)))  # noqa: E731

    sampler = None
    if scn.sampler is not None:
        base_sampler = scn.sampler

        def sampler(n, rng, size):
            out = base_sampler(n, rng, size)
            an = shift_of(n)
            if isinstance(out, tuple):
                return (out[0] - (an[0] if dim == 1 else an), out[1])
            return out - (an[0] if dim == 1 else an)

    info = dict(scn.info)
    info["shift"] = alpha.tolist()
    return replace(scn, charfn_of=charfn_of, reference=reference, exact_prob=exact, sampler=sampler, domination_h=None, info=info)


def _image_region(region: Region, t: np.ndarray) -> Region:
    # T(B) for the shapes whose image stays in the same family
    p = region.params
    if region.kind == "interval":
        s = float(t[0, 0])
        lo, hi = sorted((s * p[0], s * p[1]))
        return Region.interval(lo, hi)
    if region.kind == "box" and t[0, 1] == 0 and t[1, 0] == 0:
        x0, x1 = sorted((t[0, 0] * p[0], t[0, 0] * p[1]))
        y0, y1 = sorted((t[1, 1] * p[2], t[1, 1] * p[3]))
        return Region.box(x0, x1, y0, y1)
    if region.kind == "disc":
        # scalar multiples of rotations map discs to discs
        s = math.sqrt(abs(np.linalg.det(t)))
        if np.allclose(t.T @ t, s * s * np.eye(2), rtol=1e-13, atol=1e-13 * s * s):
            c = t @ np.array(p[:2])
            return Region.disc(float(c[0]), float(c[1]), s * p[2])
    raise MethodUnavailableError("exact probabilities after this linear change need a non-standard region")


def linear_change(scn: Scenario, t_of: Callable[[Any], Any], c_max: float | None = None, override: bool = False) -> Scenario:
    """Scenario for ``T_n^{-1} X_n`` with scaling ``A_n' = T_n^{-1} A_n``.

    The limit law is unchanged, and the local limit reads
    ``|det A_n| / |det T_n| P[X_n in T_n B] -> (d mu/dm)(0) m(B)``.

    Raises
    ------
    BalancednessError
        When :func:`balancedness_check` fails (unless ``override``).
    """
    dim = scn.dim
    ns = list(scn.index_set)
    tmat = lambda n: _as_matrix(t_of(n), dim)  # noqa: E731
    if dim > 1 and ns and not override:
        bal = balancedness_check(scn.scaling.sigma_of, tmat, ns, c_max if c_max is not None else math.inf)
        if not bal.holds:
            raise BalancednessError(f"balancedness fails: C_n = {bal.per_n}")
    if len(ns) > 1:
        inv_norms = [np.linalg.norm(np.linalg.inv(tmat(n)), 2) for n in ns]
        st_norms = [np.linalg.norm(scn.scaling.sigma_of(n) @ tmat(n), 2) for n in ns]
        if not (inv_norms[-1] < inv_norms[0] and st_norms[-1] < st_norms[0]):
            warnings.warn("T_n^{-1} or Sigma_n T_n does not shrink along the index list", RuntimeWarning, stacklevel=2)

    base_a = scn.scaling.a
    scaling = ScalingSeq(dim, lambda n: np.linalg.solve(tmat(n), base_a(n)))

    def charfn_of(n):
        phi = scn.charfn_of(n)
        inv_t = np.linalg.inv(tmat(n))

        def ev(t):
            return phi(_apply_adjoint(inv_t, _points(t, dim), dim))

        return CharFn(dim, ev)

    exact = None
    if scn.exact_prob is not None:
        base_exact = scn.exact_prob
        exact = lambda n, region: base_exact(n, _image_region(region, tmat(n)))  # noqa: E731

    sampler = None
    if scn.sampler is not None:
        base_sampler = scn.sampler

        def sampler(n, rng, size):
            out = base_sampler(n, rng, size)
            vals, w = out if isinstance(out, tuple) else (out, None)
            inv_t = np.linalg.inv(tmat(n))
            vals = inv_t[0, 0] * vals if dim == 1 else vals @ inv_t.T
            return (vals, w) if w is not None else vals

    return replace(scn, charfn_of=charfn_of, scaling=scaling, exact_prob=exact, sampler=sampler, domination_h=None)


@dataclass(frozen=True)
class BalanceResult:
    """Outcome of :func:`balancedness_check`.

    ``witness`` is the largest ``|Sigma_n^T t|`` found and ``violating_t``
    the point attaining it.
    """

    holds: bool
    witness: float
    violating_t: tuple[float, ...]
    per_n: tuple[float, ...]


def balancedness_check(sigma_n: Callable, t_n: Callable, ns: Sequence, c_max: float, directions: int = 720) -> BalanceResult:
    """Search ``{|(Sigma_n T_n)^T t| = 1}`` for the largest ``|Sigma_n^T t|``.

    The unit sphere is sampled at ``directions`` evenly spaced angles in
    dimension 2 (both signs in dimension 1) and mapped through
    ``((Sigma_n T_n)^T)^{-1}``.  The condition holds when every maximum is
    at most ``c_max``.
    """
    per_n = []
    worst, worst_t = -math.inf, ()
    for n in ns:
        sigma = np.atleast_2d(np.asarray(sigma_n(n), dtype=float))
        tm = np.atleast_2d(np.asarray(t_n(n), dtype=float))
        dim = sigma.shape[0]
        if tm.shape != sigma.shape:
            tm = _as_matrix(tm, dim)
        m = sigma @ tm
        if dim == 1:
            u = np.array([[1.0], [-1.0]])
        else:
            ang = np.arange(directions) * (2 * math.pi / directions)
            u = np.stack([np.cos(ang), np.sin(ang)], 1)
        t = np.linalg.solve(m.T, u.T).T
        vals = np.linalg.norm(t @ sigma, axis=1)
        j = int(np.argmax(vals))
        per_n.append(float(vals[j]))
        if vals[j] > worst:
            worst, worst_t = float(vals[j]), tuple(float(v) for v in t[j])
    return BalanceResult(bool(worst <= c_max), worst, worst_t, tuple(per_n))
