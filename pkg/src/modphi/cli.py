"""Command-line front end.

``modphi run SCENARIO`` computes scaled local-limit probabilities with
diagnostics, ``modphi constants`` prints reference constants,
``modphi sandwich`` emits band-limited sandwich data and ``modphi ks-phi``
evaluates the conjectural limiting function on the critical line.

Exit codes: 0 on success, 1 on errors, 2 when a diagnostic flags
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Callable, Sequence

import numpy as np

from . import engine, fourier, specfun
from .engine import Scenario
from .fourier import Region, TuningError
from .limits import CapacityError
from .scenarios import arithmetic, classical, matrix

EXIT_OK, EXIT_ERROR, EXIT_FLAG = 0, 1, 2
SLOW_SQUAREFREE_X = 10_000


class CliError(Exception):
    """A user-facing error that maps to exit code 1."""


# ---------------------------------------------------------------------------
# scenario registry


def _ints(values: Sequence[float]) -> list[int]:
    return [int(round(v)) for v in values]


def _build_stable(idx, a):
    return classical.stable_scenario(a.p, a.increment or ("uniform-symmetric" if a.p == 2 else "exact-stable"), _ints(idx))


def _build_winding(idx, a):
    return classical.winding_scenario([float(v) for v in idx])


def _build_poisson(idx, a):
    return classical.poisson_scenario([float(v) for v in idx])


def _build_cycles(idx, a):
    return classical.poisson_scenario(_ints(idx), variant="permutation-cycles")


def _build_gamma(idx, a):
    return classical.gamma_shift_scenario([float(v) for v in idx], a.c)


def _build_dedekind(idx, a):
    taus = _parse_list(a.taus) if a.taus else None
    return arithmetic.dedekind_scenario(_ints(idx), taus)


def _build_zeta(idx, a):
    return arithmetic.zeta_dist_scenario([float(v) for v in idx])


def _build_squarefree(idx, a):
    variant = a.variant or "symmetrized"
    xs = _ints(idx)
    if variant in ("symmetrized", "one-sided") and max(xs) > SLOW_SQUAREFREE_X and not a.slow:
        raise CliError(f"squarefree x > {SLOW_SQUAREFREE_X} needs --slow")
    return arithmetic.squarefree_scenario(xs, variant, a.q)


def _build_rmt(idx, a):
    return matrix.ks_scenario(a.family or "U", _ints(idx))


def _build_biased(idx, a):
    return matrix.biased_so_scenario(_ints(idx))


def _build_stochastic(idx, a):
    return matrix.stochastic_zeta_scenario(_ints(idx))


# name -> (builder, default index list)
REGISTRY: dict[str, tuple[Callable[[list, argparse.Namespace], Scenario], list[float]]] = {
    "stable": (_build_stable, [1e2, 1e4, 1e6]),
    "winding": (_build_winding, [10.0, 20.0, 40.0]),
    "poisson": (_build_poisson, [1e4, 1e6, 1e8]),
    "cycles": (_build_cycles, [1e2, 1e4, 1e6]),
    "gamma-shift": (_build_gamma, [1e2, 1e4]),
    "dedekind": (_build_dedekind, [300, 3000]),
    "zeta-dist": (_build_zeta, [1.2, 1.1, 1.05]),
    "squarefree": (_build_squarefree, [100, 1000, 10000]),
    "rmt": (_build_rmt, [16, 64, 256]),
    "rmt-biased": (_build_biased, [8, 16, 32]),
    "stochastic-zeta": (_build_stochastic, [100, 1000, 10000]),
}


# ---------------------------------------------------------------------------
# helpers


def _parse_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise CliError(f"cannot parse list {text!r}") from exc


def _plain(value: Any) -> Any:
    # JSON-safe python scalars
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _h2_grid(dim: int) -> np.ndarray:
    if dim == 1:
        return np.linspace(-5.0, 5.0, 101)
    g = np.linspace(-2.0, 2.0, 21)
    gx, gy = np.meshgrid(g, g, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


def _default_method(scn: Scenario) -> str:
    if scn.exact_prob is not None:
        return "exact"
    if not scn.discrete:
        return "analytic"
    return "monte-carlo"


def _flagged(rep: engine.LocalLimitReport, tol: float) -> bool:
    slack = tol * rep.predicted_limit + 1e-3
    if rep.stderr is not None:
        slack += 4.0 * rep.stderr
    return abs(rep.scaled_probability - rep.predicted_limit) > slack


# ---------------------------------------------------------------------------
# commands


def cmd_run(a: argparse.Namespace) -> tuple[list[dict], int]:
    """Run one scenario over its index list; returns report dicts and the exit code."""
    if a.scenario not in REGISTRY:
        raise CliError(f"unknown scenario {a.scenario!r}; choose from {', '.join(sorted(REGISTRY))}")
    if a.samples < 100:
        raise CliError("--samples must be at least 100")
    builder, default_idx = REGISTRY[a.scenario]
    idx = _parse_list(a.index) if a.index else list(default_idx)
    scn = builder(idx, a)
    region = Region.parse(a.region) if a.region else (Region.interval(-1.0, 1.0) if scn.dim == 1 else Region.disc(0.0, 0.0, 1.0))
    method = a.method or _default_method(scn)
    k_list = _parse_list(a.k_list) if a.k_list else list(engine.DEFAULT_K_LIST)
    config = {
        "scenario": a.scenario,
        "variant": scn.variant,
        "index": [_plain(v) for v in scn.index_set],
        "region": a.region or region.to_dict()["kind"],
        "method": method,
        "samples": a.samples,
        "seed": a.seed,
        "workers": a.workers,
        "k_list": k_list,
        "slow": bool(a.slow),
    }
    reports = []
    for i, n in enumerate(scn.index_set):
        rep = engine.local_limit(scn, n, region, method, a.samples, a.seed + i, a.workers)
        diag: dict[str, Any] = {}
        if not a.skip_h2:
            diag["h2_deviation"] = engine.check_h2(scn, [n], _h2_grid(scn.dim)).values[0]
        if scn.domination_h is not None:
            dom = engine.check_h3_domination(scn, max(k_list), [n], _h2_grid(scn.dim))
            diag["domination_ratio"] = dom.worst_ratio
        if a.h3prime:
            diag["h3prime"] = {str(k): engine.check_h3prime(scn, 0.1, k, [n]).values[0] for k in k_list}
        if a.h4prime:
            h4 = engine.check_h4prime(scn, 1.0, 0.1, [n])
            diag["h4prime"] = {"values": list(h4.values.values), "reference_tail": h4.reference_tail}
        rep.diagnostics = diag
        reports.append(rep)
    # Monte Carlo deviations are discounted by two standard errors before the trend test
    errors = [max(abs(r.scaled_probability - r.predicted_limit) - 2.0 * (r.stderr or 0.0), 0.0) for r in reports]
    tr = engine.trend(errors)
    for r in reports:
        r.trend = tr
    flag = (not tr.improving) or _flagged(reports[-1], a.flag_tol)
    out = []
    for r in reports:
        d = _plain(r.to_dict())
        d["flagged"] = bool(flag)
        d["config"] = config
        out.append(d)
    return out, EXIT_FLAG if flag else EXIT_OK


CSV_FIELDS = [
    "schema", "scenario", "variant", "index", "region_kind", "region_params", "region_measure", "method",
    "scaled_probability", "predicted_limit", "stderr", "samples", "seed", "h2_deviation", "domination_ratio",
    "trend_improving", "trend_values", "flagged",
]


def reports_to_csv(reports: list[dict]) -> str:
    """Flatten report dicts to CSV (lists joined by ``;``)."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        diag = r.get("diagnostics", {})
        w.writerow({
            "schema": r["schema"],
            "scenario": r["scenario"],
            "variant": r["variant"] if r["variant"] is not None else "",
            "index": repr(r["index"]),
            "region_kind": r["region"]["kind"],
            "region_params": ";".join(repr(v) for v in r["region"]["params"]),
            "region_measure": repr(r["region"]["measure"]),
            "method": r["method"],
            "scaled_probability": repr(r["scaled_probability"]),
            "predicted_limit": repr(r["predicted_limit"]),
            "stderr": repr(r["stderr"]) if "stderr" in r else "",
            "samples": r.get("samples", ""),
            "seed": r.get("seed", ""),
            "h2_deviation": repr(diag["h2_deviation"]) if "h2_deviation" in diag else "",
            "domination_ratio": repr(diag["domination_ratio"]) if "domination_ratio" in diag else "",
            "trend_improving": str(r["trend"]["improving"]).lower(),
            "trend_values": ";".join(repr(v) for v in r["trend"]["values"]),
            "flagged": str(r["flagged"]).lower(),
        })
    return buf.getvalue()


def cmd_constants() -> tuple[dict, int]:
    """Stable-law constants, eta with its cross-check, zeta(2) and small Barnes G values."""
    rows = []
    for p in (0.5, 1.0, 1.5, 2.0):
        rows.append({"name": f"c_{p:g}", "value": fourier.stable_constant(p), "source": "quadrature of exp(-|t|^p)/(2 pi)"})
    flag = False
    try:
        eta = arithmetic.eta_constant()
        rows.append({"name": "eta", "value": eta.value, "check": eta.via_rho, "residual": eta.residual,
                     "source": "(1/2pi) int phi vs exp(-2 gamma) int rho^2"})
    except ArithmeticError as exc:
        rows.append({"name": "eta", "error": str(exc)})
        flag = True
    rows.append({"name": "zeta(2)", "value": specfun.zeta_real(2.0), "check": math.pi**2 / 6, "source": "Euler-Maclaurin"})
    for k in range(1, 5):
        rows.append({"name": f"G({k})", "value": math.exp(specfun.barnes_g_log(float(k)).real),
                     "check": math.prod(math.factorial(j) for j in range(k - 1)), "source": "Barnes recursion"})
    return {"schema": engine.SCHEMA, "constants": _plain(rows)}, EXIT_FLAG if flag else EXIT_OK


def _bump(u: np.ndarray) -> np.ndarray:
    return np.clip(1.0 - u * u, 0.0, None) ** 3


def _triangle(u: np.ndarray) -> np.ndarray:
    return np.clip(1.0 - np.abs(u), 0.0, None)


def cmd_sandwich(name: str, eta: float) -> tuple[Any, dict, int]:
    """Build the sandwich pair for a builtin function; returns (pair, summary, exit code)."""
    if name == "triangle":
        pair = fourier.sandwich_approximation(_triangle, eta, dim=1, support=1.0, f_sup=1.0)
    elif name == "bump2d":
        pair = fourier.sandwich_tensor(_bump, eta)
    else:
        raise CliError(f"unknown builtin {name!r}; choose triangle or bump2d")
    ok = pair.order_holds() and pair.gap_integral <= eta
    summary = {
        "schema": engine.SCHEMA,
        "function": name,
        "eta": eta,
        "gap_integral": pair.gap_integral,
        "order_holds": pair.order_holds(),
        "fourier_support_radius": pair.fourier_support_radius,
        "spectral_mass_outside": pair.spectral_mass_outside(),
        "nodes": int(pair.f.shape[0]),
    }
    return pair, _plain(summary), EXIT_OK if ok else EXIT_FLAG


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modphi", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="scaled local-limit probabilities for a scenario")
    run.add_argument("scenario", help=", ".join(sorted(REGISTRY)))
    run.add_argument("--index", "--ns", "--lambdas", "--log-us", "--sigmas", "--xs", dest="index",
                     help="comma-separated index values")
    run.add_argument("--region", help="a,b | box:x0,x1,y0,y1 | disc:cx,cy,r")
    run.add_argument("--method", choices=["exact", "analytic", "monte-carlo"])
    run.add_argument("--samples", type=int, default=100_000)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--variant", choices=list(arithmetic.SQUAREFREE_VARIANTS))
    run.add_argument("--q", type=int, default=2, help="field size for --variant fq")
    run.add_argument("--c", type=float, default=0.0, help="shift rate for gamma-shift")
    run.add_argument("--p", type=float, default=1.0, help="stable index")
    run.add_argument("--increment", choices=["exact-stable", "uniform-symmetric", "cauchy"])
    run.add_argument("--family", type=str.upper, choices=["U", "SO", "USP"])
    run.add_argument("--taus", help="tau_N values for dedekind")
    run.add_argument("--k-list", help="cutoffs for domination and H3' checks")
    run.add_argument("--h3prime", action="store_true")
    run.add_argument("--h4prime", action="store_true")
    run.add_argument("--skip-h2", action="store_true")
    run.add_argument("--flag-tol", type=float, default=0.5,
                     help="relative deviation of the last index that raises the diagnostic flag")
    run.add_argument("--slow", action="store_true", help="allow expensive sizes")
    run.add_argument("--format", choices=["json", "csv"], default="json")
    run.add_argument("--out")

    sub.add_parser("constants", help="reference constants with cross-checks").add_argument("--out")

    sw = sub.add_parser("sandwich", help="band-limited sandwich for a builtin function")
    sw.add_argument("function", choices=["triangle", "bump2d"])
    sw.add_argument("--eta", type=float, default=0.5)
    sw.add_argument("--format", choices=["json", "csv"], default="json")
    sw.add_argument("--out")

    ks = sub.add_parser("ks-phi", help="conjectural limiting function Phi(t1, t2)")
    ks.add_argument("t1", type=float)
    ks.add_argument("t2", type=float)
    ks.add_argument("--cutoff", type=int)
    ks.add_argument("--out")
    return ap


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_VALUE_OPTIONS = ("--region", "--index", "--ns", "--lambdas", "--log-us", "--sigmas", "--xs", "--taus", "--k-list")


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    # argparse reads "-1,1" as an option; glue such values to their flag
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    if getattr(args, "family", None) == "USP":
        args.family = "USp"
    try:
        if args.command == "run":
            reports, code = cmd_run(args)
            text = reports_to_csv(reports) if args.format == "csv" else json.dumps(reports, indent=2) + "\n"
        elif args.command == "constants":
            payload, code = cmd_constants()
            text = json.dumps(payload, indent=2) + "\n"
        elif args.command == "sandwich":
            pair, summary, code = cmd_sandwich(args.function, args.eta)
            text = pair.to_csv() if args.format == "csv" else json.dumps(summary, indent=2) + "\n"
            if args.format == "csv":
                sys.stderr.write(json.dumps(summary) + "\n")
        else:
            res = matrix.ks_conjecture_phi(args.t1, args.t2, args.cutoff)
            payload = {"schema": engine.SCHEMA, "t": [args.t1, args.t2], "re": res.value.real, "im": res.value.imag,
                       "prime_cutoff": res.prime_cutoff, "tail_bound": res.tail_bound}
            code = EXIT_OK
            text = json.dumps(_plain(payload), indent=2) + "\n"
    except TuningError as exc:
        sys.stderr.write(f"modphi: {exc} (achieved gap {exc.achieved_gap:.4g})\n")
        return EXIT_ERROR
    except (CliError, CapacityError, ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"modphi: {exc}\n")
        return EXIT_ERROR
    _emit(text, args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
