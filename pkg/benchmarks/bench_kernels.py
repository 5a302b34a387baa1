"""Time the compiled kernels against their numpy fallbacks.

Usage::

    python benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best wall time over ``--repeat`` runs for the numba
path (after a warm-up call that triggers compilation) and the numpy path.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from modphi import _accel, arith, specfun
from modphi.scenarios import classical


def _rho_start() -> np.ndarray:
    return np.ones(specfun._RHO_STEPS + 1)


CASES = [
    (
        "sieve_primes(10^7)",
        lambda: arith.sieve_primes(10**7, use_numba=True),
        lambda: arith.sieve_primes(10**7, use_numba=False),
    ),
    (
        "dedekind_numerators(2, 2000)",
        lambda: arith.dedekind_numerators(2, 2000, use_numba=True),
        lambda: arith.dedekind_numerators(2, 2000, use_numba=False),
    ),
    (
        "cycles_pmf(10^6), recursion vs DFT",
        lambda: classical.cycles_pmf(10**6, kmax=120, use_numba=True),
        lambda: classical.cycles_pmf(10**6, kmax=120, use_numba=False),
    ),
    (
        "dickman table to u=16",
        lambda: specfun._rho_extend(_rho_start(), specfun._RHO_STEPS, 16 * specfun._RHO_STEPS + 2),
        lambda: specfun._rho_extend.py_func(_rho_start(), specfun._RHO_STEPS, 16 * specfun._RHO_STEPS + 2),
    ),
]


def best_of(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if not _accel.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':32s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speed-up':>9s}")
    for name, fast, slow in CASES:
        fast()  # compile
        t_fast = best_of(fast, args.repeat)
        t_slow = best_of(slow, args.repeat)
        print(f"{name:32s} {t_fast:10.4f} {t_slow:10.4f} {t_slow / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
