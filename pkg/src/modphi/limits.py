"""Capacity limits for enumerations, sieves and samplers.

Every cap can be raised together by setting ``MODPHI_CAPACITY`` to a
multiplier, e.g. ``MODPHI_CAPACITY=10``.
"""

from __future__ import annotations

import os

DEFAULTS = {
    "sieve": 10**8,
    "coprime_pairs": 10**5,
    "dedekind_bruteforce": 10**5,
    "dedekind_scenario": 10**4,
    "squarefree_x": 10**5,
    "stochastic_zeta_x": 10**5,
    "haar_size": 512,
    "biased_so_n": 256,
}


class CapacityError(ValueError):
    """An input exceeds a configured capacity."""


def capacity(name: str) -> int:
    """Current cap for ``name`` after applying ``MODPHI_CAPACITY``."""
    try:
        factor = float(os.environ.get("MODPHI_CAPACITY", "1") or 1)
    except ValueError:
        factor = 1.0
    return int(DEFAULTS[name] * max(factor, 1.0))


def check_capacity(name: str, value: float) -> None:
    cap = capacity(name)
    if value > cap:
        raise CapacityError(f"{name}: {value:g} exceeds capacity {cap:g} (raise MODPHI_CAPACITY)")
