"""Worked scenarios: classical limits, arithmetic models and random matrices."""

from .arithmetic import (
    coprime_ratio_sum,
    dedekind_scenario,
    eta_constant,
    one_sided_limit,
    squarefree_scenario,
    vardi_bound_check,
    zeta_dist_scenario,
)
from .classical import gamma_shift_scenario, poisson_scenario, stable_scenario, winding_scenario
from .matrix import (
    biased_so_scenario,
    importance_summary,
    ks_conjecture_phi,
    ks_scenario,
    stochastic_zeta_scenario,
)

__all__ = [
    "stable_scenario",
    "winding_scenario",
    "poisson_scenario",
    "gamma_shift_scenario",
    "dedekind_scenario",
    "vardi_bound_check",
    "zeta_dist_scenario",
    "coprime_ratio_sum",
    "squarefree_scenario",
    "eta_constant",
    "one_sided_limit",
    "ks_scenario",
    "biased_so_scenario",
    "importance_summary",
    "stochastic_zeta_scenario",
    "ks_conjecture_phi",
]
