"""Mod-phi convergence and local limit theorems, with worked scenarios."""

from ._accel import backend
from .engine import (
    LocalLimitReport,
    ReferenceLaw,
    ScalingSeq,
    Scenario,
    balancedness_check,
    check_h2,
    check_h3_domination,
    check_h3prime,
    check_h4prime,
    linear_change,
    local_limit,
    mc_probability,
    shift_mean,
)
from .fourier import CharFn, Region

__version__ = "0.1.0"

__all__ = [
    "backend",
    "CharFn",
    "Region",
    "ReferenceLaw",
    "ScalingSeq",
    "Scenario",
    "LocalLimitReport",
    "local_limit",
    "mc_probability",
    "shift_mean",
    "linear_change",
    "balancedness_check",
    "check_h2",
    "check_h3_domination",
    "check_h3prime",
    "check_h4prime",
]
