"""Exact simulation and Monte Carlo measure analysis of one-dimensional cellular automata."""

from .core import (
    LocalRule,
    TorusConfig,
    WindowConfig,
    apply_local,
    evolve_column,
    rule_from_table,
    step_lightcone,
    step_torus,
)
from .kernels import BACKEND
from .measures import StochasticMeasure, bernoulli, markov
from .rng import RandomStream
from .zoo import eca, gilman_fs, identity_rule, shift_rule

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "LocalRule",
    "RandomStream",
    "StochasticMeasure",
    "TorusConfig",
    "WindowConfig",
    "apply_local",
    "bernoulli",
    "eca",
    "evolve_column",
    "gilman_fs",
    "identity_rule",
    "markov",
    "rule_from_table",
    "shift_rule",
    "step_lightcone",
    "step_torus",
]
