"""Deterministic spectral/semi-Lagrangian lab for singular Vlasov systems.

A periodic-box kinetic solver whose force field comes from inverse-power
Fourier multipliers (with an optional elliptic screening), plus the
diagnostic machinery built around it: weighted phase-space norms, the
tracked bootstrap quantity, a velocity-averaging operator test bench, and
the Penrose stability function.  Everything is deterministic: same inputs,
same bytes out.
"""

from .kernels import KernelSpec, multiplier, verify_decay_bound
from .phase_space import (Distribution, GridGeometry, NormReport, key_quantity,
                          regularity_thresholds, weighted_sobolev_norm)
from .field import SpectralDensity, solve_field_limit, solve_field_regularized
from .integrator import RunResult, run
from .averaging import (AveragingSymbol, apply_kg, estimate_operator_norm,
                        kg_scaling_sweep, symbol_norm)
from .penrose import VelocityProfile, penrose_value, stability_infimum
from .experiments import (StudyAborted, StudyResult, bootstrap_monitor,
                          epsilon_convergence_study, small_time_growth_probe)
from .config import ConfigError, RunConfig, parse_config, serialize_config

__version__ = "0.1.0"

__all__ = [
    "KernelSpec", "multiplier", "verify_decay_bound",
    "Distribution", "GridGeometry", "NormReport", "key_quantity",
    "regularity_thresholds", "weighted_sobolev_norm",
    "SpectralDensity", "solve_field_limit", "solve_field_regularized",
    "RunResult", "run",
    "AveragingSymbol", "apply_kg", "estimate_operator_norm",
    "kg_scaling_sweep", "symbol_norm",
    "VelocityProfile", "penrose_value", "stability_infimum",
    "StudyAborted", "StudyResult", "bootstrap_monitor",
    "epsilon_convergence_study", "small_time_growth_probe",
    "ConfigError", "RunConfig", "parse_config", "serialize_config",
    "__version__",
]
