"""Josephson-energy variability of tunnel junctions with rough interfaces."""

__version__ = "0.1.0"

from .domain import (CONSTANTS, GridSpec, JunctionParams, PhysicalConstants, RoughnessParams,
                     ValidationError, validate)
from .randfield import (HeightField, ThicknessMap, estimate_statistics, synthesize_field,
                        thickness_map)
from .stats import (LogNormalFit, TransmonEstimate, fit_lognormal, histogram, lognormal_moments,
                    transmon_frequency)
from .transport import (ConductanceTable, build_conductance_table, conductance_density,
                        ej_from_conductance, ej_rough, ej_short_junction, ej_uniform,
                        length_scales)
from .ensemble import EnsembleConfig, EnsembleResult, run_ensemble, run_sweep

__all__ = [
    "CONSTANTS", "ConductanceTable", "EnsembleConfig", "EnsembleResult", "GridSpec", "HeightField",
    "JunctionParams", "LogNormalFit", "PhysicalConstants", "RoughnessParams", "ThicknessMap",
    "TransmonEstimate", "ValidationError", "build_conductance_table", "conductance_density",
    "ej_from_conductance", "ej_rough", "ej_short_junction", "ej_uniform", "estimate_statistics",
    "fit_lognormal", "histogram", "length_scales", "lognormal_moments", "run_ensemble", "run_sweep",
    "synthesize_field", "thickness_map", "transmon_frequency", "validate",
]
