"""
Core module - model equations, converters and integration.

Components:
    - converters: Clamped piecewise-linear lookup tables (eta, mfp, prices, theta)
    - parameters: Validated model parameters and scenario definitions
    - model: Stocks, flows, income and consumption
    - integrator: Fixed-step Euler / RK4 runs recorded as trajectories
    - structure: Stock-flow diagram as a signed influence graph
    - errors: Error taxonomy
"""

from .converters import DEFAULT_CONVERTERS, ConverterSet, TableFunction, eval_table
from .errors import CalibrationError, ConfigError, InputError, ModelDomainError, ModelError
from .parameters import ModelParameters, ScenarioSpec, baseline_scenario
from .model import DerivedOutputs, SimState, derivatives, derived_outputs
from .integrator import IntegrationConfig, RampSpec, Trajectory, ramp_multiplier, simulate
from .structure import feedback_loops, model_structure, stock_flows

__all__ = [
    "DEFAULT_CONVERTERS",
    "ConverterSet",
    "TableFunction",
    "eval_table",
    "CalibrationError",
    "ConfigError",
    "InputError",
    "ModelDomainError",
    "ModelError",
    "ModelParameters",
    "ScenarioSpec",
    "baseline_scenario",
    "DerivedOutputs",
    "SimState",
    "derivatives",
    "derived_outputs",
    "IntegrationConfig",
    "RampSpec",
    "Trajectory",
    "ramp_multiplier",
    "simulate",
    "feedback_loops",
    "model_structure",
    "stock_flows",
]
