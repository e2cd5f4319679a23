"""
Experiments module - scenarios, calibration, uncertainty and sweeps.

Components:
    - scenarios: Named experiments and scenario-vs-baseline comparisons
    - calibration: Golden-section fit of beta (and the eta scale) to anchors
    - sensitivity: Latin hypercube paired ensembles and percentile bands
    - sweep: Alpha x fold heatmap and minimal preventing fold
"""

from .scenarios import ComparisonSummary, compare_at, default_scenarios, run_comparisons, run_pair
from .calibration import CalibrationResult, CalibrationTarget, calibrate
from .sensitivity import (
    DistributionSummary,
    LhsDesign,
    ParameterSpace,
    SensitivitySettings,
    lhs_sample,
    run_ensemble,
    summarize,
)
from .sweep import GridSpec, ThresholdQuery, ThresholdResult, grid_sweep, threshold_search

__all__ = [
    "ComparisonSummary",
    "compare_at",
    "default_scenarios",
    "run_comparisons",
    "run_pair",
    "CalibrationResult",
    "CalibrationTarget",
    "calibrate",
    "DistributionSummary",
    "LhsDesign",
    "ParameterSpace",
    "SensitivitySettings",
    "lhs_sample",
    "run_ensemble",
    "summarize",
    "GridSpec",
    "ThresholdQuery",
    "ThresholdResult",
    "grid_sweep",
    "threshold_search",
]
