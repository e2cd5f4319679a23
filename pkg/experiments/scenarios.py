"""
Scenario Engine - named experiments and scenario-vs-baseline comparisons.

Flow:
    1. Resolve a scenario (alpha, job fold, ramp)
    2. Run it next to the baseline on the same time grid
    3. Compare the two at a grid time (income, consumption, underutilisation)
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.converters import DEFAULT_CONVERTERS, ConverterSet
from core.errors import InputError
from core.integrator import IntegrationConfig, Trajectory, simulate
from core.parameters import ModelParameters, ScenarioSpec, baseline_scenario

logger = logging.getLogger(__name__)


METRICS = ("income_pc", "consumption_index", "underutilised_persons")

# Metrics reported as increases rather than reductions
INCREASE_METRICS = ("underutilised_persons",)


# ==================== Published Anchors ====================

@dataclass(frozen=True)
class PublishedAnchor:
    """One published row: mean reduction and percent statistics."""
    mean_reduction: float
    mean_pct: float
    median_pct: float
    lo95: float
    hi95: float


# (scenario, metric) -> published values; report-only, never asserted
PUBLISHED_RESULTS: Dict[Tuple[str, str], PublishedAnchor] = {
    ("a", "income_pc"): PublishedAnchor(5035.1, 12.74, 12.73, 7.29, 18.06),
    ("b", "income_pc"): PublishedAnchor(10244.8, 25.96, 25.82, 20.61, 31.76),
    ("c", "income_pc"): PublishedAnchor(12630.6, 25.96, 32.06, 26.06, 37.84),
    ("a", "consumption_index"): PublishedAnchor(0.0674, 7.34, 7.59, -0.23, 14.79),
    ("b", "consumption_index"): PublishedAnchor(0.1939, 21.21, 21.03, 13.56, 28.33),
    ("c", "consumption_index"): PublishedAnchor(0.2527, 27.66, 27.92, 20.14, 34.80),
    ("a", "underutilised_persons"): PublishedAnchor(1036650.0, 37.63, 36.76, 21.03, 57.97),
    ("b", "underutilised_persons"): PublishedAnchor(2758013.0, 99.76, 98.38, 70.61, 137.52),
    ("c", "underutilised_persons"): PublishedAnchor(3808004.0, 137.69, 136.99, 98.13, 179.70),
}

# Minimal new-job fold preventing a consumption decline at alpha = 11%
PUBLISHED_THRESHOLD_FOLD = 10.8


def published_anchor(scenario_id: str, metric: str) -> Optional[PublishedAnchor]:
    return PUBLISHED_RESULTS.get((scenario_id, metric))


# ==================== Named Scenarios ====================

COMPARISON_SCENARIOS = ("a", "b", "c")


def default_scenarios(params: Optional[ModelParameters] = None) -> Dict[str, ScenarioSpec]:
    """The experiments of the study, keyed by id."""
    params = params or ModelParameters()
    return {
        "baseline": baseline_scenario(params),
        "a": ScenarioSpec(id="a", alpha=0.04, notes="K-L ratio 4% increase per annum"),
        "b": ScenarioSpec(id="b", alpha=0.07, notes="K-L ratio 7% increase per annum"),
        "c": ScenarioSpec(id="c", alpha=0.10, notes="K-L ratio 10% increase per annum"),
        "b_jobs": ScenarioSpec(id="b_jobs", alpha=0.07, job_fold=6.0,
                                  notes="moderate deepening with a 6-fold job creation rate"),
        "substitution": ScenarioSpec(id="substitution", alpha=0.11, notes="substitution of a quarter of current work"),
    }


# ==================== Comparison ====================

@dataclass(frozen=True)
class ComparisonSummary:
    """Scenario against baseline for one metric at one time."""
    metric: str
    t: float
    baseline_value: float
    scenario_value: float
    abs_reduction: float
    pct_reduction: float
    direction: str  # "reduction" or "increase"

    def to_dict(self) -> dict:
        return asdict(self)


def _metric_value(traj: Trajectory, t: float, metric: str) -> float:
    state, out = traj.at(t)
    if metric == "underutilised_persons":
        return state.u
    return getattr(out, metric)


def compare_values(metric: str, t: float, baseline_value: float,
                   scenario_value: float) -> ComparisonSummary:
    """
    Difference of two values, signed so that a loss is positive.

    Income and consumption report reductions (positive when the scenario
    is below baseline); underutilised persons report increases.
    """
    if metric in INCREASE_METRICS:
        diff = scenario_value - baseline_value
        direction = "increase"
    else:
        diff = baseline_value - scenario_value
        direction = "reduction"
    pct = 100.0 * diff / baseline_value if baseline_value != 0 else math.nan

    return ComparisonSummary(
        metric=metric,
        t=t,
        baseline_value=baseline_value,
        scenario_value=scenario_value,
        abs_reduction=diff,
        pct_reduction=pct,
        direction=direction,
    )


def compare_at(baseline: Trajectory, scenario: Trajectory, t: float) -> List[ComparisonSummary]:
    """The three comparison metrics at grid time t."""
    if not np.array_equal(baseline.times, scenario.times):
        raise InputError("baseline and scenario trajectories are on different time grids")

    return [
        compare_values(metric, t, _metric_value(baseline, t, metric), _metric_value(scenario, t, metric))
        for metric in METRICS
    ]


def pct_change(baseline_value: float, scenario_value: float) -> float:
    """Signed percent change of the scenario against baseline (NaN on a zero baseline)."""
    if baseline_value == 0:
        return math.nan
    return 100.0 * (scenario_value - baseline_value) / baseline_value


@dataclass(frozen=True)
class SignDiscrepancy:
    """A computed difference pointing the other way from the published one."""
    scenario_id: str
    metric: str
    computed_pct: float
    published_pct: float

    def to_dict(self) -> dict:
        return asdict(self)


def sign_discrepancy(scenario_id: str, metric: str, computed_pct: float) -> Optional[SignDiscrepancy]:
    """Compare against the published mean percent; a mismatch is logged as a finding."""
    anchor = published_anchor(scenario_id, metric)
    if anchor is None or anchor.mean_pct == 0 or math.isnan(computed_pct):
        return None
    if (computed_pct > 0) == (anchor.mean_pct > 0):
        return None
    finding = SignDiscrepancy(scenario_id=scenario_id, metric=metric,
                              computed_pct=computed_pct, published_pct=anchor.mean_pct)
    logger.warning("sign discrepancy scenario=%s metric=%s computed_pct=%.4f published_pct=%.4f",
                   scenario_id, metric, computed_pct, anchor.mean_pct)
    return finding


# ==================== Runs ====================

def run_pair(params: ModelParameters, scenario: ScenarioSpec,
             cfg: Optional[IntegrationConfig] = None,
             converters: ConverterSet = DEFAULT_CONVERTERS) -> Tuple[Trajectory, Trajectory]:
    """Baseline (params.alpha, fold 1) and scenario on the same grid."""
    cfg = cfg or IntegrationConfig()
    baseline = simulate(params, baseline_scenario(params), cfg, converters)
    scenario_traj = simulate(params, scenario, cfg, converters)
    logger.debug("ran pair scenario=%s alpha=%s job_fold=%s", scenario.id, scenario.alpha, scenario.job_fold)
    return baseline, scenario_traj


def run_comparisons(params: ModelParameters, scenarios: Dict[str, ScenarioSpec],
                    cfg: Optional[IntegrationConfig] = None,
                    converters: ConverterSet = DEFAULT_CONVERTERS,
                    scenario_ids: Optional[List[str]] = None) -> List[Tuple[str, ComparisonSummary]]:
    """Single-run comparisons at the horizon for each scenario (baseline run once)."""
    cfg = cfg or IntegrationConfig()
    scenario_ids = scenario_ids or [s for s in COMPARISON_SCENARIOS if s in scenarios]

    baseline = simulate(params, baseline_scenario(params), cfg, converters)
    rows = []
    for sid in scenario_ids:
        if sid not in scenarios:
            raise InputError(f"unknown scenario '{sid}'")
        traj = simulate(params, scenarios[sid], cfg, converters)
        for summary in compare_at(baseline, traj, cfg.t_end):
            rows.append((sid, summary))
            logger.info("scenario=%s metric=%s pct=%.4f", sid, summary.metric, summary.pct_reduction)
            sign_discrepancy(sid, summary.metric, summary.pct_reduction)
    return rows
