"""
Calibration - fit under-determined parameters to published anchors.

Free parameters:
    - beta:                      base onset-rate growth (golden-section search)
    - beta_and_converter_scale:  beta plus a uniform scale on the eta table's y
                                 values (coordinate golden-section search)

Objective: sum of weight * (model - target)^2 over all targets.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.converters import DEFAULT_CONVERTERS, ConverterSet
from core.errors import CalibrationError, InputError, ModelDomainError
from core.integrator import IntegrationConfig, Trajectory, simulate
from core.parameters import ModelParameters, ScenarioSpec, baseline_scenario

from .scenarios import METRICS, pct_change

logger = logging.getLogger(__name__)


CALIBRATION_METRICS = METRICS + tuple(f"{m}_pct_change" for m in METRICS)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 0.618...


class CalibrationTarget(BaseModel):
    """One published number the model should reproduce."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    metric: str
    scenario_id: str
    t: float
    target_value: float
    weight: float = Field(1.0, gt=0)

    @field_validator("metric")
    @classmethod
    def _known_metric(cls, value: str) -> str:
        if value not in CALIBRATION_METRICS:
            raise ValueError(f"unknown calibration metric '{value}'")
        return value


@dataclass
class CalibrationResult:
    """Outcome of a calibration run."""
    params: ModelParameters
    converters: ConverterSet
    beta: float
    eta_scale: float
    objective: float
    at_boundary: bool
    evaluations: int
    history: List[float] = field(default_factory=list)  # best objective after each iteration

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "eta_scale": self.eta_scale,
            "objective": self.objective,
            "at_boundary": self.at_boundary,
            "evaluations": self.evaluations,
        }


# ==================== Golden Section ====================

@dataclass
class GoldenSectionResult:
    x: float
    fx: float
    evaluations: int
    history: List[float]


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   xtol: float = 1e-8, max_iter: int = 200) -> GoldenSectionResult:
    """
    Minimize a unimodal f on [lo, hi].

    Both end points are evaluated so boundary minima are found. The
    returned point is the best evaluated one; history holds the best
    objective after each iteration and never increases.
    """
    if not lo < hi:
        raise InputError(f"bounds must satisfy lo < hi, got ({lo!r}, {hi!r})")

    evaluations = 0
    best_x, best_f = lo, math.inf

    def evaluate(x: float) -> float:
        nonlocal evaluations, best_x, best_f
        fx = f(x)
        evaluations += 1
        if fx < best_f:
            best_x, best_f = x, fx
        return fx

    evaluate(lo)
    evaluate(hi)

    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = evaluate(c), evaluate(d)
    history = [best_f]

    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = evaluate(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = evaluate(d)
        history.append(best_f)

    return GoldenSectionResult(x=best_x, fx=best_f, evaluations=evaluations, history=history)


# ==================== Objective ====================

class _Evaluator:
    """Runs the model for a candidate and caches trajectories per candidate."""

    def __init__(self, targets: List[CalibrationTarget], scenarios: Dict[str, ScenarioSpec],
                 cfg: IntegrationConfig):
        self.targets = targets
        self.scenarios = scenarios
        self.cfg = cfg
        for target in targets:
            if target.scenario_id != "baseline" and target.scenario_id not in scenarios:
                raise InputError(f"calibration target refers to unknown scenario '{target.scenario_id}'")
            if cfg.step_of(target.t) is None:
                raise InputError(f"calibration target time {target.t!r} is not on the integration grid")

    def _scenario(self, params: ModelParameters, scenario_id: str) -> ScenarioSpec:
        if scenario_id == "baseline":
            return baseline_scenario(params)
        return self.scenarios[scenario_id]

    @staticmethod
    def _level(traj: Trajectory, metric: str, t: float) -> float:
        state, out = traj.at(t)
        if metric == "underutilised_persons":
            return state.u
        return getattr(out, metric)

    def model_values(self, params: ModelParameters, converters: ConverterSet) -> List[float]:
        runs: Dict[str, Trajectory] = {}

        def run(scenario_id: str) -> Trajectory:
            if scenario_id not in runs:
                runs[scenario_id] = simulate(params, self._scenario(params, scenario_id), self.cfg, converters)
            return runs[scenario_id]

        values = []
        for target in self.targets:
            if target.metric.endswith("_pct_change"):
                metric = target.metric[: -len("_pct_change")]
                base = self._level(run("baseline"), metric, target.t)
                scen = self._level(run(target.scenario_id), metric, target.t)
                values.append(pct_change(base, scen))
            else:
                values.append(self._level(run(target.scenario_id), target.metric, target.t))
        return values

    def objective(self, params: ModelParameters, converters: ConverterSet) -> float:
        try:
            values = self.model_values(params, converters)
        except ModelDomainError as e:
            logger.debug("calibration candidate beta=%.10g left the model domain: %s", params.beta, e)
            return math.inf
        return sum(t.weight * (v - t.target_value) ** 2 for t, v in zip(self.targets, values))


# ==================== Calibration ====================

def calibrate(params: ModelParameters, targets: List[CalibrationTarget],
              scenarios: Dict[str, ScenarioSpec],
              free: Literal["beta", "beta_and_converter_scale"] = "beta",
              bounds: Tuple[float, float] = (0.0005, 0.05),
              scale_bounds: Tuple[float, float] = (0.25, 4.0),
              cfg: Optional[IntegrationConfig] = None,
              converters: ConverterSet = DEFAULT_CONVERTERS,
              xtol: float = 1e-8,
              max_sweeps: int = 4) -> CalibrationResult:
    """
    Fit beta (and optionally the eta scale) to the targets.

    Deterministic. When the current parameters already reproduce every
    target exactly they are returned unchanged.
    """
    if not targets:
        raise InputError("calibration needs at least one target")
    if free not in ("beta", "beta_and_converter_scale"):
        raise InputError(f"unknown free-parameter set '{free}'")
    cfg = cfg or IntegrationConfig()
    lo, hi = bounds
    if not 0 <= lo < hi:
        raise InputError(f"beta bounds must satisfy 0 <= lo < hi, got {bounds!r}")
    evaluator = _Evaluator(targets, scenarios, cfg)

    start_objective = evaluator.objective(params, converters)
    if start_objective == 0.0:
        logger.info("calibration targets already met, parameters unchanged")
        return CalibrationResult(params=params, converters=converters, beta=params.beta, eta_scale=1.0,
                                 objective=0.0, at_boundary=False, evaluations=1, history=[0.0])

    beta = params.beta
    scale = 1.0
    evaluations = 1
    history: List[float] = []

    def fit_beta(current_scale: float) -> GoldenSectionResult:
        scaled = converters.with_eta_scale(current_scale) if current_scale != 1.0 else converters
        return golden_section(
            lambda b: evaluator.objective(params.with_overrides(beta=b), scaled), lo, hi, xtol=xtol
        )

    def fit_scale(current_beta: float) -> GoldenSectionResult:
        candidate = params.with_overrides(beta=current_beta)
        return golden_section(
            lambda s: evaluator.objective(candidate, converters.with_eta_scale(s)),
            scale_bounds[0], scale_bounds[1], xtol=xtol,
        )

    result = fit_beta(scale)
    beta, best = result.x, result.fx
    evaluations += result.evaluations
    history.extend(result.history)

    if free == "beta_and_converter_scale":
        for sweep in range(max_sweeps):
            previous = best
            scale_result = fit_scale(beta)
            evaluations += scale_result.evaluations
            if scale_result.fx <= best:
                scale, best = scale_result.x, scale_result.fx
            history.extend(min(h, history[-1]) for h in scale_result.history)

            beta_result = fit_beta(scale)
            evaluations += beta_result.evaluations
            if beta_result.fx <= best:
                beta, best = beta_result.x, beta_result.fx
            history.extend(min(h, history[-1]) for h in beta_result.history)

            logger.debug("calibration sweep=%d beta=%.10g scale=%.10g objective=%.6g", sweep, beta, scale, best)
            if previous - best <= 1e-12 * (1.0 + previous):
                break

    if not math.isfinite(best):
        raise CalibrationError("no candidate within the bounds produced a valid run")

    at_boundary = abs(beta - lo) <= xtol or abs(beta - hi) <= xtol
    if free == "beta_and_converter_scale":
        at_boundary = at_boundary or abs(scale - scale_bounds[0]) <= xtol or abs(scale - scale_bounds[1]) <= xtol
    if at_boundary:
        logger.warning("calibration solution on the search boundary beta=%.10g scale=%.10g", beta, scale)

    fitted_converters = converters.with_eta_scale(scale) if scale != 1.0 else converters
    logger.info("calibrated beta=%.10g eta_scale=%.10g objective=%.6g evaluations=%d",
                beta, scale, best, evaluations)

    return CalibrationResult(
        params=params.with_overrides(beta=beta),
        converters=fitted_converters,
        beta=beta,
        eta_scale=scale,
        objective=best,
        at_boundary=at_boundary,
        evaluations=evaluations,
        history=history,
    )
