"""
Sensitivity - Latin hypercube ensembles over the uncertain parameters.

Flow:
    1. Build the sample space around the current parameters
    2. Draw a Latin hypercube design (midpoint of each stratum, seeded permutations)
    3. Run baseline and scenario for every draw (paired design)
    4. Summarize horizon differences and per-time bands with linear percentiles
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.converters import DEFAULT_CONVERTERS, ConverterSet
from core.errors import InputError, ModelDomainError
from core.integrator import IntegrationConfig, Trajectory, simulate
from core.parameters import ModelParameters, ScenarioSpec, baseline_scenario

from .scenarios import (
    METRICS,
    ComparisonSummary,
    SignDiscrepancy,
    compare_values,
    published_anchor,
    sign_discrepancy,
)

logger = logging.getLogger(__name__)


# Percentile method used for every summary (linear interpolation between order statistics)
PERCENTILE_METHOD = "linear"
PERCENTILES = (2.5, 25.0, 50.0, 75.0, 97.5)

BAND_COLUMNS = ["t", "metric", "p2_5", "p25", "median", "p75", "p97_5"]


class SensitivitySettings(BaseModel):
    """Shape of the sample space, relative to the current parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lambda_spread: float = Field(0.10, ge=0, lt=1)
    beta_spread: float = Field(0.10, ge=0, lt=1)
    r_spread: float = Field(0.10, ge=0, lt=1)
    omega_min: float = Field(0.30, ge=0, le=1)
    omega_max: float = Field(0.70, ge=0, le=1)

    @model_validator(mode="after")
    def _check_omega(self) -> "SensitivitySettings":
        if self.omega_min > self.omega_max:
            raise ValueError(f"omega_min ({self.omega_min!r}) exceeds omega_max ({self.omega_max!r})")
        return self


# ==================== Sample Space ====================

@dataclass(frozen=True)
class Dimension:
    """One uniformly distributed parameter (a ModelParameters field name)."""
    name: str
    lower: float
    upper: float

    def __post_init__(self):
        if self.name not in ModelParameters.model_fields:
            raise InputError(f"unknown parameter '{self.name}' in sample space")
        if not self.lower <= self.upper:
            raise InputError(f"dimension {self.name}: lower {self.lower!r} above upper {self.upper!r}")

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class ParameterSpace:
    dims: Tuple[Dimension, ...]

    def __post_init__(self):
        if not self.dims:
            raise InputError("sample space needs at least one dimension")
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise InputError(f"duplicate dimensions in sample space: {names}")

    @property
    def names(self) -> List[str]:
        return [d.name for d in self.dims]

    @classmethod
    def around(cls, params: ModelParameters,
               settings: Optional[SensitivitySettings] = None) -> "ParameterSpace":
        """lambda, beta and r spread around their current values; omega on a fixed range."""
        settings = settings or SensitivitySettings()

        def spread(name: str, value: float, fraction: float) -> Dimension:
            return Dimension(name, value * (1.0 - fraction), value * (1.0 + fraction))

        return cls(dims=(
            spread("lam", params.lam, settings.lambda_spread),
            Dimension("omega", settings.omega_min, settings.omega_max),
            spread("beta", params.beta, settings.beta_spread),
            spread("r", params.r, settings.r_spread),
        ))


@dataclass(frozen=True)
class LhsDesign:
    """n draws of a space; unit holds the stratum positions in [0, 1)."""
    space: ParameterSpace
    n: int
    seed: int
    unit: np.ndarray = field(repr=False, compare=False)

    @property
    def values(self) -> np.ndarray:
        lower = np.array([d.lower for d in self.space.dims])
        width = np.array([d.width for d in self.space.dims])
        return lower + self.unit * width

    def draw(self, j: int) -> Dict[str, float]:
        row = self.values[j]
        return {name: float(v) for name, v in zip(self.space.names, row)}

    def draws(self) -> List[Dict[str, float]]:
        values = self.values
        return [{name: float(v) for name, v in zip(self.space.names, row)} for row in values]


def lhs_sample(space: ParameterSpace, n: int, seed: int) -> LhsDesign:
    """
    Latin hypercube design with one draw per stratum in every dimension.

    Each draw sits at its stratum midpoint; strata are assigned to rows by
    an independent permutation per dimension from a seeded generator.
    """
    if n < 1:
        raise InputError(f"number of draws must be at least 1, got {n}")

    rng = np.random.default_rng(seed)
    midpoints = (np.arange(n) + 0.5) / n
    unit = np.empty((n, len(space.dims)))
    for col in range(len(space.dims)):
        unit[:, col] = rng.permutation(midpoints)

    return LhsDesign(space=space, n=n, seed=seed, unit=unit)


# ==================== Ensemble ====================

@dataclass
class DrawOutcome:
    """Paired baseline/scenario result of one draw."""
    index: int
    values: Dict[str, float]
    comparisons: Dict[str, ComparisonSummary] = field(default_factory=dict)
    series: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class EnsembleResult:
    scenario_id: str
    times: np.ndarray
    draws: List[DrawOutcome]

    @property
    def successful(self) -> List[DrawOutcome]:
        return [d for d in self.draws if d.ok]

    @property
    def failed_count(self) -> int:
        return sum(1 for d in self.draws if not d.ok)


def _band_series(traj: Trajectory, prefix: str) -> Dict[str, np.ndarray]:
    return {f"{prefix}.{metric}": traj.series(metric) for metric in METRICS}


def _run_draw(index: int, values: Dict[str, float], params: ModelParameters,
              scenario: ScenarioSpec, cfg: IntegrationConfig,
              converters: ConverterSet) -> DrawOutcome:
    """Run one draw; domain errors are captured on the outcome."""
    outcome = DrawOutcome(index=index, values=values)
    try:
        draw_params = params.with_overrides(**values)
        baseline = simulate(draw_params, baseline_scenario(draw_params), cfg, converters)
        scen = simulate(draw_params, scenario, cfg, converters)
    except (ModelDomainError, ValueError) as e:
        outcome.error = str(e)
        return outcome

    base_state, base_out = baseline.last
    scen_state, scen_out = scen.last
    for metric in METRICS:
        if metric == "underutilised_persons":
            b, s = base_state.u, scen_state.u
        else:
            b, s = getattr(base_out, metric), getattr(scen_out, metric)
        outcome.comparisons[metric] = compare_values(metric, cfg.t_end, b, s)

    outcome.series.update(_band_series(scen, "scenario"))
    outcome.series.update(_band_series(baseline, "baseline"))
    return outcome


def _run_draw_packed(args: tuple) -> DrawOutcome:
    return _run_draw(*args)


def run_ensemble(design: LhsDesign, scenario: ScenarioSpec,
                 cfg: Optional[IntegrationConfig] = None,
                 params: Optional[ModelParameters] = None,
                 converters: ConverterSet = DEFAULT_CONVERTERS,
                 workers: int = 1) -> EnsembleResult:
    """
    Paired runs for every draw of the design.

    Each draw's values apply to both runs; only alpha and the job fold
    differ between them. Results are merged by draw index, so serial and
    parallel execution give identical output.
    """
    cfg = cfg or IntegrationConfig()
    params = params or ModelParameters()
    jobs = [(j, values, params, scenario, cfg, converters) for j, values in enumerate(design.draws())]

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            draws = list(pool.map(_run_draw_packed, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        draws = [_run_draw_packed(job) for job in jobs]
    draws.sort(key=lambda d: d.index)

    times = np.array([cfg.time_at(n) for n in range(0, cfg.n_steps + 1, cfg.record_stride)])
    result = EnsembleResult(scenario_id=scenario.id, times=times, draws=draws)

    if result.failed_count:
        logger.warning("ensemble scenario=%s failed_draws=%d of %d", scenario.id, result.failed_count, len(draws))
        for d in draws:
            if not d.ok:
                logger.debug("draw=%d values=%s error=%s", d.index, d.values, d.error)
    logger.info("ensemble scenario=%s draws=%d workers=%d", scenario.id, len(draws), workers)
    return result


# ==================== Summaries ====================

@dataclass(frozen=True)
class DistributionSummary:
    mean: float
    median: float
    p2_5: float
    p25: float
    p75: float
    p97_5: float
    n: int

    def to_dict(self) -> dict:
        return {
            "mean": self.mean, "median": self.median, "p2_5": self.p2_5,
            "p25": self.p25, "p75": self.p75, "p97_5": self.p97_5, "n": self.n,
        }


def describe(values) -> DistributionSummary:
    """Mean and linear-interpolated percentiles of a sample."""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise InputError("cannot summarize an empty sample")
    p2_5, p25, median, p75, p97_5 = np.percentile(data, PERCENTILES, method=PERCENTILE_METHOD)
    return DistributionSummary(
        mean=float(np.mean(data)),
        median=float(median),
        p2_5=float(p2_5),
        p25=float(p25),
        p75=float(p75),
        p97_5=float(p97_5),
        n=int(data.size),
    )


@dataclass(frozen=True)
class HorizonStats:
    """Horizon difference distribution of one metric."""
    metric: str
    reduction: DistributionSummary
    pct: DistributionSummary


@dataclass(frozen=True)
class BandSeries:
    """Per-time percentiles of one recorded series across the ensemble."""
    metric: str
    times: np.ndarray
    quantiles: np.ndarray  # shape (5, len(times)) in PERCENTILES order
    means: np.ndarray
    n: int

    def at(self, j: int) -> DistributionSummary:
        p2_5, p25, median, p75, p97_5 = (float(q) for q in self.quantiles[:, j])
        return DistributionSummary(mean=float(self.means[j]), median=median, p2_5=p2_5,
                                   p25=p25, p75=p75, p97_5=p97_5, n=self.n)


@dataclass
class EnsembleSummary:
    scenario_id: str
    draws: int
    failed: int
    horizon: Dict[str, HorizonStats]
    bands: List[BandSeries]
    discrepancies: List[SignDiscrepancy] = field(default_factory=list)

    def summary_rows(self) -> List[dict]:
        """Published-table shaped rows with the published values next to them."""
        rows = []
        for metric in METRICS:
            stats = self.horizon[metric]
            anchor = published_anchor(self.scenario_id, metric)
            rows.append({
                "scenario": self.scenario_id,
                "metric": metric,
                "mean_reduction": stats.reduction.mean,
                "mean_pct": stats.pct.mean,
                "median_pct": stats.pct.median,
                "lo95": stats.pct.p2_5,
                "hi95": stats.pct.p97_5,
                "draws": self.draws,
                "failed": self.failed,
                "published_mean_pct": anchor.mean_pct if anchor else None,
                "published_median_pct": anchor.median_pct if anchor else None,
                "published_lo95": anchor.lo95 if anchor else None,
                "published_hi95": anchor.hi95 if anchor else None,
            })
        return rows

    def bands_frame(self) -> pd.DataFrame:
        frames = []
        for band in self.bands:
            frames.append(pd.DataFrame({
                "t": band.times,
                "metric": band.metric,
                "p2_5": band.quantiles[0],
                "p25": band.quantiles[1],
                "median": band.quantiles[2],
                "p75": band.quantiles[3],
                "p97_5": band.quantiles[4],
            }, columns=BAND_COLUMNS))
        return pd.concat(frames, ignore_index=True)


def summarize(ensemble: EnsembleResult) -> EnsembleSummary:
    """Horizon statistics and per-time bands over the successful draws."""
    ok = ensemble.successful
    if not ok:
        raise InputError(f"ensemble '{ensemble.scenario_id}' has no successful draws")

    horizon = {}
    discrepancies = []
    for metric in METRICS:
        horizon[metric] = HorizonStats(
            metric=metric,
            reduction=describe([d.comparisons[metric].abs_reduction for d in ok]),
            pct=describe([d.comparisons[metric].pct_reduction for d in ok]),
        )
        finding = sign_discrepancy(ensemble.scenario_id, metric, horizon[metric].pct.mean)
        if finding is not None:
            discrepancies.append(finding)

    bands = []
    for prefix in ("scenario", "baseline"):
        for metric in METRICS:
            key = f"{prefix}.{metric}"
            matrix = np.vstack([d.series[key] for d in ok])
            bands.append(BandSeries(
                metric=key,
                times=ensemble.times,
                quantiles=np.percentile(matrix, PERCENTILES, axis=0, method=PERCENTILE_METHOD),
                means=matrix.mean(axis=0),
                n=len(ok),
            ))

    return EnsembleSummary(
        scenario_id=ensemble.scenario_id,
        draws=len(ensemble.draws),
        failed=ensemble.failed_count,
        horizon=horizon,
        bands=bands,
        discrepancies=discrepancies,
    )
