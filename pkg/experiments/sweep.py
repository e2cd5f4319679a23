"""
Sweep - the alpha x job-fold heatmap and the minimal preventing fold.

Features:
    - 30 x 30 inclusive grid of (alpha, fold) cells against one default baseline
    - Per-row pass-set check (non-negative consumption change must be an up-set in fold)
    - Threshold search: bisection on the fold after an empirical monotonicity check,
      linear scan when the check finds a non-monotone predicate
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.converters import DEFAULT_CONVERTERS, ConverterSet
from core.errors import InputError, ModelDomainError
from core.integrator import GRID_TOLERANCE, IntegrationConfig, Trajectory, simulate
from core.parameters import ModelParameters, ScenarioSpec, baseline_scenario

from .scenarios import PUBLISHED_THRESHOLD_FOLD, pct_change

logger = logging.getLogger(__name__)


HEATMAP_COLUMNS = ["alpha", "fold", "pct_change_consumption"]


class GridSpec(BaseModel):
    """Axes of the heatmap; both inclusive of their end points."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha_min: float = Field(0.02, ge=0)
    alpha_max: float = Field(0.10, ge=0)
    alpha_steps: int = Field(30, ge=2)
    fold_min: float = Field(0.5, ge=0)
    fold_max: float = Field(12.0, ge=0)
    fold_steps: int = Field(30, ge=2)

    @model_validator(mode="after")
    def _check_ranges(self) -> "GridSpec":
        if not self.alpha_min < self.alpha_max:
            raise ValueError(f"alpha_min ({self.alpha_min!r}) must be below alpha_max ({self.alpha_max!r})")
        if not self.fold_min < self.fold_max:
            raise ValueError(f"fold_min ({self.fold_min!r}) must be below fold_max ({self.fold_max!r})")
        return self

    @property
    def alpha_axis(self) -> np.ndarray:
        return np.linspace(self.alpha_min, self.alpha_max, self.alpha_steps)

    @property
    def fold_axis(self) -> np.ndarray:
        return np.linspace(self.fold_min, self.fold_max, self.fold_steps)

    @property
    def cell_count(self) -> int:
        return self.alpha_steps * self.fold_steps


# ==================== Grid Sweep ====================

@dataclass(frozen=True)
class HeatmapCell:
    alpha: float
    fold: float
    pct_change_consumption: Optional[float]  # None when the cell failed
    error: Optional[str] = None

    @property
    def valid(self) -> bool:
        return self.error is None

    @property
    def passes(self) -> bool:
        """Consumption at the horizon is not below baseline."""
        return self.valid and self.pct_change_consumption >= 0


@dataclass
class HeatmapTable:
    """Cells in row-major order: one row per alpha, folds ascending."""
    grid: GridSpec
    t: float
    baseline_consumption: float
    cells: List[HeatmapCell] = field(default_factory=list)

    def rows(self) -> List[List[HeatmapCell]]:
        n = self.grid.fold_steps
        return [self.cells[j:j + n] for j in range(0, len(self.cells), n)]

    @property
    def invalid_count(self) -> int:
        return sum(1 for c in self.cells if not c.valid)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(c.alpha, c.fold, c.pct_change_consumption) for c in self.cells],
            columns=HEATMAP_COLUMNS,
        )


def _cell_scenario(alpha: float, fold: float) -> ScenarioSpec:
    return ScenarioSpec(id=f"alpha={alpha!r},fold={fold!r}", alpha=alpha, job_fold=fold)


def _run_cell(args: tuple) -> HeatmapCell:
    alpha, fold, base_c, params, cfg, converters = args
    try:
        traj = simulate(params, _cell_scenario(alpha, fold), cfg, converters)
    except ModelDomainError as e:
        return HeatmapCell(alpha=alpha, fold=fold, pct_change_consumption=None, error=str(e))
    return HeatmapCell(alpha=alpha, fold=fold,
                       pct_change_consumption=pct_change(base_c, traj.last[1].consumption_index))


def grid_sweep(params: ModelParameters, grid: Optional[GridSpec] = None,
               cfg: Optional[IntegrationConfig] = None,
               converters: ConverterSet = DEFAULT_CONVERTERS,
               workers: int = 1) -> HeatmapTable:
    """Horizon consumption-index percent change against the default baseline for every cell."""
    grid = grid or GridSpec()
    cfg = cfg or IntegrationConfig()

    baseline = simulate(params, baseline_scenario(params), cfg, converters)
    base_c = baseline.last[1].consumption_index

    jobs = [
        (float(alpha), float(fold), base_c, params, cfg, converters)
        for alpha in grid.alpha_axis
        for fold in grid.fold_axis
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        cells = [_run_cell(job) for job in jobs]

    table = HeatmapTable(grid=grid, t=cfg.t_end, baseline_consumption=base_c, cells=cells)
    if table.invalid_count:
        logger.warning("grid sweep invalid_cells=%d of %d", table.invalid_count, len(cells))
    logger.info("grid sweep cells=%d baseline_consumption=%.6f", len(cells), base_c)
    return table


@dataclass(frozen=True)
class PassSetViolation:
    """A failing cell at a higher fold than a passing one in the same row."""
    alpha: float
    passing_fold: float
    failing_fold: float

    def to_dict(self) -> dict:
        return asdict(self)


def pass_set_violations(table: HeatmapTable) -> List[PassSetViolation]:
    """Rows whose passing folds do not form an up-set; each is logged as a finding."""
    violations = []
    for row in table.rows():
        first_pass: Optional[HeatmapCell] = None
        for cell in row:
            if not cell.valid:
                continue
            if cell.passes:
                first_pass = first_pass or cell
            elif first_pass is not None:
                violations.append(PassSetViolation(
                    alpha=cell.alpha, passing_fold=first_pass.fold, failing_fold=cell.fold,
                ))
    for v in violations:
        logger.warning("pass-set violation alpha=%.6g passing_fold=%.6g failing_fold=%.6g",
                       v.alpha, v.passing_fold, v.failing_fold)
    return violations


# ==================== Threshold Search ====================

class ThresholdQuery(BaseModel):
    """Smallest fold keeping scenario consumption at or above baseline over a window."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(0.11, ge=0)
    window: Tuple[float, float] = (2025.0, 2045.0)
    fold_min: float = Field(1.0, ge=0)
    fold_max: float = Field(12.0, ge=0)
    criterion: Literal["all_times", "at_window_end"] = "all_times"
    tolerance: float = Field(0.05, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "ThresholdQuery":
        if not self.window[0] <= self.window[1]:
            raise ValueError(f"window start {self.window[0]!r} is after its end {self.window[1]!r}")
        if not self.fold_min < self.fold_max:
            raise ValueError(f"fold_min ({self.fold_min!r}) must be below fold_max ({self.fold_max!r})")
        return self


@dataclass(frozen=True)
class ThresholdResult:
    alpha: float
    window: Tuple[float, float]
    criterion: str
    fold: Optional[float]
    found: bool
    strategy: str  # "bisection" or "scan"
    monotone: bool
    evaluations: int
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "window": list(self.window),
            "fold": self.fold,
            "found": self.found,
            "criterion": self.criterion,
            "strategy": self.strategy,
            "monotone": self.monotone,
            "evaluations": self.evaluations,
            "tolerance": self.tolerance,
            "published_fold": PUBLISHED_THRESHOLD_FOLD,
        }


class _Predicate:
    """Pass/fail of one fold, cached."""

    def __init__(self, params: ModelParameters, query: ThresholdQuery,
                 cfg: IntegrationConfig, converters: ConverterSet):
        self.params = params
        self.query = query
        self.cfg = cfg
        self.converters = converters
        self.cache: Dict[float, bool] = {}

        baseline = simulate(params, baseline_scenario(params), cfg, converters)
        self.base_c = baseline.series("consumption_index")
        self.mask = self._window_mask(baseline)

    def _window_mask(self, baseline: Trajectory) -> np.ndarray:
        start, end = self.query.window
        tol = GRID_TOLERANCE * max(1.0, abs(end))
        if start < self.cfg.t_start - tol or end > self.cfg.t_end + tol:
            raise InputError(
                f"window {start!r}:{end!r} is outside the simulation horizon "
                f"{self.cfg.t_start!r}:{self.cfg.t_end!r}"
            )
        if self.query.criterion == "at_window_end":
            mask = np.zeros(len(baseline), dtype=bool)
            mask[baseline.index_of(end)] = True
            return mask
        times = baseline.times
        mask = (times >= start - tol) & (times <= end + tol)
        if not mask.any():
            raise InputError(f"window {start!r}:{end!r} contains no recorded time")
        return mask

    @property
    def evaluations(self) -> int:
        return len(self.cache)

    def __call__(self, fold: float) -> bool:
        if fold not in self.cache:
            scenario = ScenarioSpec(id="threshold", alpha=self.query.alpha, job_fold=fold)
            scen_c = simulate(self.params, scenario, self.cfg, self.converters).series("consumption_index")
            self.cache[fold] = bool(np.all(scen_c[self.mask] >= self.base_c[self.mask]))
            logger.debug("threshold check fold=%.6g passes=%s", fold, self.cache[fold])
        return self.cache[fold]


CHECK_POINTS = 7


def _scan(predicate: _Predicate, query: ThresholdQuery) -> Optional[float]:
    steps = int(math.ceil((query.fold_max - query.fold_min) / query.tolerance - GRID_TOLERANCE))
    for k in range(steps + 1):
        fold = min(query.fold_min + k * query.tolerance, query.fold_max)
        if predicate(fold):
            return fold
    return None


def _bisect(predicate: _Predicate, failing: float, passing: float, tolerance: float) -> float:
    """Shrink (failing, passing] until it is no wider than tolerance."""
    while passing - failing > tolerance:
        middle = 0.5 * failing + 0.5 * passing
        if predicate(middle):
            passing = middle
        else:
            failing = middle
    return passing


def threshold_search(params: ModelParameters, query: Optional[ThresholdQuery] = None,
                     cfg: Optional[IntegrationConfig] = None,
                     converters: ConverterSet = DEFAULT_CONVERTERS,
                     strategy: Literal["bisection", "scan"] = "bisection") -> ThresholdResult:
    """
    Smallest fold in [fold_min, fold_max] satisfying the query, to its tolerance.

    The fold range is checked at evenly spaced points first. A pass followed
    by a fail at a higher fold means the predicate is not monotone; the
    search then falls back to a linear scan and logs the finding.
    """
    query = query or ThresholdQuery()
    cfg = cfg or IntegrationConfig()
    if strategy not in ("bisection", "scan"):
        raise InputError(f"unknown threshold strategy '{strategy}'")

    predicate = _Predicate(params, query, cfg, converters)

    checkpoints = [float(f) for f in np.linspace(query.fold_min, query.fold_max, CHECK_POINTS)]
    outcomes = [predicate(f) for f in checkpoints]
    monotone = all(not (a and not b) for a, b in zip(outcomes, outcomes[1:]))
    if not monotone:
        logger.warning("threshold predicate not monotone in fold alpha=%.6g checkpoints=%s",
                       query.alpha, dict(zip(checkpoints, outcomes)))

    used = strategy
    if strategy == "scan" or not monotone:
        used = "scan"
        fold = _scan(predicate, query)
    elif outcomes[0]:
        fold = query.fold_min
    elif not outcomes[-1]:
        fold = None
    else:
        first = outcomes.index(True)
        fold = _bisect(predicate, checkpoints[first - 1], checkpoints[first], query.tolerance)

    result = ThresholdResult(
        alpha=query.alpha,
        window=query.window,
        criterion=query.criterion,
        fold=fold,
        found=fold is not None,
        strategy=used,
        monotone=monotone,
        evaluations=predicate.evaluations,
        tolerance=query.tolerance,
    )
    logger.info("threshold alpha=%.6g window=%s found=%s fold=%s strategy=%s evaluations=%d",
                query.alpha, query.window, result.found, fold, used, result.evaluations)
    return result


def prevention_regime_finding(params: ModelParameters, cfg: Optional[IntegrationConfig] = None,
                              converters: ConverterSet = DEFAULT_CONVERTERS,
                              alpha: float = 0.10) -> Optional[str]:
    """
    Check that no fold up to 12 prevents a consumption decline at a high alpha.

    Returns None when the regime exists (not-found over the whole horizon),
    otherwise a finding describing the fold that does prevent the decline.
    """
    cfg = cfg or IntegrationConfig()
    query = ThresholdQuery(alpha=alpha, window=(cfg.t_start, cfg.t_end))
    result = threshold_search(params, query, cfg, converters)
    if not result.found:
        return None
    finding = (f"a {result.fold:.2f}-fold job creation increase prevents the consumption decline "
               f"at alpha={alpha!r}; no non-preventable regime below fold {query.fold_max!r}")
    logger.warning("finding: %s", finding)
    return finding
