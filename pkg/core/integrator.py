"""
Fixed-step integration of the model and trajectory recording.

Features:
    - Explicit Euler (default) and classical RK4
    - Smoothstep ramp of the job-creation fold over a 2-year window
    - U floored at 0 after every step
    - Bit-identical output for identical inputs
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .converters import DEFAULT_CONVERTERS, ConverterSet
from .errors import InputError, ModelDomainError
from .model import (
    DerivedOutputs,
    SimState,
    derivatives,
    derived_outputs,
    labour_force,
    output_reference,
)
from .parameters import ModelParameters, ScenarioSpec


# Relative tolerance used whenever a time must sit on the integration grid
GRID_TOLERANCE = 1e-9


class IntegrationConfig(BaseModel):
    """Time grid and step scheme."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    t_start: float = 2023.5
    t_end: float = 2050.5
    dt: float = Field(1.0 / 32.0, gt=0)
    method: Literal["euler", "rk4"] = "euler"
    record_stride: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_grid(self) -> "IntegrationConfig":
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end ({self.t_end!r}) must be after t_start ({self.t_start!r})")
        steps = (self.t_end - self.t_start) / self.dt
        if abs(steps - round(steps)) > GRID_TOLERANCE:
            raise ValueError(f"horizon is not a whole number of steps of dt={self.dt!r}")
        if round(steps) % self.record_stride != 0:
            raise ValueError(f"record_stride {self.record_stride} does not divide {round(steps)} steps")
        return self

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.dt))

    def time_at(self, step: int) -> float:
        if step == self.n_steps:
            return self.t_end
        return self.t_start + step * self.dt

    def step_of(self, t: float) -> Optional[int]:
        """Grid index of t, or None when t is not a grid time."""
        position = (t - self.t_start) / self.dt
        step = int(round(position))
        if abs(position - step) > GRID_TOLERANCE or not 0 <= step <= self.n_steps:
            return None
        return step


class RampSpec(BaseModel):
    """S-shaped change of the job-creation multiplier from 1 to fold."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    fold: float = Field(ge=0)
    t0: float
    duration: float = Field(2.0, gt=0)
    shape: Literal["smoothstep"] = "smoothstep"


def ramp_multiplier(spec: RampSpec, t: float) -> float:
    """1 before t0, fold after t0+duration, cubic smoothstep in between."""
    if t <= spec.t0:
        return 1.0
    if t >= spec.t0 + spec.duration:
        return spec.fold
    u = (t - spec.t0) / spec.duration
    s = 3.0 * u * u - 2.0 * u * u * u
    return 1.0 + (spec.fold - 1.0) * s


def scenario_ramp(scenario: ScenarioSpec, t_start: float) -> Optional[RampSpec]:
    """The job-creation ramp of a scenario, or None when the fold is 1."""
    if not scenario.ramps_jobs:
        return None
    t0 = scenario.ramp_start if scenario.ramp_start is not None else t_start
    return RampSpec(fold=scenario.job_fold, t0=t0, duration=scenario.ramp_duration)


# ==================== Trajectory ====================

TRAJECTORY_COLUMNS = ["t", "P", "U", "O", "K", "MFP", "price_level", "income_pc", "consumption_index"]


@dataclass(frozen=True)
class TrajectoryMetadata:
    scenario_id: str
    params_hash: str
    dt: float
    method: str


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one run, strictly increasing in t."""
    states: Tuple[SimState, ...]
    outputs: Tuple[DerivedOutputs, ...]
    metadata: TrajectoryMetadata

    def __len__(self) -> int:
        return len(self.states)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def first(self) -> Tuple[SimState, DerivedOutputs]:
        return self.states[0], self.outputs[0]

    @property
    def last(self) -> Tuple[SimState, DerivedOutputs]:
        return self.states[-1], self.outputs[-1]

    def index_of(self, t: float) -> int:
        """Index of the sample at exactly t (within grid tolerance)."""
        times = self.times
        j = int(np.searchsorted(times, t))
        for candidate in (j - 1, j):
            if 0 <= candidate < len(times):
                if abs(times[candidate] - t) <= GRID_TOLERANCE * max(1.0, abs(t)):
                    return candidate
        raise InputError(f"t={t!r} is not a recorded sample of trajectory '{self.metadata.scenario_id}'")

    def at(self, t: float) -> Tuple[SimState, DerivedOutputs]:
        j = self.index_of(t)
        return self.states[j], self.outputs[j]

    def series(self, name: str) -> np.ndarray:
        """One column by trajectory CSV name or state/output field name."""
        getters: Dict[str, Callable] = {
            "t": lambda s, o: s.t,
            "P": lambda s, o: s.p,
            "U": lambda s, o: s.u,
            "underutilised_persons": lambda s, o: s.u,
            "O": lambda s, o: s.o,
            "K": lambda s, o: s.k,
            "MFP": lambda s, o: s.m_level,
        }
        if name in getters:
            get = getters[name]
        elif name in DerivedOutputs.__dataclass_fields__:
            get = lambda s, o: getattr(o, name)  # noqa: E731
        else:
            raise InputError(f"unknown trajectory series '{name}'")
        return np.array([get(s, o) for s, o in zip(self.states, self.outputs)])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t": self.series("t"),
            "P": self.series("P"),
            "U": self.series("U"),
            "O": self.series("O"),
            "K": self.series("K"),
            "MFP": self.series("MFP"),
            "price_level": self.series("price_level"),
            "income_pc": self.series("income_pc"),
            "consumption_index": self.series("consumption_index"),
        }, columns=TRAJECTORY_COLUMNS)


# ==================== Stepping ====================

# Integrated vector layout: P, U, O, K, M, K of the baseline run
_U = 1


def _euler_step(rhs: Callable, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    return y + dt * rhs(t, y)


def _rk4_step(rhs: Callable, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + dt / 2, y + dt * k1 / 2)
    k3 = rhs(t + dt / 2, y + dt * k2 / 2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


STEPPERS = {"euler": _euler_step, "rk4": _rk4_step}


def simulate(params: ModelParameters, scenario: ScenarioSpec,
             cfg: Optional[IntegrationConfig] = None,
             converters: ConverterSet = DEFAULT_CONVERTERS) -> Trajectory:
    """
    Integrate one scenario over the configured horizon.

    The scenario's alpha applies from t_start; its job fold ramps per
    scenario_ramp. params.alpha stays the baseline growth of K used for
    the "baseline" converter-input mode.
    """
    cfg = cfg or IntegrationConfig()
    run_params = params if scenario.alpha == params.alpha else params.with_overrides(alpha=scenario.alpha)
    baseline_alpha = params.alpha
    ramp = scenario_ramp(scenario, cfg.t_start)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        state = SimState(t=t, p=y[0], u=y[1], o=y[2], k=y[3], m_level=y[4])
        multiplier = ramp_multiplier(ramp, t) if ramp is not None else 1.0
        rates = derivatives(state, run_params, y[5], converters, job_multiplier=multiplier)
        return np.array([rates.dp, rates.du, rates.do, rates.dk, rates.dm, y[5] * baseline_alpha])

    step = STEPPERS[cfg.method]
    try:
        reference = output_reference(run_params, cfg.t_start, converters)
    except ModelDomainError as e:
        raise e.at(cfg.t_start) from e

    y = np.array([params.p0, params.u0, params.o0, params.k0, params.m0, params.k0], dtype=float)
    states: List[SimState] = []
    outputs: List[DerivedOutputs] = []

    for n in range(cfg.n_steps + 1):
        t = cfg.time_at(n)
        if n % cfg.record_stride == 0:
            state = SimState(t=t, p=float(y[0]), u=float(y[1]), o=float(y[2]),
                             k=float(y[3]), m_level=float(y[4]))
            try:
                outputs.append(derived_outputs(state, run_params, converters, reference))
            except ModelDomainError as e:
                raise e.at(t) from e
            states.append(state)
        if n == cfg.n_steps:
            break

        y = step(rhs, t, y, cfg.dt)
        if y[_U] < 0:
            y[_U] = 0.0
        if not np.all(np.isfinite(y)):
            raise ModelDomainError("non-finite state", t=cfg.time_at(n + 1))
        # checked every step, recorded or not
        lf = labour_force(y[0], run_params)
        if y[_U] > lf:
            raise ModelDomainError(
                f"underutilised persons ({float(y[_U])!r}) exceed the labour force ({lf!r})",
                t=cfg.time_at(n + 1),
            )

    return Trajectory(
        states=tuple(states),
        outputs=tuple(outputs),
        metadata=TrajectoryMetadata(
            scenario_id=scenario.id,
            params_hash=run_params.fingerprint(),
            dt=cfg.dt,
            method=cfg.method,
        ),
    )
