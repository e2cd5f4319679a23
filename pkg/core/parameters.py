"""
Model parameters and scenario definitions.

Defaults reproduce the published parameter table for Australia, mid-2023.
"""

import hashlib
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ModelParameters(BaseModel):
    """Every scalar constant of the model plus the initial stocks."""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    # Initial stocks
    p0: float = Field(26_638_544.0, gt=0, description="initial population (persons)")
    u0: float = Field(1_445_000.0, gt=0, description="initial underutilised persons")
    o0: float = Field(0.099, ge=0, le=1, description="initial onset rate (target share)")
    k0: float = Field(94.6, gt=0, description="initial K-L ratio (index, 2021=100)")
    m0: float = Field(1.0, gt=0, description="initial MFP level (normalized)")

    # Rates and constants
    g: float = Field(0.011, ge=0, description="net population growth per year")
    i: float = Field(14_585_316.0, gt=0, description="labour force at 2023.5 (persons)")
    mu: float = Field(26_638_544.0, gt=0, description="population at 2023.5 (persons)")
    d: float = Field(5.0, gt=0, description="onset adjustment delay (years)")
    lam: float = Field(0.0021, ge=0, alias="lambda", description="new job creation per capita per year")
    m: float = Field(0.0015, ge=0, description="working-age mortality per year")
    beta: float = Field(0.0015, ge=0, description="base onset-rate growth per year")
    alpha: float = Field(0.018, ge=0, description="K-L ratio growth per year (baseline)")
    nu: float = Field(0.0056298, ge=0, description="base MFP growth per year")
    r: float = Field(1.6, gt=0, description="underemployed : unemployed ratio")
    underemployed_income_ratio: float = Field(0.77, ge=0, le=1)
    tau: float = Field(86_985.0, gt=0, description="income scaling factor (currency per person-year)")
    omega: float = Field(0.5, ge=0, le=1, description="share of income exposed to price decreases")

    converter_input: Literal["initial", "baseline"] = "initial"

    @model_validator(mode="after")
    def _check_population(self) -> "ModelParameters":
        if not self.u0 < self.i:
            raise ValueError(f"u0 ({self.u0!r}) must be below the labour force i ({self.i!r})")
        if not self.i <= self.mu:
            raise ValueError(f"labour force i ({self.i!r}) cannot exceed population mu ({self.mu!r})")
        if self.mu != self.p0:
            raise ValueError(f"mu ({self.mu!r}) must equal the initial population p0 ({self.p0!r})")
        return self

    # ==================== Derived Constants ====================

    @property
    def participation(self) -> float:
        """Share of the population in the labour force (i / mu)."""
        return self.i / self.mu

    @property
    def initial_labour_force(self) -> float:
        return self.p0 * self.i / self.mu

    @property
    def initial_underutilisation_rate(self) -> float:
        return self.u0 / self.initial_labour_force

    # ==================== Copies ====================

    def with_overrides(self, **changes: Any) -> "ModelParameters":
        """Validated copy with some fields replaced (field names, not aliases)."""
        data = self.model_dump()
        data.update(changes)
        return ModelParameters.model_validate(data)

    def fingerprint(self) -> str:
        """Short stable hash of every field, for trajectory metadata."""
        payload = self.model_dump_json().encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]


class ScenarioSpec(BaseModel):
    """A named experiment: a K-L growth rate and an optional job-creation fold."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = Field(min_length=1)
    alpha: float = Field(ge=0)  # 0 only for fixed-point checks
    job_fold: float = Field(1.0, ge=0)
    ramp_start: Optional[float] = None  # defaults to the simulation start
    ramp_duration: float = Field(2.0, gt=0)
    notes: str = ""

    @property
    def ramps_jobs(self) -> bool:
        return self.job_fold != 1.0

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()


def baseline_scenario(params: ModelParameters) -> ScenarioSpec:
    """The pure-baseline run for a parameter set."""
    return ScenarioSpec(id="baseline", alpha=params.alpha, notes="historic K-L ratio growth")
