"""
Model equations - stocks, flows and derived outputs.

Stocks:
    P  population
    U  underutilised persons (unemployed + underemployed)
    O  underutilisation onset rate (target share of the labour force)
    K  capital-to-labour ratio
    M  multifactor productivity level

Flows (per year):
    dP = P*g
    dU = (L*O - U)/d - L*lambda_eff - U*m        with L = P*i/mu
    dO = O*beta*eta(x_k)
    dK = K*alpha
    dM = M*nu*delta(x_k)
"""

from dataclasses import asdict, dataclass
from typing import Dict, NamedTuple, Tuple

from .converters import DEFAULT_CONVERTERS, ConverterSet
from .errors import InputError, ModelDomainError
from .parameters import ModelParameters


@dataclass(frozen=True)
class SimState:
    """Integrator state at one instant."""
    t: float  # absolute years, e.g. 2023.5
    p: float
    u: float
    o: float
    k: float
    m_level: float

    @classmethod
    def initial(cls, params: ModelParameters, t: float) -> "SimState":
        return cls(t=t, p=params.p0, u=params.u0, o=params.o0, k=params.k0, m_level=params.m0)

    def is_valid(self) -> bool:
        return self.p > 0 and self.u >= 0 and self.o >= 0 and self.k > 0 and self.m_level > 0


@dataclass(frozen=True)
class DerivedOutputs:
    """Quantities computed from a state, recorded alongside it."""
    labour_force: float
    psi: float  # aggregate disposable income, currency per year
    income_pc: float
    income_pc_ratio: float  # vs the initial per-capita income
    price_level: float  # rho
    consumption_index: float  # C

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class OutputReference:
    """INIT() values a run normalizes against."""
    income_pc: float
    price_level: float


class Rates(NamedTuple):
    dp: float
    du: float
    do: float
    dk: float
    dm: float


# ==================== Labour Market ====================

def labour_force(p: float, params: ModelParameters) -> float:
    """L = P * i / mu (constant participation)."""
    return p * params.i / params.mu


def split_underutilised(u: float, r: float) -> Tuple[float, float]:
    """
    Split underutilised persons into (unemployed, underemployed).

    r is the underemployed : unemployed ratio, so
    unemployed = u/(1+r) and underemployed = u - unemployed.
    """
    if u < 0:
        raise InputError(f"u must be non-negative, got {u!r}")
    if r <= 0:
        raise InputError(f"r must be positive, got {r!r}")
    unemployed = u / (1.0 + r)
    # Subtraction keeps the parts summing to u
    underemployed = u - unemployed
    return unemployed, underemployed


def relative_underutilisation(state: SimState, params: ModelParameters) -> float:
    """Underutilisation rate divided by its initial value (theta input)."""
    lf = labour_force(state.p, params)
    return (state.u / lf) / params.initial_underutilisation_rate


# ==================== Income and Consumption ====================

def aggregate_disposable_income(state: SimState, params: ModelParameters,
                                converters: ConverterSet = DEFAULT_CONVERTERS) -> float:
    """
    Aggregate disposable income psi (currency per year).

    psi = [(L - U) + 0.77 * underemployed] * theta(x_u) * tau

    Fully employed persons earn a full income, underemployed persons a
    fixed fraction of it and unemployed persons none.
    """
    lf = labour_force(state.p, params)
    if state.u > lf:
        raise ModelDomainError(
            f"underutilised persons ({state.u!r}) exceed the labour force ({lf!r})"
        )

    _, underemployed = split_underutilised(state.u, params.r)
    effective_earners = (lf - state.u) + params.underemployed_income_ratio * underemployed

    x_u = relative_underutilisation(state, params)
    return effective_earners * converters.theta(x_u) * params.tau


def consumption_index(income_pc_ratio: float, price_ratio: float, omega: float) -> float:
    """
    C = income ratio / (price ratio * omega + (1 - omega)).

    Written as 1 + omega*(price_ratio - 1) so that C is exactly 1 when
    both ratios are 1.
    """
    denominator = 1.0 + omega * (price_ratio - 1.0)
    if not denominator > 0:
        raise ModelDomainError(
            f"consumption index denominator is {denominator!r} "
            f"(price_ratio={price_ratio!r}, omega={omega!r})"
        )
    return income_pc_ratio / denominator


def output_reference(params: ModelParameters, t: float,
                     converters: ConverterSet = DEFAULT_CONVERTERS) -> OutputReference:
    """Initial per-capita income and price level of a run."""
    state = SimState.initial(params, t)
    psi = aggregate_disposable_income(state, params, converters)
    return OutputReference(income_pc=psi / state.p, price_level=converters.prices(state.m_level))


def derived_outputs(state: SimState, params: ModelParameters, converters: ConverterSet,
                    reference: OutputReference) -> DerivedOutputs:
    """Everything recorded next to a state."""
    lf = labour_force(state.p, params)
    psi = aggregate_disposable_income(state, params, converters)
    income_pc = psi / state.p
    income_ratio = income_pc / reference.income_pc
    price_level = converters.prices(state.m_level)

    return DerivedOutputs(
        labour_force=lf,
        psi=psi,
        income_pc=income_pc,
        income_pc_ratio=income_ratio,
        price_level=price_level,
        consumption_index=consumption_index(
            income_ratio, price_level / reference.price_level, params.omega
        ),
    )


# ==================== Rates of Change ====================

def kl_converter_input(state: SimState, params: ModelParameters, k_baseline: float) -> float:
    """x_k fed to the eta and MFP converters."""
    if params.converter_input == "baseline":
        return state.k / k_baseline
    return state.k / params.k0


def derivatives(state: SimState, params: ModelParameters, k_baseline: float,
                converters: ConverterSet = DEFAULT_CONVERTERS,
                job_multiplier: float = 1.0) -> Rates:
    """
    Rates of change of the five integrated quantities.

    params.alpha is the K-L growth of the run being integrated; k_baseline is
    the same-time K of a pure-baseline run and only matters when
    params.converter_input == "baseline". job_multiplier scales lambda
    (the ramped job-creation fold).

    The inflow (L*O - U)/d is goal seeking and may be negative.
    """
    lf = labour_force(state.p, params)
    x_k = kl_converter_input(state, params, k_baseline)
    lam_eff = params.lam * job_multiplier

    return Rates(
        dp=state.p * params.g,
        du=(lf * state.o - state.u) / params.d - lf * lam_eff - state.u * params.m,
        do=state.o * params.beta * converters.eta(x_k),
        dk=state.k * params.alpha,
        dm=state.m_level * params.nu * converters.mfp(x_k),
    )
