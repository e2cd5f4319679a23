"""Tests for core/model.py and core/parameters.py"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.converters import DEFAULT_CONVERTERS
from core.errors import InputError, ModelDomainError
from core.model import (
    SimState,
    aggregate_disposable_income,
    consumption_index,
    derivatives,
    derived_outputs,
    labour_force,
    output_reference,
    split_underutilised,
)
from core.parameters import ModelParameters, ScenarioSpec


T0 = 2023.5


def test_defaults_and_alias(params):
    assert params.lam == 0.0021
    assert params.nu == 0.0056298
    assert ModelParameters(**{"lambda": 0.003}).lam == 0.003
    assert params.initial_labour_force == pytest.approx(14_585_316.0)


def test_parameter_validation():
    with pytest.raises(ValidationError):
        ModelParameters(omega=1.5)
    with pytest.raises(ValidationError):
        ModelParameters(u0=20_000_000.0)
    with pytest.raises(ValidationError):
        ModelParameters(mu=30_000_000.0)
    with pytest.raises(ValidationError):
        ModelParameters(gamma=1.0)


def test_with_overrides_revalidates(params):
    assert params.with_overrides(beta=0.003).beta == 0.003
    assert params.beta == 0.0015
    with pytest.raises(ValidationError):
        params.with_overrides(r=-1.0)


def test_fingerprint_is_stable(params):
    assert params.fingerprint() == ModelParameters().fingerprint()
    assert params.fingerprint() != params.with_overrides(beta=0.003).fingerprint()


def test_split_underutilised():
    unemployed, underemployed = split_underutilised(2.6, 1.6)
    assert unemployed == pytest.approx(1.0)
    assert underemployed == pytest.approx(1.6)
    assert split_underutilised(0.0, 1.6) == (0.0, 0.0)
    with pytest.raises(InputError):
        split_underutilised(-1.0, 1.6)
    with pytest.raises(InputError):
        split_underutilised(1.0, 0.0)


def test_initial_income_per_capita(params):
    state = SimState.initial(params, T0)
    psi = aggregate_disposable_income(state, params)
    assert psi / params.p0 == pytest.approx(45_143.97, rel=1e-4)


def test_initial_outputs_are_normalized(params):
    reference = output_reference(params, T0)
    out = derived_outputs(SimState.initial(params, T0), params, DEFAULT_CONVERTERS, reference)
    assert out.income_pc_ratio == 1.0
    assert out.consumption_index == 1.0
    assert out.price_level == 1.0
    assert out.labour_force == pytest.approx(params.i)


def test_initial_rates(params):
    rates = derivatives(SimState.initial(params, T0), params, params.k0)
    assert rates.dp == pytest.approx(293_023.98, rel=1e-6)
    assert rates.du == pytest.approx(-33_007.41, rel=1e-5)
    assert rates.do == pytest.approx(1.485e-4, rel=1e-12)
    assert rates.dk == pytest.approx(1.7028, rel=1e-12)
    assert rates.dm == pytest.approx(0.0056298, rel=1e-12)


def test_job_multiplier_scales_job_creation(params):
    state = SimState.initial(params, T0)
    base = derivatives(state, params, params.k0)
    boosted = derivatives(state, params, params.k0, job_multiplier=3.0)
    lf = labour_force(params.p0, params)
    assert base.du - boosted.du == pytest.approx(2.0 * lf * params.lam)


def test_onset_inflow_may_be_negative(params):
    # O*L below U: the goal-seeking inflow drains U
    low_onset = params.with_overrides(o0=0.05)
    rates = derivatives(SimState.initial(low_onset, T0), low_onset, low_onset.k0)
    assert rates.du < 0


def test_baseline_converter_input(params):
    p = params.with_overrides(converter_input="baseline")
    state = SimState(t=T0, p=p.p0, u=p.u0, o=p.o0, k=2 * p.k0, m_level=1.0)
    relative_to_baseline = derivatives(state, p, 2 * p.k0)
    relative_to_initial = derivatives(state, params, params.k0)
    assert relative_to_baseline.do == pytest.approx(p.o0 * p.beta * 1.0)
    assert relative_to_initial.do == pytest.approx(p.o0 * p.beta * DEFAULT_CONVERTERS.eta(2.0))


def test_underutilisation_above_labour_force(params):
    state = SimState(t=T0, p=params.p0, u=params.i * 1.01, o=params.o0, k=params.k0, m_level=1.0)
    with pytest.raises(ModelDomainError, match="exceed the labour force"):
        aggregate_disposable_income(state, params)


def test_consumption_index():
    assert consumption_index(1.0, 1.0, 0.5) == 1.0
    assert consumption_index(0.74, 1.0, 0.5) == pytest.approx(0.74)
    # prices at 80% with half of income exposed
    assert consumption_index(1.0, 0.8, 0.5) == pytest.approx(1.0 / 0.9)
    with pytest.raises(ModelDomainError):
        consumption_index(1.0, -2.0, 1.0)


def test_scenario_spec():
    spec = ScenarioSpec(id="x", alpha=0.07, job_fold=6.0)
    assert spec.ramps_jobs
    assert not ScenarioSpec(id="y", alpha=0.07).ramps_jobs
    with pytest.raises(ValidationError):
        ScenarioSpec(id="z", alpha=0.07, job_fold=-1.0)
    with pytest.raises(ValidationError):
        ScenarioSpec(id="", alpha=0.07)


def test_income_linear_in_tau(params):
    state = SimState.initial(params, T0)
    doubled = params.with_overrides(tau=2.0 * params.tau)
    assert aggregate_disposable_income(state, doubled) == pytest.approx(
        2.0 * aggregate_disposable_income(state, params), rel=1e-12
    )


def test_income_with_no_underutilisation(params):
    state = SimState(t=T0, p=params.p0, u=0.0, o=params.o0, k=params.k0, m_level=1.0)
    lf = labour_force(params.p0, params)
    assert DEFAULT_CONVERTERS.theta(0.0) == 1.359
    assert aggregate_disposable_income(state, params) == pytest.approx(lf * 1.359 * params.tau, rel=1e-12)


def test_income_strictly_decreasing_in_underutilised(params):
    rng = np.random.default_rng(11)
    for _ in range(500):
        p = rng.uniform(1e7, 5e7)
        lf = labour_force(p, params)
        u = rng.uniform(0.0, 0.99 * lf)
        step = rng.uniform(1e-4, 1e-2) * lf
        step = min(step, lf - u)
        low = SimState(t=T0, p=p, u=u, o=params.o0, k=params.k0, m_level=1.0)
        high = SimState(t=T0, p=p, u=u + step, o=params.o0, k=params.k0, m_level=1.0)
        assert aggregate_disposable_income(high, params) < aggregate_disposable_income(low, params)


def test_consumption_index_monotone():
    rng = np.random.default_rng(5)
    for _ in range(500):
        omega = rng.uniform(0.05, 0.95)
        income = rng.uniform(0.2, 3.0)
        p1, p2 = np.sort(rng.uniform(0.5, 2.0, size=2))
        if p1 == p2:
            continue
        assert consumption_index(income, p2, omega) < consumption_index(income, p1, omega)
        i1, i2 = np.sort(rng.uniform(0.2, 3.0, size=2))
        if i1 == i2:
            continue
        assert consumption_index(i1, p1, omega) < consumption_index(i2, p1, omega)


def test_rates_finite_for_valid_states(params):
    rng = np.random.default_rng(17)
    for _ in range(2000):
        p = rng.uniform(1e6, 1e8)
        state = SimState(
            t=rng.uniform(2023.5, 2050.5),
            p=p,
            u=rng.uniform(0.0, labour_force(p, params)),
            o=rng.uniform(0.0, 1.0),
            k=rng.uniform(1.0, 500.0),
            m_level=rng.uniform(0.1, 10.0),
        )
        assert state.is_valid()
        rates = derivatives(state, params, rng.uniform(1.0, 500.0), job_multiplier=rng.uniform(0.0, 12.0))
        assert all(math.isfinite(v) for v in rates)
