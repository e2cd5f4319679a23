"""Tests for experiments/calibration.py"""

import pytest
from pydantic import ValidationError

from core.errors import InputError
from core.integrator import simulate
from core.parameters import baseline_scenario
from experiments.calibration import CalibrationTarget, calibrate, golden_section
from experiments.scenarios import default_scenarios
from experiments.sweep import ThresholdQuery, threshold_search


def test_golden_section_quadratic():
    result = golden_section(lambda x: (x - 0.3) ** 2, 0.0, 1.0, xtol=1e-9)
    assert result.x == pytest.approx(0.3, abs=1e-8)
    assert all(b <= a for a, b in zip(result.history, result.history[1:]))


def test_golden_section_boundary_minimum():
    result = golden_section(lambda x: x, 1.0, 2.0)
    assert result.x == 1.0
    with pytest.raises(InputError):
        golden_section(lambda x: x, 2.0, 1.0)


def test_target_validation():
    with pytest.raises(ValidationError):
        CalibrationTarget(metric="gdp", scenario_id="b", t=2050.5, target_value=1.0)
    with pytest.raises(ValidationError):
        CalibrationTarget(metric="income_pc", scenario_id="b", t=2050.5, target_value=1.0, weight=0.0)


def test_empty_targets(params):
    with pytest.raises(InputError):
        calibrate(params, [], default_scenarios(params))


def test_unknown_scenario_or_time(params):
    scenarios = default_scenarios(params)
    with pytest.raises(InputError):
        calibrate(params, [CalibrationTarget(metric="income_pc", scenario_id="zz", t=2050.5,
                                             target_value=1.0)], scenarios)
    with pytest.raises(InputError):
        calibrate(params, [CalibrationTarget(metric="income_pc", scenario_id="b", t=2050.51,
                                             target_value=1.0)], scenarios)


def _level_targets(params, cfg, scenarios):
    targets = []
    for sid in ("baseline", "b"):
        scenario = baseline_scenario(params) if sid == "baseline" else scenarios[sid]
        u = simulate(params, scenario, cfg).last[0].u
        targets.append(CalibrationTarget(metric="underutilised_persons", scenario_id=sid,
                                         t=2050.5, target_value=u))
    return targets


def test_targets_already_met(params, cfg):
    scenarios = default_scenarios(params)
    result = calibrate(params, _level_targets(params, cfg, scenarios), scenarios, cfg=cfg)
    assert result.objective == 0.0
    assert result.params == params


def test_recovers_synthetic_beta(params, cfg):
    scenarios = default_scenarios(params)
    truth = params.with_overrides(beta=0.003)
    targets = _level_targets(truth, cfg, scenarios)

    result = calibrate(params, targets, scenarios, bounds=(0.001, 0.01), cfg=cfg)
    assert result.beta == pytest.approx(0.003, abs=1e-4)
    assert not result.at_boundary
    assert all(b <= a for a, b in zip(result.history, result.history[1:]))


def test_boundary_solution_is_flagged(params, cfg, caplog):
    scenarios = default_scenarios(params)
    targets = _level_targets(params.with_overrides(beta=0.003), cfg, scenarios)
    result = calibrate(params, targets, scenarios, bounds=(0.005, 0.01), cfg=cfg)
    assert result.at_boundary
    assert result.beta == 0.005
    assert "boundary" in caplog.text


def test_underutilisation_anchor(params, cfg):
    scenarios = default_scenarios(params)
    target = CalibrationTarget(metric="underutilised_persons_pct_change", scenario_id="b",
                               t=2050.5, target_value=99.76)
    result = calibrate(params, [target], scenarios, bounds=(0.001, 0.03), cfg=cfg, xtol=1e-7)
    assert 0.014 < result.beta < 0.016
    assert result.objective < 1e-4

    # The fitted parameters still show the threshold at alpha = 11%
    threshold = threshold_search(result.params, ThresholdQuery(), cfg, result.converters)
    assert threshold.found


def test_two_parameter_calibration(params, cfg):
    scenarios = default_scenarios(params)
    targets = _level_targets(params.with_overrides(beta=0.003), cfg, scenarios)
    result = calibrate(params, targets, scenarios, free="beta_and_converter_scale",
                       bounds=(0.001, 0.01), scale_bounds=(0.5, 2.0), cfg=cfg, xtol=1e-6, max_sweeps=1)
    start = calibrate(params, targets, scenarios, bounds=(0.001, 0.01), cfg=cfg, xtol=1e-6)
    assert result.objective <= start.objective
    assert 0.5 <= result.eta_scale <= 2.0
