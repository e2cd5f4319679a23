"""Tests for experiments/scenarios.py"""

import logging
import math

import pytest

from core.errors import InputError
from core.integrator import IntegrationConfig, simulate
from core.parameters import ScenarioSpec, baseline_scenario
from experiments.scenarios import (
    PUBLISHED_RESULTS,
    compare_at,
    compare_values,
    default_scenarios,
    pct_change,
    run_comparisons,
    run_pair,
    sign_discrepancy,
)


def _horizon_values(params, cfg, alpha=None, fold=1.0):
    scenario = ScenarioSpec(id="x", alpha=params.alpha if alpha is None else alpha, job_fold=fold)
    state, out = simulate(params, scenario, cfg).last
    return state.u, out.income_pc, out.consumption_index


def test_default_scenarios(params):
    scenarios = default_scenarios(params)
    assert scenarios["baseline"].alpha == 0.018
    assert [scenarios[s].alpha for s in ("a", "b", "c")] == [0.04, 0.07, 0.10]
    assert scenarios["b_jobs"].job_fold == 6.0
    assert scenarios["substitution"].alpha == 0.11
    assert set(k for k, _ in PUBLISHED_RESULTS) == {"a", "b", "c"}


def test_compare_values_arithmetic():
    s = compare_values("income_pc", 2050.5, 100.0, 74.0)
    assert s.abs_reduction == 26.0
    assert s.pct_reduction == 26.0
    up = compare_values("underutilised_persons", 2050.5, 100.0, 150.0)
    assert up.abs_reduction == 50.0
    assert up.pct_reduction == 50.0
    assert up.direction == "increase"
    assert math.isnan(compare_values("income_pc", 2050.5, 0.0, 1.0).pct_reduction)
    zero_base = compare_values("underutilised_persons", 2050.5, 0.0, 1000.0)
    assert zero_base.abs_reduction == 1000.0
    assert math.isnan(zero_base.pct_reduction)
    assert math.isnan(pct_change(0.0, 5.0))
    assert pct_change(200.0, 150.0) == -25.0


def test_identical_runs_compare_to_zero(params, cfg):
    baseline = simulate(params, baseline_scenario(params), cfg)
    for t in (2023.5, 2030.0, 2050.5):
        for summary in compare_at(baseline, baseline, t):
            assert summary.abs_reduction == 0.0
            assert summary.pct_reduction == 0.0


def test_scenario_equal_to_baseline_gives_identical_runs(params, cfg):
    baseline, scenario = run_pair(params, ScenarioSpec(id="same", alpha=params.alpha), cfg)
    assert baseline.to_frame().equals(scenario.to_frame())


def test_compare_requires_grid_time(params, cfg):
    baseline, scenario = run_pair(params, default_scenarios(params)["b"], cfg)
    with pytest.raises(InputError):
        compare_at(baseline, scenario, 2050.4)
    coarse = simulate(params, baseline_scenario(params), IntegrationConfig(record_stride=32))
    with pytest.raises(InputError):
        compare_at(coarse, scenario, 2050.5)


def test_scenario_ordering(params, cfg):
    runs = [_horizon_values(params, cfg, alpha) for alpha in (0.018, 0.04, 0.07, 0.10)]
    u = [r[0] for r in runs]
    income = [r[1] for r in runs]
    assert u == sorted(u) and len(set(u)) == 4
    assert income == sorted(income, reverse=True) and len(set(income)) == 4


def test_consumption_ordering_with_calibrated_beta(calibrated_params, cfg, caplog):
    with caplog.at_level(logging.WARNING):
        rows = run_comparisons(calibrated_params, default_scenarios(calibrated_params), cfg)
    assert "sign discrepancy" not in caplog.text
    by_scenario = {sid: s for sid, s in rows if s.metric == "consumption_index"}
    reductions = [by_scenario[s].pct_reduction for s in ("a", "b", "c")]
    assert 0 < reductions[0] < reductions[1] < reductions[2]
    increases = {sid: s.pct_reduction for sid, s in rows if s.metric == "underutilised_persons"}
    assert increases["b"] == pytest.approx(99.76, abs=2.0)


def test_monotone_in_alpha(params, cfg):
    runs = [_horizon_values(params, cfg, alpha) for alpha in (0.02, 0.04, 0.06, 0.08, 0.10)]
    for (u1, inc1, _), (u2, inc2, _) in zip(runs, runs[1:]):
        assert u2 >= u1
        assert inc2 <= inc1


def test_monotone_in_job_fold(params, cfg):
    runs = [_horizon_values(params, cfg, 0.07, fold) for fold in (1.0, 3.0, 6.0, 12.0)]
    for (u1, inc1, _), (u2, inc2, _) in zip(runs, runs[1:]):
        assert u2 <= u1
        assert inc2 >= inc1


def test_run_comparisons_rows(params, cfg):
    rows = run_comparisons(params, default_scenarios(params), cfg)
    assert len(rows) == 9
    assert [sid for sid, _ in rows[:3]] == ["a", "a", "a"]
    with pytest.raises(InputError):
        run_comparisons(params, default_scenarios(params), cfg, scenario_ids=["zz"])


def test_default_beta_inverts_consumption_sign(params, cfg, caplog):
    # At the published beta the price effect outweighs the income loss
    with caplog.at_level(logging.WARNING, logger="experiments.scenarios"):
        rows = run_comparisons(params, default_scenarios(params), cfg)
    by_metric = {}
    for sid, summary in rows:
        by_metric.setdefault(summary.metric, {})[sid] = summary.pct_reduction

    assert all(by_metric["consumption_index"][s] < 0 for s in ("a", "b", "c"))
    assert all(by_metric["income_pc"][s] > 0 for s in ("a", "b", "c"))
    assert all(by_metric["underutilised_persons"][s] > 0 for s in ("a", "b", "c"))

    flagged = [r for r in caplog.records if "sign discrepancy" in r.getMessage()]
    assert len(flagged) == 3
    assert all("metric=consumption_index" in r.getMessage() for r in flagged)
    assert all(r.levelno == logging.WARNING for r in flagged)


def test_sign_discrepancy():
    finding = sign_discrepancy("b", "consumption_index", -0.3)
    assert finding.published_pct == 21.21
    assert finding.to_dict()["computed_pct"] == -0.3
    assert sign_discrepancy("b", "consumption_index", 4.0) is None
    assert sign_discrepancy("b", "consumption_index", math.nan) is None
    assert sign_discrepancy("b_jobs", "consumption_index", -1.0) is None
