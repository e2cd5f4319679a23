"""Tests for model_config.py"""

from pathlib import Path

import pytest

from core.converters import DEFAULT_CONVERTERS
from core.errors import ConfigError
from core.parameters import ModelParameters
from experiments.scenarios import default_scenarios
from experiments.sensitivity import SensitivitySettings
from model_config import emit_config, load_config, parse_config

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def test_empty_document_gives_defaults():
    config = parse_config("")
    assert config.params == ModelParameters()
    assert config.converters == DEFAULT_CONVERTERS
    assert config.sensitivity == SensitivitySettings()
    assert config.scenarios == default_scenarios(config.params)


def test_single_override():
    config = parse_config("[parameters]\nbeta = 0.003\n")
    assert config.params == ModelParameters().with_overrides(beta=0.003)


def test_lambda_key_and_comments():
    config = parse_config("# header\n[parameters]\nlambda = 0.004  # fourfold-ish\n")
    assert config.params.lam == 0.004


def test_non_increasing_converter():
    with pytest.raises(ConfigError) as info:
        parse_config("[converter:eta]\n1 1\n0.5 0.2\n")
    assert info.value.line == 3
    assert info.value.section == "converter:eta"
    assert "line 3 [converter:eta]" in str(info.value)


def test_converter_section_replaces_table():
    config = parse_config("[converter:theta]\n0 1.2\n1 1\n2 0.8\n")
    assert config.converters.theta.points == [(0.0, 1.2), (1.0, 1.0), (2.0, 0.8)]
    assert config.converters.eta == DEFAULT_CONVERTERS.eta


@pytest.mark.parametrize("document, line", [
    ("[parameters]\ngamma = 1\n", 2),
    ("[parameters]\nbeta 0.003\n", 2),
    ("[parameters]\nbeta = abc\n", 2),
    ("[parameters]\n\nomega = 1.5\n", 3),
    ("[parameters]\nbeta = 0.1\nbeta = 0.2\n", 3),
    ("beta = 0.1\n", 1),
    ("[planets]\n", 1),
    ("[converter:eta]\n0 0\n1 x\n", 3),
    ("[converter:eta]\n0 0 0\n", 2),
    ("[converter:eta]\n0 0\n", 1),
    ("[scenario:baseline]\nalpha = 0.02\n", 1),
    ("[scenario:d]\njob_fold = 2\n", 1),
    ("[scenario:d]\nalpha = -0.1\n", 2),
    ("[sensitivity]\nomega_min = 2\n", 2),
])
def test_line_numbered_errors(document, line):
    with pytest.raises(ConfigError) as info:
        parse_config(document)
    assert info.value.line == line


def test_non_strict_skips_unknown_keys(caplog):
    config = parse_config("[parameters]\ngamma = 1\nbeta = 0.002\n[planets]\nmars = 4\n", strict=False)
    assert config.params.beta == 0.002
    assert "gamma" in caplog.text


def test_scenarios_merge_and_extend():
    config = parse_config("[scenario:b]\njob_fold = 3\n\n[scenario:d]\nalpha = 0.05\nramp_start = 2030\n")
    assert config.scenarios["b"].alpha == 0.07
    assert config.scenarios["b"].job_fold == 3.0
    assert config.scenarios["d"].ramp_start == 2030.0


def test_baseline_follows_parameter_alpha():
    config = parse_config("[parameters]\nalpha = 0.02\n")
    assert config.scenarios["baseline"].alpha == 0.02


def test_round_trip():
    document = (
        "[parameters]\nbeta = 0.0123456789\nconverter_input = baseline\n"
        "[converter:eta]\n0 0\n1 1.1\n3 4.2\n"
        "[scenario:x]\nalpha = 0.09\njob_fold = 4.5\nramp_start = 2027.25\nnotes = extra run\n"
        "[sensitivity]\nomega_min = 0.4\n"
    )
    config = parse_config(document)
    assert parse_config(emit_config(config, header="round trip")) == config
    assert parse_config(emit_config(parse_config(""))) == parse_config("")


def test_load_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("[parameters]\nbeta = 0.004\n", encoding="utf-8")
    assert load_config(str(path)).params.beta == 0.004
    assert load_config().params == ModelParameters()
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.cfg"))


def test_calibrated_profile():
    config = load_config(str(DATA_DIR / "calibrated.cfg"))
    assert config.params.beta == 0.015
    assert config.params.with_overrides(beta=0.0015) == ModelParameters()
