"""
Model Config - the text configuration document of the engine.

Document layout:
    [parameters]          key = value lines (ModelParameters fields, "lambda" for lam)
    [converter:<name>]    one "x y" breakpoint per line; replaces the whole table
    [scenario:<id>]       alpha, job_fold, ramp_start, ramp_duration, notes
    [sensitivity]         lambda_spread, beta_spread, r_spread, omega_min, omega_max

'#' starts a comment. A user document is merged over DEFAULT_CONFIG_DOCUMENT,
so an empty document yields the published defaults.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from core.converters import ConverterSet, TableFunction
from core.errors import ConfigError, InputError
from core.parameters import ModelParameters, ScenarioSpec, baseline_scenario
from experiments.sensitivity import SensitivitySettings

logger = logging.getLogger(__name__)


DEFAULT_CONFIG_DOCUMENT = """\
# Australia, mid-2023

[parameters]
p0 = 26638544.0
u0 = 1445000.0
o0 = 0.099
k0 = 94.6
m0 = 1.0
g = 0.011
i = 14585316.0
mu = 26638544.0
d = 5.0
lambda = 0.0021
m = 0.0015
beta = 0.0015
alpha = 0.018
nu = 0.0056298
r = 1.6
underemployed_income_ratio = 0.77
tau = 86985.0
omega = 0.5
converter_input = initial

[converter:eta]
0.0 0.0
0.5 0.291
1.0 1.0
1.5 1.99
2.0 3.083
2.5 4.029
3.0 4.636
3.5 4.976
4.0 5.0
4.5 5.0
5.0 5.0

[converter:mfp]
0.0 0.0
0.5 0.415
1.0 1.0
1.5 1.524
2.0 2.214
2.5 3.135
3.0 4.093
3.5 4.667
4.0 4.929
4.5 5.0
5.0 5.0

[converter:prices]
0.0 1.389
0.5 1.15
1.0 1.0
1.5 0.9223
2.0 0.887
2.5 0.856
3.0 0.8332
3.5 0.8083
4.0 0.8
4.5 0.8
5.0 0.8

[converter:theta]
0.0 1.359
0.5 1.152
1.0 1.0
1.5 0.876
2.0 0.796
2.5 0.748
3.0 0.705
3.5 0.676
4.0 0.648
4.5 0.631
5.0 0.612

[scenario:a]
alpha = 0.04
notes = K-L ratio 4% increase per annum

[scenario:b]
alpha = 0.07
notes = K-L ratio 7% increase per annum

[scenario:c]
alpha = 0.1
notes = K-L ratio 10% increase per annum

[scenario:b_jobs]
alpha = 0.07
job_fold = 6.0
notes = moderate deepening with a 6-fold job creation rate

[scenario:substitution]
alpha = 0.11
notes = substitution of a quarter of current work

[sensitivity]
lambda_spread = 0.1
beta_spread = 0.1
r_spread = 0.1
omega_min = 0.3
omega_max = 0.7
"""

SCENARIO_KEYS = ("alpha", "job_fold", "ramp_start", "ramp_duration", "notes")


@dataclass
class ModelConfig:
    """Everything a run needs besides the integration grid."""
    params: ModelParameters
    converters: ConverterSet
    scenarios: Dict[str, ScenarioSpec]
    sensitivity: SensitivitySettings = field(default_factory=SensitivitySettings)

    def scenario(self, scenario_id: str) -> ScenarioSpec:
        if scenario_id not in self.scenarios:
            known = ", ".join(self.scenarios)
            raise InputError(f"unknown scenario '{scenario_id}' (known: {known})")
        return self.scenarios[scenario_id]


# ==================== Raw Document ====================

@dataclass
class _Value:
    text: str
    line: int


@dataclass
class _Section:
    name: str
    line: int
    values: Dict[str, _Value] = field(default_factory=dict)
    points: List[Tuple[float, float, int]] = field(default_factory=list)


def _parse_float(text: str, line: int, section: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"'{text}' is not a number", line=line, section=section) from None
    if not np.isfinite(value):
        raise ConfigError(f"'{text}' is not a finite number", line=line, section=section)
    return value


def _section_kind(name: str) -> str:
    if name in ("parameters", "sensitivity"):
        return name
    kind, _, suffix = name.partition(":")
    if kind == "converter" and suffix in ConverterSet.SECTIONS:
        return "converter"
    if kind == "scenario" and suffix:
        return "scenario"
    return "unknown"


def _read_sections(document: str, strict: bool) -> List[_Section]:
    """Split a document into sections, checking line syntax."""
    sections: List[_Section] = []
    seen = set()
    current: Optional[_Section] = None
    skipping = False

    for number, raw in enumerate(document.splitlines(), start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue

        if text.startswith("["):
            if not text.endswith("]"):
                raise ConfigError(f"malformed section header '{text}'", line=number)
            name = text[1:-1].strip()
            if name in seen:
                raise ConfigError("duplicate section", line=number, section=name)
            seen.add(name)
            if _section_kind(name) == "unknown":
                if strict:
                    raise ConfigError("unknown section", line=number, section=name)
                logger.warning("skipping unknown config section=%s line=%d", name, number)
                current, skipping = None, True
                continue
            current, skipping = _Section(name=name, line=number), False
            sections.append(current)
            continue

        if skipping:
            continue
        if current is None:
            raise ConfigError("content before the first section header", line=number)

        if _section_kind(current.name) == "converter":
            parts = text.replace(",", " ").split()
            if len(parts) != 2:
                raise ConfigError(f"expected 'x y', got '{text}'", line=number, section=current.name)
            x = _parse_float(parts[0], number, current.name)
            y = _parse_float(parts[1], number, current.name)
            current.points.append((x, y, number))
            continue

        key, sep, value = text.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got '{text}'", line=number, section=current.name)
        if key in current.values:
            raise ConfigError(f"duplicate key '{key}'", line=number, section=current.name)
        current.values[key] = _Value(text=value, line=number)

    return sections


# ==================== Validation ====================

def _parameter_keys() -> Dict[str, str]:
    """Accepted document key -> ModelParameters field name."""
    keys = {}
    for name, info in ModelParameters.model_fields.items():
        keys[name] = name
        if info.alias:
            keys[info.alias] = name
    return keys


def _check_keys(section: _Section, allowed, strict: bool) -> None:
    for key, value in list(section.values.items()):
        if key not in allowed:
            if strict:
                raise ConfigError(f"unknown key '{key}'", line=value.line, section=section.name)
            logger.warning("skipping unknown config key=%s section=%s line=%d", key, section.name, value.line)
            del section.values[key]


def _raise_validation(e: ValidationError, lines: Dict[str, int], section: str, header_line: int):
    """First pydantic error as a ConfigError on the offending key's line."""
    err = e.errors()[0]
    loc = str(err["loc"][0]) if err["loc"] else None
    line = lines.get(loc, header_line) if loc else header_line
    where = f"'{loc}': " if loc else ""
    message = err["msg"].removeprefix("Value error, ")
    raise ConfigError(f"{where}{message}", line=line, section=section) from None


def _build_table(section: _Section) -> TableFunction:
    name = section.name.partition(":")[2]
    if len(section.points) < 2:
        raise ConfigError("at least 2 breakpoints required", line=section.line, section=section.name)
    for (x0, _, _), (x1, _, line) in zip(section.points, section.points[1:]):
        if not x1 > x0:
            raise ConfigError(f"x must be strictly increasing ({x1!r} after {x0!r})",
                              line=line, section=section.name)
    return TableFunction(name=name, xs=tuple(p[0] for p in section.points),
                         ys=tuple(p[1] for p in section.points))


@dataclass
class _Merged:
    parameters: Dict[str, _Value] = field(default_factory=dict)
    parameter_line: int = 0
    tables: Dict[str, TableFunction] = field(default_factory=dict)
    scenarios: Dict[str, _Section] = field(default_factory=dict)
    sensitivity: Dict[str, _Value] = field(default_factory=dict)
    sensitivity_line: int = 0


def _merge(merged: _Merged, sections: List[_Section], strict: bool) -> None:
    parameter_keys = _parameter_keys()
    for section in sections:
        kind = _section_kind(section.name)
        if kind == "parameters":
            _check_keys(section, parameter_keys, strict)
            for key, value in section.values.items():
                merged.parameters[parameter_keys[key]] = value
            merged.parameter_line = section.line
        elif kind == "converter":
            table = _build_table(section)
            merged.tables[table.name] = table
        elif kind == "scenario":
            scenario_id = section.name.partition(":")[2]
            if scenario_id == "baseline":
                raise ConfigError("the baseline scenario follows [parameters] alpha and cannot be defined",
                                  line=section.line, section=section.name)
            _check_keys(section, SCENARIO_KEYS, strict)
            if scenario_id in merged.scenarios:
                previous = merged.scenarios[scenario_id]
                section.values = {**previous.values, **section.values}
            merged.scenarios[scenario_id] = section
        elif kind == "sensitivity":
            _check_keys(section, SensitivitySettings.model_fields, strict)
            merged.sensitivity.update(section.values)
            merged.sensitivity_line = section.line


def parse_config(document: str = "", strict: bool = True) -> ModelConfig:
    """
    Parse a configuration document merged over the embedded defaults.

    Raises ConfigError (with line and section) on malformed lines, unknown
    sections or keys (strict mode), non-increasing converter x values and
    out-of-range parameter values.
    """
    merged = _Merged()
    _merge(merged, _read_sections(DEFAULT_CONFIG_DOCUMENT, strict=True), strict=True)
    _merge(merged, _read_sections(document, strict), strict)

    try:
        params = ModelParameters.model_validate({k: v.text for k, v in merged.parameters.items()})
    except ValidationError as e:
        lines = {k: v.line for k, v in merged.parameters.items()}
        lines["lambda"] = lines.get("lam", merged.parameter_line)
        _raise_validation(e, lines, "parameters", merged.parameter_line)

    converters = ConverterSet(**merged.tables)

    scenarios: Dict[str, ScenarioSpec] = {"baseline": baseline_scenario(params)}
    for scenario_id, section in merged.scenarios.items():
        data = {k: v.text for k, v in section.values.items()}
        if data.get("ramp_start", "").lower() in ("", "none"):
            data.pop("ramp_start", None)
        try:
            scenarios[scenario_id] = ScenarioSpec(id=scenario_id, **data)
        except ValidationError as e:
            _raise_validation(e, {k: v.line for k, v in section.values.items()}, section.name, section.line)

    try:
        sensitivity = SensitivitySettings.model_validate({k: v.text for k, v in merged.sensitivity.items()})
    except ValidationError as e:
        _raise_validation(e, {k: v.line for k, v in merged.sensitivity.items()},
                          "sensitivity", merged.sensitivity_line)

    logger.debug("parsed config params_hash=%s scenarios=%s", params.fingerprint(), list(scenarios))
    return ModelConfig(params=params, converters=converters, scenarios=scenarios, sensitivity=sensitivity)


def load_config(path: Optional[str] = None, strict: bool = True) -> ModelConfig:
    """Parse a document from disk; no path means the embedded defaults."""
    if path is None:
        return parse_config("", strict=strict)
    try:
        document = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read config '{path}': {e}") from e
    return parse_config(document, strict=strict)


# ==================== Emission ====================

def _number(value: float) -> str:
    return repr(float(value))


def emit_config(config: ModelConfig, header: str = "") -> str:
    """Effective configuration as a document that parses back to the same config."""
    lines: List[str] = []
    for text in header.splitlines():
        lines.append(f"# {text}".rstrip())
    if lines:
        lines.append("")

    lines.append("[parameters]")
    for name, info in ModelParameters.model_fields.items():
        key = info.alias or name
        value = getattr(config.params, name)
        lines.append(f"{key} = {value if isinstance(value, str) else _number(value)}")

    for name in ConverterSet.SECTIONS:
        lines.append("")
        lines.append(f"[converter:{name}]")
        for x, y in getattr(config.converters, name).points:
            lines.append(f"{_number(x)} {_number(y)}")

    for scenario_id, spec in config.scenarios.items():
        if scenario_id == "baseline":
            continue
        lines.append("")
        lines.append(f"[scenario:{scenario_id}]")
        lines.append(f"alpha = {_number(spec.alpha)}")
        lines.append(f"job_fold = {_number(spec.job_fold)}")
        if spec.ramp_start is not None:
            lines.append(f"ramp_start = {_number(spec.ramp_start)}")
        lines.append(f"ramp_duration = {_number(spec.ramp_duration)}")
        if spec.notes:
            lines.append(f"notes = {spec.notes.replace('#', '').strip()}")

    lines.append("")
    lines.append("[sensitivity]")
    for name in SensitivitySettings.model_fields:
        lines.append(f"{name} = {_number(getattr(config.sensitivity, name))}")

    return "\n".join(lines) + "\n"
