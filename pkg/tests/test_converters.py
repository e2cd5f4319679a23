"""Tests for core/converters.py"""

import numpy as np
import pytest

from core.converters import (
    DEFAULT_CONVERTERS,
    ETA_POINTS,
    MFP_POINTS,
    PRICE_POINTS,
    THETA_POINTS,
    TableFunction,
    eval_table,
)
from core.errors import InputError


@pytest.mark.parametrize("name, points", [
    ("eta", ETA_POINTS),
    ("mfp", MFP_POINTS),
    ("prices", PRICE_POINTS),
    ("theta", THETA_POINTS),
])
def test_builtin_tables_exact_at_breakpoints(name, points):
    table = getattr(DEFAULT_CONVERTERS, name)
    for x, y in points:
        assert eval_table(table, x) == y


def test_published_values():
    assert DEFAULT_CONVERTERS.theta(2.0) == 0.796
    assert DEFAULT_CONVERTERS.prices(1.5) == 0.9223
    assert DEFAULT_CONVERTERS.eta(0.75) == pytest.approx(0.6455, abs=1e-12)


def test_clamped_outside_range():
    eta = DEFAULT_CONVERTERS.eta
    assert eta(-1.0) == 0.0
    assert eta(12.0) == 5.0
    assert DEFAULT_CONVERTERS.theta(100.0) == 0.612


def test_linear_between_breakpoints():
    tf = TableFunction.from_points("t", [(0.0, 0.0), (2.0, 4.0)])
    assert tf(0.5) == 1.0
    assert tf(1.5) == 3.0


def test_monotone_shapes():
    assert DEFAULT_CONVERTERS.prices.is_non_increasing()
    assert DEFAULT_CONVERTERS.theta.is_non_increasing()
    assert not DEFAULT_CONVERTERS.eta.is_non_increasing()


def test_invalid_tables():
    with pytest.raises(InputError):
        TableFunction.from_points("one", [(0.0, 1.0)])
    with pytest.raises(InputError, match="strictly increasing"):
        TableFunction.from_points("flat", [(0.0, 1.0), (0.0, 2.0)])
    with pytest.raises(InputError):
        TableFunction(name="uneven", xs=(0.0, 1.0), ys=(1.0,))
    with pytest.raises(InputError, match="finite"):
        TableFunction.from_points("nan", [(0.0, 1.0), (1.0, np.nan)])


def test_scaled_eta():
    scaled = DEFAULT_CONVERTERS.with_eta_scale(2.0)
    assert scaled.eta(1.0) == 2.0
    assert scaled.theta == DEFAULT_CONVERTERS.theta
    assert DEFAULT_CONVERTERS.eta(1.0) == 1.0


def test_replace_unknown_converter():
    with pytest.raises(InputError):
        DEFAULT_CONVERTERS.replace(gamma=DEFAULT_CONVERTERS.eta)
