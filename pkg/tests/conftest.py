"""Shared fixtures."""

import sys
sys.path.append(".")

import pytest

from core.integrator import IntegrationConfig
from core.parameters import ModelParameters

# beta fitted to the scenario b underutilisation anchor (see data/calibrated.cfg)
CALIBRATED_BETA = 0.015


@pytest.fixture
def params() -> ModelParameters:
    return ModelParameters()


@pytest.fixture
def calibrated_params() -> ModelParameters:
    return ModelParameters(beta=CALIBRATED_BETA)


@pytest.fixture
def cfg() -> IntegrationConfig:
    return IntegrationConfig()
