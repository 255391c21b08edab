from pathlib import Path

import numpy as np
import pytest

from nvmag import HamiltonianParams, ReadoutConfig
from nvmag.scenario import load_scenario

SCENARIO_FILE = Path(__file__).resolve().parent.parent / "scenarios" / "baseline.yaml"


@pytest.fixture
def params():
    return HamiltonianParams(static_field=4.6e-3)


@pytest.fixture
def readout_cfg():
    return ReadoutConfig(photon_rate=9.277e18)


@pytest.fixture
def baseline_scenario():
    return load_scenario(SCENARIO_FILE)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
