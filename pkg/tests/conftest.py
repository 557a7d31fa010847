import numpy as np
import pytest

from config import ENVIRONMENT_OVERRIDES, CONFIG_PATH_ENV, RunConfig
from polar.construction import construct_code


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for variable in list(ENVIRONMENT_OVERRIDES) + [CONFIG_PATH_ENV]:
        monkeypatch.delenv(variable, raising=False)


@pytest.fixture
def config():
    return RunConfig(load_environment=False)


@pytest.fixture(scope='session')
def beacon_code():
    return construct_code(256, 158, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def bpsk_llrs(codeword, magnitude=10.0):
    """ビット0 → +magnitude、ビット1 → -magnitude"""
    return magnitude * (1.0 - 2.0 * np.asarray(codeword, dtype=np.float64))
