import numpy as np
import pytest

from weaklight import PostSelectionParams, SetupConfig, SourceParams
from weaklight._kernels import available_backends


@pytest.fixture
def led():
    return SourceParams(808.0, 38.8)


@pytest.fixture
def znse_source():
    return SourceParams(805.0, 41.6)


@pytest.fixture
def filtered_source():
    return SourceParams(795.0, 18.9)


def make_config(source, alpha, beta, spread=0.0, **kwargs):
    return SetupConfig(
        source=source,
        postsel=PostSelectionParams(beta, spread),
        alpha=alpha,
        **kwargs,
    )


def backend_params():
    return [pytest.param(mod, id=name) for name, mod in available_backends().items()]


@pytest.fixture
def rng():
    return np.random.default_rng(20240808)
