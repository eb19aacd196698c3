import numpy as np
import pytest

from quadlind import ModelSpec, XXChainParams, validate_model


@pytest.fixture
def single_mode():
    """One site, gain 0.75 and loss 0.25: P = -0.5."""
    return validate_model(ModelSpec([[0.0]], [[0.75]], [[0.25]]))


@pytest.fixture
def worked_xx():
    return XXChainParams(L=4, J=1.0, h_z=0.0, Gamma_1=2.0, Gamma_L=0.5, nbar_1=1.0, nbar_L=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
