import numpy as np
import pytest

from blockembed.sbm import BlockModel, compute_constants, factorize_p


@pytest.fixture(scope="session")
def two_block_model() -> BlockModel:
    """The benchmark two-block model used across the integration tests."""
    return BlockModel(
        p=np.array([[0.42, 0.42], [0.42, 0.5]]),
        rho=np.array([0.6, 0.4]),
        directed=False,
    )


@pytest.fixture(scope="session")
def two_block_constants(two_block_model):
    return compute_constants(two_block_model, factorize_p(two_block_model))
