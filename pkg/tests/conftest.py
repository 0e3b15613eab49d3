import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("tetratsp", max_examples=40, deadline=None)
settings.load_profile("tetratsp")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
