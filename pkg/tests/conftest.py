import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tonguelock.acceptance import random_base, random_family

settings.register_profile("tonguelock", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("tonguelock")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def family_and_base():
    def make(seed):
        r = np.random.default_rng(seed)
        return random_family(r), random_base(r), r
    return make
