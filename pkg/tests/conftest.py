import random

import pytest
from hypothesis import HealthCheck, settings

from acpkit.generators import default_config

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(params=["acpec", "acpecs", "acpecr", "acpecr_lastaction"])
def any_cfg(request):
    return default_config(request.param)
