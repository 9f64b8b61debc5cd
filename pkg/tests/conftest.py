import os

import pytest
from hypothesis import HealthCheck, settings

from pmelab import Field, Grid

settings.register_profile('fast', max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile('thorough', max_examples=200, deadline=None)
settings.load_profile(os.environ.get('PMELAB_HYPOTHESIS_PROFILE', 'fast'))


@pytest.fixture
def line():
    return Grid(1, 256)


@pytest.fixture
def wave(line):
    import numpy as np

    return Field.from_function(line, lambda x: np.sin(2.0 * np.pi * x))
