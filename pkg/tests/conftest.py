import numpy as np
import pytest

from nclp.density import make_density
from nclp.randomgen import random_density, trial_rng


@pytest.fixture
def rng():
    return trial_rng(20240611)


@pytest.fixture
def density(rng):
    """Faithful density on M_6 with condition number 50."""
    return random_density(rng, 6, condition=50.0)


@pytest.fixture
def singular_density(rng):
    """Rank-3 density on M_5."""
    return random_density(rng, 5, condition=20.0, rank=3)


@pytest.fixture
def two_level():
    """diag(1, 3)/4 in the standard basis."""
    return make_density(np.diag([1.0, 3.0]))

