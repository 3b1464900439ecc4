import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from uwoc import presets
from uwoc.channel import gamma0
from uwoc.diversity import MrcBoundConvention


@pytest.fixture(scope="session")
def egg():
    return presets.EGG


@pytest.fixture(scope="session")
def significant():
    return presets.POINTING["significant"]


@pytest.fixture(scope="session")
def strong():
    return presets.POINTING["strong"]


@pytest.fixture(scope="session")
def negligible():
    return presets.POINTING["negligible"]


@pytest.fixture(scope="session")
def g0_at_0dbm():
    return gamma0(presets.link_at(0.0))


@pytest.fixture(scope="session")
def conv():
    return MrcBoundConvention(variant="n_times_gamma_n", prefactor="rho_squared")
