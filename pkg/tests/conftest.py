import math

import pytest

from wigner_aah.model import AahParams
from wigner_aah.wigner import GaussianEnsemble


@pytest.fixture
def params():
    return AahParams(a=1.0, w=0.4)


@pytest.fixture
def ens():
    return GaussianEnsemble(0.5)


def rel_dev(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


PI = math.pi
