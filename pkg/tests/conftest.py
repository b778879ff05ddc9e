import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from twotime.system import SystemParams


@pytest.fixture
def well_system():
    return SystemParams(m=1.0, M=5.0, pe=-26.041666666666668, D=0.9)


@pytest.fixture
def barrier_system():
    return SystemParams(m=1.0, M=5.0, pe=2.0, D=1.0)


@pytest.fixture
def infinite_system():
    return SystemParams(m=1.0, M=10.0, D=1.0, infinite_well=True)
