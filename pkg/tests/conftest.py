import numpy as np
import pytest

from anisospec.bracket_metric import MetricParams
from anisospec.wavepackets import BargmannTransform, TorusGrid


@pytest.fixture(scope="session")
def params_half():
    """alpha_perp = alpha_par = 1/2, delta0 = 1: the workhorse metric."""
    return MetricParams(1.0, 0.5, 0.5)


@pytest.fixture(scope="session")
def circle_transform(params_half):
    """z-circle transform reused across quantize/ wavepacket tests."""
    return BargmannTransform(TorusGrid(0, 128), params_half, window=16)


@pytest.fixture(scope="session")
def torus_transform(params_half):
    """Small 2-torus transform (64^2, length pi)."""
    return BargmannTransform(TorusGrid(1, 64, length=np.pi), params_half,
                             window=8)
