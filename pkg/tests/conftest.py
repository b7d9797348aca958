import numpy as np
import pytest

from kansa_tps.geometry import AnalyticCurve, Domain, builtin_curve
from kansa_tps.kernel import TpsKernel


@pytest.fixture(scope="session")
def disk():
    return Domain(AnalyticCurve.circle())


@pytest.fixture(scope="session")
def ellipse():
    return Domain(AnalyticCurve.ellipse(2.0, 1.0))


@pytest.fixture(scope="session")
def star3():
    return Domain(builtin_curve("star3"))


@pytest.fixture
def k2():
    return TpsKernel(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
