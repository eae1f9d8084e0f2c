import numpy as np
import pytest

from splinemd.basis import BasisEnv
from splinemd.fitting import FitConfig, SampleSeries, fit

UNIT_TIMES = np.linspace(0.0, 1.0, 2000)


@pytest.fixture(scope="session")
def env180():
    """The reference configuration: order 4, 180 basis functions, infill 4."""
    return BasisEnv.uniform(0.0, 1.0, order=4, nbasis=180, infill=4)


@pytest.fixture(scope="session")
def env_small():
    return BasisEnv.uniform(0.0, 1.0, order=4, nbasis=20, infill=4)


def fit_samples(values, env):
    return fit(SampleSeries(UNIT_TIMES, values), env, FitConfig())


@pytest.fixture(scope="session")
def ladder_signal(env180):
    t = UNIT_TIMES
    return fit_samples(40 * t + (20 + 10 * np.cos(5 * np.pi * t)) * np.cos(25 * np.pi * t), env180)


@pytest.fixture(scope="session")
def emd0_signal(env180):
    t = UNIT_TIMES
    values = (
        (t + 1) * np.cos((15 * t + 21) * np.pi * t)
        + (3 * t + 1) * np.cos(5 * np.pi * t)
        + 20 * (t + 1)
    )
    return fit_samples(values, env180)
