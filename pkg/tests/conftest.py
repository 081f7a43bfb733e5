import numpy as np
import pytest
from hypothesis import settings

from tdswt import dispersive, pulses, transmon

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def device():
    return transmon.default_device()


@pytest.fixture(scope="session")
def spec(device):
    return dispersive.system_spec(device)


@pytest.fixture(scope="session")
def tan_pulse(device):
    return pulses.default_pulse("tangential", device)


@pytest.fixture(scope="session")
def sin_pulse(device):
    return pulses.default_pulse("sinusoidal", device)


@pytest.fixture(scope="session")
def static_pulse(device):
    """Zero-amplitude pulse: the driven transmon sits at its bias."""
    bias = device.transmons[device.driven].flux_bias
    return pulses.PulseSpec("sinusoidal", bias, 0.0, 30.0, nu=1 / 60.0)


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2
