import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import pulseforge as pf
from pulseforge.training import resolve_target

settings.register_profile(
    "ci", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")

#: Frozen calibration anchors for the signed-modulus squashing map:
#: (raw signed modulus, expected effective signed modulus), 5e-4 absolute.
MODULUS_PAIRS = [
    (3.280, 0.9275),
    (-1.167, -0.5254),
    (0.2154, 0.1073),
    (1.070, 0.4888),
    (2.606, 0.8625),
    (1.204, 0.5384),
    (2.601, 0.8618),
    (2.977, 0.9031),
    (1.987, 0.7589),
    (2.491, 0.8470),
]


@pytest.fixture(scope="session")
def device():
    return pf.DeviceModel()


@pytest.fixture(scope="session")
def modulus_pairs():
    return MODULUS_PAIRS


@pytest.fixture(scope="session")
def acceptance_runs(device):
    """X, SX, H and the composite rotation trained for 200 epochs, with wall times."""
    jobs = [("X", "X", []), ("SX", "SX", []), ("H", "H", []), ("3ROT", "3ROT", [np.pi / 4])]
    runs = {}
    for name, reg, angles in jobs:
        target, used = resolve_target(reg, angles)
        start = time.perf_counter()
        run = pf.train(target, pf.TrainerConfig(epochs=200), device, gate_name=name, angles=used)
        runs[name] = (run, time.perf_counter() - start)
    return runs


@pytest.fixture(scope="session")
def suite_runs(device):
    """The full ten-gate suite at 200 epochs (the z-heavy gates need >100)."""
    return pf.train_suite(device, pf.TrainerConfig(epochs=200))
