import numpy as np
import pytest

from climbsim.dynamics import BODIES, RobotParams, calibrate_thrust
from climbsim.terrain import TerrainParams, generate_patch


@pytest.fixture(scope="session")
def mars_robot():
    """Vehicle with the thruster sized for the Mars hop datum."""
    return calibrate_thrust(BODIES["mars"], RobotParams())


@pytest.fixture(scope="session")
def rough_patch():
    """Small fractal patch at microspine scale, shared across tests."""
    params = TerrainParams(
        fractal_dim=2.5,
        roughness_amp=3.0e-4,
        sample_length=1.0e-3,
        freq_scale=1.5,
        ridge_count=10,
        max_freq_index=11,
        phase_seed=11,
    )
    return generate_patch(params, 64 * 8.0e-5, 8.0e-5)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
