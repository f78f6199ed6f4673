import numpy as np
import pytest

from huefuse import crf, hdr, scenes

CRF_EVS = (0.0, -1.0, 1.0, -2.0, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def ramp_scene():
    return scenes.make_scene("ramp_sweep", size=256, seed=1)


@pytest.fixture(scope="session")
def gamma_stack(ramp_scene):
    """5-exposure gamma-2.2 render of the ramp scene (full tonal sweep)."""
    return hdr.synth_stack(ramp_scene, CRF_EVS)


@pytest.fixture(scope="session")
def gamma_table(gamma_stack):
    return crf.estimate_inverse_crf(gamma_stack)
