import numpy as np
import pytest

from src.config import settings
from src.correlations import PresetLibrary, SettingsGrid
from src.geometry import E_X, E_Z, UnitVector3
from src.solvers import LPBackendFactory


@pytest.fixture(autouse=True)
def restore_settings():
    """Tests may override tolerances or the backend; put the globals back afterwards"""
    tolerances, backend = settings.tolerances, settings.lp_backend
    yield
    settings.tolerances, settings.lp_backend = tolerances, backend
    LPBackendFactory.reset()


@pytest.fixture
def presets() -> PresetLibrary:
    return PresetLibrary()


@pytest.fixture
def generic_grid() -> SettingsGrid:
    return SettingsGrid(
        (E_X, E_Z),
        (UnitVector3.from_components(1, 0, 1), UnitVector3.from_components(1, 0, -1)),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(settings.default_seed)
