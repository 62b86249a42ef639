import numpy as np
import pytest

from gausszeros.models import get_model

PRESET_NAMES = ("bargmann-fock", "sinc-sqrt3", "cauchy")


@pytest.fixture(scope="session")
def bf():
    return get_model("bargmann-fock")


@pytest.fixture(scope="session")
def sinc():
    return get_model("sinc-sqrt3")


@pytest.fixture(scope="session")
def cauchy():
    return get_model("cauchy")


@pytest.fixture(scope="session")
def presets(bf, sinc, cauchy):
    return {"bargmann-fock": bf, "sinc-sqrt3": sinc, "cauchy": cauchy}


@pytest.fixture()
def rng():
    return np.random.default_rng(20260809)
