import os

import numpy as np
import pytest
from hypothesis import settings

from lie.rootdata import build_root_system

settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

ALL_TYPES = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "F4", "G2"]
RANK_TWO_TYPES = ["A2", "B2", "C2", "G2"]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=["A1", "A2"])
def small_rs(request):
    return build_root_system(request.param)
