import random

import pytest

from selmerlab.curve_family import FamilyWindow, enumerate_window


@pytest.fixture(scope="session")
def e60():
    return list(enumerate_window(FamilyWindow(60)))


@pytest.fixture(scope="session")
def e60_sample(e60):
    return random.Random(11).sample(e60, 120)
