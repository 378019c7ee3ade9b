import random

import pytest
from hypothesis import settings

from pfl.poly import Polynomial

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

@pytest.fixture
def rng():
    return random.Random(20261019)

def poly(text, nvars, names=None):
    return Polynomial.parse(text, nvars, names)

