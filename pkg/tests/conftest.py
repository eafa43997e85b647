"""
Shared fixtures for the test suite
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from cyclo_slv.constructions import example_two_scale
from cyclo_slv.cyclo import divisor_profile


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def two_scale():
    """A = {0,9,18,27} + {0,4,...,32} in Z_36, |A| = 13"""
    return example_two_scale(2, 3, 2)


@pytest.fixture(scope="session")
def two_scale_profile(two_scale):
    return divisor_profile(two_scale, 13)


@pytest.fixture(autouse=True)
def clean_cyclo_env(monkeypatch):
    """Keep CYCLO_* variables from the caller's environment out of the tests"""
    for name in list(os.environ):
        if name.startswith("CYCLO_"):
            monkeypatch.delenv(name, raising=False)
