import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pelemma import LtiSystem, counterexample_system  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture
def chain():
    """Two-state nilpotent chain with full state output and one input."""
    return counterexample_system()


@pytest.fixture
def static_identity():
    return LtiSystem(np.zeros((0, 0)), np.zeros((0, 2)), np.zeros((2, 0)), np.eye(2))
