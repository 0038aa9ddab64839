import numpy as np
import pytest

from beamopt import SpaceField, solve_forward

from helpers import canonical_problem


@pytest.fixture(scope="session")
def sine_problem_200():
    return canonical_problem(200, 200)


@pytest.fixture(scope="session")
def sine_state_200(sine_problem_200):
    v = SpaceField.from_callable(sine_problem_200.grid, np.sin)
    return solve_forward(sine_problem_200, v)
