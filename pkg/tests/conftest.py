"""Shared fixtures: canonical scenes and grids used across the suite."""

import numpy as np
import pytest

from seglab import Grid2D, SceneDescription
from seglab.scene import Circle, Diamond


@pytest.fixture(scope="session")
def circle_scene() -> SceneDescription:
    """One disk, radius 0.15, centered; the standard convergence-study scene."""
    return SceneDescription(shapes=(Circle((0.5, 0.5), 0.15),), f_p=2.0, f_e=1.0)


@pytest.fixture(scope="session")
def empty_scene() -> SceneDescription:
    return SceneDescription(shapes=(), f_p=2.0, f_e=1.0)


@pytest.fixture(scope="session")
def five_obstacle_scene() -> SceneDescription:
    """Diamond core plus four satellite disks; deep shadow pockets.

    This is the frozen map for the policy-ordering experiment: the pockets
    behind the diamond's faces are what separates the blend controller from
    the pure distance controller.
    """
    return SceneDescription(
        shapes=(
            Diamond((0.5, 0.5), (0.16, 0.16)),
            Circle((0.24, 0.24), 0.09),
            Circle((0.76, 0.24), 0.09),
            Circle((0.24, 0.76), 0.09),
            Circle((0.76, 0.76), 0.09),
        ),
        f_p=2.0,
        f_e=1.0,
    )


@pytest.fixture(scope="session")
def grid16() -> Grid2D:
    return Grid2D(16)


@pytest.fixture(scope="session")
def grid32() -> Grid2D:
    return Grid2D(32)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(2024)
