"""Shared fixtures. The default world and a few instances are expensive
enough to build once per session."""

import pytest

from seatbench.generator import generate_instance
from seatbench.world import load_world


@pytest.fixture(scope="session")
def world():
    return load_world()


@pytest.fixture(scope="session")
def small_instance(world):
    # Template A, 4 seats: cheap enough for exhaustive checks.
    return generate_instance(3, world, 42)


@pytest.fixture(scope="session")
def medium_instance(world):
    # Template C, 6 seats.
    return generate_instance(35, world, 42)


@pytest.fixture(scope="session")
def large_instance(world):
    # Template E, 13 seats across two rooms.
    return generate_instance(65, world, 42)


@pytest.fixture(scope="session")
def instances_per_template(world):
    return [generate_instance(level, world, 7) for level in (3, 20, 35, 50, 65)]
