import numpy as np
import pytest

from beamwarp import (
    MooneyRivlin,
    NeoHooke,
    SaintVenantKirchhoff,
    SectionQuadrature,
    unit_square_patch,
)


@pytest.fixture(scope="session")
def svk():
    return SaintVenantKirchhoff(121.0, 80.0)


@pytest.fixture(scope="session")
def neo_hooke():
    return NeoHooke(40.0, 174.34)


@pytest.fixture(scope="session")
def mooney_rivlin():
    return MooneyRivlin(30.0, 10.0, 174.34)


@pytest.fixture(scope="session")
def all_materials(svk, neo_hooke, mooney_rivlin):
    return {"svk": svk, "neo_hooke": neo_hooke, "mooney_rivlin": mooney_rivlin}


@pytest.fixture(scope="session")
def square_quad():
    """Default validation mesh: unit square, degree 3, 5x5 elements."""
    return SectionQuadrature.from_patch(unit_square_patch(3, 5))


@pytest.fixture(scope="session")
def small_quad():
    """Reduced mesh for finite-difference sweeps: degree 2, 2x2 elements."""
    return SectionQuadrature.from_patch(unit_square_patch(2, 2))


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
