import numpy as np
import pytest

from cotlift.base_geometry import ManifoldSpec, flat2, halfplane2, sphere2


@pytest.fixture
def flat():
    return flat2()


@pytest.fixture
def sphere():
    return sphere2()


@pytest.fixture
def halfplane():
    return halfplane2()


@pytest.fixture(params=["flat2", "sphere2", "halfplane2"])
def catalog_manifold(request):
    return {"flat2": flat2, "sphere2": sphere2, "halfplane2": halfplane2}[request.param]()


def user_manifold() -> ManifoldSpec:
    """The user-style stretched plane, g = diag(1 + x^2, 1) on [-1, 1]^2."""
    return ManifoldSpec.build(
        "stretched",
        ("x", "y"),
        {(0, 0): "1 + x^2", (1, 1): "1"},
        domain={"x": (-1.0, 1.0), "y": (-1.0, 1.0)},
    )


@pytest.fixture(name="user_manifold")
def user_manifold_fixture():
    return user_manifold()


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, 2718281828]))
