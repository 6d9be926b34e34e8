import numpy as np
import pytest

from graspscore import with_surface_samples
from graspscore.primitives import (
    make_box,
    make_cylinder,
    make_icosphere,
    make_l_prism,
    make_plate,
)


@pytest.fixture(scope="session")
def cube():
    return with_surface_samples(make_box((0.04, 0.04, 0.04)), seed=0)


@pytest.fixture(scope="session")
def icosphere():
    return with_surface_samples(make_icosphere(0.03, 3), seed=0)


@pytest.fixture(scope="session")
def cylinder():
    return with_surface_samples(make_cylinder(0.02, 0.06, 48), seed=0)


@pytest.fixture(scope="session")
def l_prism():
    return with_surface_samples(make_l_prism(0.02), seed=0)


@pytest.fixture(scope="session")
def plate():
    return with_surface_samples(make_plate((0.06, 0.04, 0.004)), seed=0)


@pytest.fixture(scope="session")
def desk_meshes(cube, icosphere, cylinder, l_prism, plate):
    return {
        "cube": cube,
        "icosphere": icosphere,
        "cylinder": cylinder,
        "l_prism": l_prism,
        "plate": plate,
    }


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform-ish random rotation from QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
