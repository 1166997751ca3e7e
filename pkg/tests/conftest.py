import numpy as np
import pytest

from efimov_lab import gallery
from efimov_lab.connection import SurfaceConnectionData


@pytest.fixture(scope="session")
def euclid():
    return gallery.euclidean3()


@pytest.fixture(scope="session")
def saddle_data():
    case = gallery.build_example("saddle")
    return case.data


@pytest.fixture(scope="session")
def sphere2_data():
    case = gallery.build_example("sphere2")
    return case.data


@pytest.fixture(scope="session")
def clifford_data():
    case = gallery.build_example("clifford_torus")
    return case.data


@pytest.fixture(scope="session")
def slice_data():
    case = gallery.build_example("hyperbolic_slice", **{"lambda": 1.0})
    return case.data


@pytest.fixture(scope="session")
def slice_data_half():
    case = gallery.build_example("hyperbolic_slice", **{"lambda": 0.5})
    return case.data


@pytest.fixture(scope="session")
def abstract_sphere():
    return gallery.abstract_sphere()


@pytest.fixture(scope="session")
def abstract_plane():
    return gallery.abstract_plane()


@pytest.fixture(scope="session")
def hyperbolic_abstract():
    return gallery.hyperbolic_deformed(0.0)
