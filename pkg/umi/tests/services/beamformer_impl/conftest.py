import pytest

from umi.services.acquisition_impl.medium import MediumDescription, PointScatterer
from umi.services.acquisition_impl.simulator import simulate
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.illumination import IlluminationBasis, plane_wave_grid


@pytest.fixture
def point_medium():
    return MediumDescription(scatterers=(PointScatterer(position=(0.0, 0.0, 10.0)),), name="point")


@pytest.fixture
def point_grid():
    """13×13 lateral points around the axis, one plane on each side of z = 10 mm."""
    return VoxelGrid.regular((-3.0, 3.0), (-3.0, 3.0), [9.5, 10.0, 10.5], 0.5)


@pytest.fixture
def transducer_raw(point_medium, small_probe):
    return simulate(point_medium, None, small_probe, IlluminationBasis.transducer())


@pytest.fixture
def plane_wave_raw(point_medium, small_probe):
    return simulate(point_medium, None, small_probe, plane_wave_grid(small_probe))

