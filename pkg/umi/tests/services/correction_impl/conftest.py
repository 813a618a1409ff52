import numpy as np
import pytest

from umi.services.acquisition_impl.medium import MediumDescription, PointScatterer
from umi.services.acquisition_impl.screen import random_screen
from umi.services.acquisition_impl.simulator import simulate
from umi.services.beamformer_impl.beamformer import beamform
from umi.services.correction_impl.basis import CorrectionBasis
from umi.services.correction_impl.correlation import CorrelationMatrix
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.illumination import IlluminationBasis
from umi.services.geometry_impl.probe import desk_probe
from umi.services.geometry_impl.window import SpatialWindow

TARGET = (0.0, 0.0, 6.0)


@pytest.fixture(scope="module")
def aberrated_point():
    """Point target at 6 mm behind a 1.5 rad screen on the probe face, beamformed on a 17×17 plane with Δρ_max = 4 mm."""
    probe = desk_probe(4)
    screen = random_screen(probe, rms=1.5, correlation_length=1.5, rng=np.random.default_rng(5))
    medium = MediumDescription(scatterers=(PointScatterer(position=TARGET),))
    raw = simulate(medium, screen, probe, IlluminationBasis.transducer())
    grid = VoxelGrid.regular((-4.0, 4.0), (-4.0, 4.0), [TARGET[2]], 0.5)
    return beamform(raw, grid, max_offset=4.0), screen


@pytest.fixture
def target_window():
    return SpatialWindow(center=TARGET, lateral_extent=(8.0, 8.0), axial_extent=1.0)


@pytest.fixture
def make_correlation():
    def _make(values: np.ndarray, active: np.ndarray | None = None) -> CorrelationMatrix:
        size = values.shape[0]
        return CorrelationMatrix(
            window=SpatialWindow(center=(0.0, 0.0, 10.0), lateral_extent=(4.0, 4.0), axial_extent=3.0),
            values=values,
            active=np.ones(size, dtype=bool) if active is None else active,
            n_samples=100,
            resolution_cells=25.0,
        )

    return _make


@pytest.fixture
def random_law(rng):
    def _law(size: int) -> np.ndarray:
        return np.exp(1j * rng.uniform(-np.pi, np.pi, size))

    return _law


@pytest.fixture
def field_basis(small_probe):
    return CorrectionBasis.transducer(small_probe, VoxelGrid.regular((-2.0, 2.0), (-2.0, 2.0), [10.0, 12.0], 0.5))
