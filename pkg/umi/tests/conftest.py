import numpy as np
import pytest

from umi.services.beamformer_impl.focused import FocusedRMatrix
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.probe import desk_probe, matrix_probe


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_probe():
    """3×3 probe with an element at the origin."""
    return matrix_probe(3, 3)


@pytest.fixture
def small_probe():
    return desk_probe(4)


@pytest.fixture
def random_focused(small_probe, rng):
    """Focused matrix with random coefficients on a 9×9 grid, Δρ_max = 1 mm."""
    grid = VoxelGrid.regular((-2.0, 2.0), (-2.0, 2.0), [12.0, 14.0], 0.5)
    template = FocusedRMatrix.zeros(grid, 1.0, small_probe)
    draws = rng.standard_normal((*template.blocks.shape, 2))
    return template.with_blocks(draws[..., 0] + 1j * draws[..., 1])
