import numpy as np
import pytest

from umi.services.beamformer_impl.focused import FocusedRMatrix
from umi.services.geometry_impl.window import SpatialWindow
from umi.services.rpsf_impl.config import RpsfConfig


@pytest.fixture
def full_window():
    """Covers the whole 9×9×2 grid of ``random_focused``."""
    return SpatialWindow(center=(0.0, 0.0, 13.0), lateral_extent=(10.0, 10.0), axial_extent=4.0)


@pytest.fixture
def near_annulus():
    """Annulus from 0.1 δρ₀ (about 0.33 mm at 13 mm) out to Δρ_max."""
    return RpsfConfig(annulus_inner_factor=0.1, annulus_outer_factor=10.0)


@pytest.fixture
def symmetrize():
    def _symmetrize(focused: FocusedRMatrix) -> FocusedRMatrix:
        return focused.with_blocks((focused.blocks.astype(np.complex128) + focused.transposed().blocks) / 2.0)

    return _symmetrize


@pytest.fixture
def confocal_only(random_focused):
    """Unit confocal entries and nothing else."""
    blocks = np.zeros(random_focused.blocks.shape, dtype=np.complex64)
    k_y, k_x = (s // 2 for s in random_focused.offset_shape)
    blocks[..., k_y, k_x] = 1.0
    return random_focused.with_blocks(blocks)


@pytest.fixture
def off_centre_window():
    """Asymmetric window near the corner of ``random_focused``; its edges fall between midpoints."""
    return SpatialWindow(center=(0.7, -0.4, 13.0), lateral_extent=(3.0, 2.3), axial_extent=4.0)
