import logging
from dataclasses import dataclass

import numpy as np

from umi.services.exceptions import ValidationError

from .grid import VoxelGrid
from .probe import ProbeModel
from .resolution import axial_resolution, diffraction_limit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpatialWindow:
    """Box W(r − r_p): |x − x_p| < w_x/2, |y − y_p| < w_y/2, |z − z_p| < w_z/2 (mm)."""

    center: tuple[float, float, float]
    lateral_extent: tuple[float, float]
    axial_extent: float

    def __post_init__(self) -> None:
        if min(self.lateral_extent) <= 0 or self.axial_extent <= 0:
            raise ValidationError("Window extents must be positive.", {"lateral": self.lateral_extent, "axial": self.axial_extent})

    @property
    def depth(self) -> float:
        return self.center[2]

    def contains(self, x: np.ndarray | float, y: np.ndarray | float, z: np.ndarray | float) -> np.ndarray:
        """Boolean mask of points strictly inside the window (broadcasts)."""
        xc, yc, zc = self.center
        return (np.abs(np.asarray(x) - xc) < self.lateral_extent[0] / 2) & (np.abs(np.asarray(y) - yc) < self.lateral_extent[1] / 2) & (np.abs(np.asarray(z) - zc) < self.axial_extent / 2)

    def contains_lateral(self, x: np.ndarray | float, y: np.ndarray | float) -> np.ndarray:
        xc, yc, _ = self.center
        return (np.abs(np.asarray(x) - xc) < self.lateral_extent[0] / 2) & (np.abs(np.asarray(y) - yc) < self.lateral_extent[1] / 2)

    def lateral_mask(self, grid: VoxelGrid) -> np.ndarray:
        """(ny, nx) mask of lateral grid points inside the window."""
        grid_y, grid_x = np.meshgrid(grid.y, grid.x, indexing="ij")
        return self.contains_lateral(grid_x, grid_y)

    def depth_mask(self, grid: VoxelGrid) -> np.ndarray:
        return np.abs(grid.z - self.center[2]) < self.axial_extent / 2

    def resolution_cells(self, probe: ProbeModel) -> float:
        """N_W = (w_x w_y w_z) / (δρ₀² δz₀), δρ₀ taken at the window depth."""
        cell = diffraction_limit(probe, self.depth)
        volume = self.lateral_extent[0] * self.lateral_extent[1] * self.axial_extent
        return float(volume / (cell**2 * axial_resolution(probe)))


def count_cells(window: SpatialWindow, probe: ProbeModel, samples_per_cell: int = 8) -> float:
    """Brute-force N_W: sum sample volumes over a lattice finer than one cell, with δρ₀ taken at each sample depth."""
    cell_z = axial_resolution(probe)

    def _midpoints(center: float, extent: float, step: float) -> np.ndarray:
        count = max(int(np.ceil(extent / step)), 1)
        return center - extent / 2 + (np.arange(count) + 0.5) * extent / count

    reference = float(diffraction_limit(probe, window.depth))
    xs = _midpoints(window.center[0], window.lateral_extent[0], reference / samples_per_cell)
    ys = _midpoints(window.center[1], window.lateral_extent[1], reference / samples_per_cell)
    zs = _midpoints(window.center[2], window.axial_extent, cell_z / samples_per_cell)
    sample_volume = (window.lateral_extent[0] / xs.size) * (window.lateral_extent[1] / ys.size) * (window.axial_extent / zs.size)
    cells_per_sample = sample_volume / (np.asarray(diffraction_limit(probe, zs)) ** 2 * cell_z)
    return float(xs.size * ys.size * cells_per_sample.sum())


def _centers(low: float, high: float, width: float, count: int) -> np.ndarray:
    if count == 1 or high <= low:
        return np.array([(low + high) / 2.0])
    half = min(width, high - low) / 2.0
    return np.linspace(low + half, high - half, count)


def _depth_centers(z: np.ndarray, axial_width: float, overlap: float) -> np.ndarray:
    low, high = float(z[0]), float(z[-1])
    if high - low <= axial_width:
        return np.array([(low + high) / 2.0])
    step = axial_width * (1.0 - overlap)
    first, last = low + axial_width / 2.0, high - axial_width / 2.0
    count = int(np.floor((last - first) / step + 1e-9)) + 1
    # Spread any leftover evenly so the first and last windows touch the field edges.
    return np.linspace(first, last, count) if count > 1 else np.array([first])


def layout_windows(grid: VoxelGrid, patches: int, lateral_width: float, axial_width: float, overlap: float = 0.5) -> list[SpatialWindow]:
    """Tile the field of view with patches × patches lateral windows per depth slab.

    Depth slabs of thickness ``axial_width`` overlap by ``overlap``. A planar
    grid (single x) gets one window across x.
    """
    if patches < 1 or lateral_width <= 0 or axial_width <= 0:
        raise ValidationError("Window layout needs patches >= 1 and positive widths.", {"patches": patches, "lateral_width": lateral_width, "axial_width": axial_width})
    if not 0 <= overlap < 1:
        raise ValidationError("Window overlap must lie in [0, 1).", {"overlap": overlap})

    x_centers = _centers(float(grid.x[0]), float(grid.x[-1]), lateral_width, 1 if grid.is_planar else patches)
    y_centers = _centers(float(grid.y[0]), float(grid.y[-1]), lateral_width, patches)
    z_centers = _depth_centers(grid.z, axial_width, overlap)

    windows = [SpatialWindow(center=(float(xc), float(yc), float(zc)), lateral_extent=(lateral_width, lateral_width), axial_extent=axial_width) for zc in z_centers for yc in y_centers for xc in x_centers]
    logger.info(f"Window layout {patches}x{patches}, w={lateral_width:.2f} mm, w_z={axial_width:.2f} mm: {len(windows)} windows.")
    return windows
