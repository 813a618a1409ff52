"""Local averages of the reflection point spread function.

For a window W the averaged RPSF is the de-scanned mean of
|R(ρ − Δρ/2, ρ + Δρ/2, z)|² over the midpoints (ρ, z) inside W, for every
stored offset Δρ. Entries whose output point leaves the grid do not enter the
mean. On reciprocal data the map is even for any window.
"""

import logging

import numpy as np

from umi.services.beamformer_impl.focused import FocusedRMatrix
from umi.services.exceptions import WindowError
from umi.services.geometry_impl.window import SpatialWindow

from .stack import RpsfStack

logger = logging.getLogger(__name__)

MIN_RESOLUTION_CELLS = 4.0


def check_window(focused: FocusedRMatrix, window: SpatialWindow, min_cells: float = MIN_RESOLUTION_CELLS) -> float:
    cells = window.resolution_cells(focused.probe)
    if cells < min_cells:
        raise WindowError(f"Window covers {cells:.1f} resolution cells; at least {min_cells:g} are needed.", {"center": window.center, "resolution_cells": cells})
    return cells


def window_entries(focused: FocusedRMatrix, window: SpatialWindow) -> tuple[np.ndarray, np.ndarray]:
    """Blocks (n_rows, N_off) of the rows with a midpoint inside ``window``, and the mask of those entries."""
    grid = focused.grid
    depths = np.flatnonzero(window.depth_mask(grid))
    midpoints = grid.lateral_points()[:, np.newaxis, :] + focused.offsets[np.newaxis, :, :] / 2.0
    inside = window.contains_lateral(midpoints[..., 0], midpoints[..., 1]) & focused.valid_mask.reshape(grid.n_lateral, -1)
    rows = np.flatnonzero(inside.any(axis=1))
    if rows.size == 0 or depths.size == 0:
        raise WindowError("Window contains no voxel of the grid.", {"center": window.center})
    blocks = focused.flat_blocks[depths][:, rows].reshape(-1, focused.n_offsets).astype(np.complex128)
    valid = np.tile(inside[rows], (depths.size, 1))
    return blocks, valid


def average_intensity(blocks: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Mean |R|² per offset over the valid entries; zero where no entry is valid."""
    counts = valid.sum(axis=0)
    sums = np.sum(np.where(valid, np.abs(blocks) ** 2, 0.0), axis=0)
    return np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)


def mean_rpsf(focused: FocusedRMatrix, window: SpatialWindow, min_cells: float = MIN_RESOLUTION_CELLS) -> np.ndarray:
    """⟨RPSF⟩(Δρ) of one window on the (O_y, O_x) offset grid."""
    check_window(focused, window, min_cells)
    blocks, valid = window_entries(focused, window)
    return average_intensity(blocks, valid).reshape(focused.offset_shape)


def local_rpsf(focused: FocusedRMatrix, windows: list[SpatialWindow], min_cells: float = MIN_RESOLUTION_CELLS) -> RpsfStack:
    if not windows:
        raise WindowError("At least one window is needed.")
    maps = np.stack([mean_rpsf(focused, window, min_cells) for window in windows])
    logger.info(f"Averaged RPSF over {len(windows)} windows, offset grid {focused.offset_shape}.")
    return RpsfStack(windows=tuple(windows), maps=maps, pitch=focused.grid.pitch)
