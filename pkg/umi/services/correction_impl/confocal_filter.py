import logging

import numpy as np

from umi.services.beamformer_impl.focused import FocusedRMatrix
from umi.services.exceptions import ValidationError
from umi.services.geometry_impl.resolution import diffraction_limit

logger = logging.getLogger(__name__)


def filter_widths(focused: FocusedRMatrix, factor: float) -> np.ndarray:
    """l_c(z) = factor · δρ₀(z) for every depth plane of ``focused``."""
    return factor * np.atleast_1d(diffraction_limit(focused.probe, focused.grid.z))


def confocal_filter(focused: FocusedRMatrix, width: float | np.ndarray) -> FocusedRMatrix:
    """Gaussian confocal filter R′ = R · exp(−|ρ_out − ρ_in|² / (2 l_c²)).

    ``width`` is l_c in mm, either one value or one per depth plane. An infinite
    width leaves R unchanged, as does Δρ = 0 for any width.
    """
    widths = np.broadcast_to(np.asarray(width, dtype=np.float64), (focused.grid.nz,))
    if np.any(widths <= 0):
        raise ValidationError("Filter width must be positive.", {"width": widths.tolist()})
    distance_sq = np.sum(focused.offsets**2, axis=1)
    with np.errstate(divide="ignore"):
        weights = np.exp(-distance_sq[np.newaxis, :] / (2.0 * widths[:, np.newaxis] ** 2))
    filtered = focused.flat_blocks * weights[:, np.newaxis, :]
    logger.debug(f"Confocal filter with l_c from {widths.min():.2f} to {widths.max():.2f} mm.")
    return focused.with_blocks(filtered)
