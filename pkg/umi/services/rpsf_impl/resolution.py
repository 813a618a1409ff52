import logging

import numpy as np
from scipy import ndimage

from umi.services.exceptions import ContractError

logger = logging.getLogger(__name__)


def _touches_edge(region: np.ndarray) -> bool:
    touches = False
    if region.shape[0] > 1:
        touches |= bool(region[0].any() or region[-1].any())
    if region.shape[1] > 1:
        touches |= bool(region[:, 0].any() or region[:, -1].any())
    return touches


def resolution(amplitude: np.ndarray, pitch: float) -> float | None:
    """δρ₋₃dB = √(A/π) with A the area where the RPSF amplitude stays above half its Δρ = 0 value.

    Only the region connected to Δρ = 0 counts. Returns None when that region
    reaches the edge of the map, i.e. the background never drops below half
    maximum. On a single-row map (planar grid) the half width is returned.
    """
    values = np.asarray(amplitude, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] % 2 == 0 or values.shape[1] % 2 == 0:
        raise ContractError("RPSF map must be 2-D with odd sides centred on zero offset.", {"shape": values.shape})
    center = (values.shape[0] // 2, values.shape[1] // 2)
    peak = values[center]
    if peak <= 0:
        return None

    labels, _ = ndimage.label(values >= peak / 2.0)
    region = labels == labels[center]
    if _touches_edge(region):
        return None
    count = int(region.sum())
    if 1 in values.shape:
        return count * pitch / 2.0
    return float(np.sqrt(count * pitch**2 / np.pi))
