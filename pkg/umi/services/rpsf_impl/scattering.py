"""Single, multiple and noise contributions to the local RPSF.

Far from the confocal peak the RPSF is a flat background I_B. Its symmetric
share β = ⟨|R_sym|²⟩ / ⟨|R|²⟩ with R_sym = (R + Rᵀ)/2 separates reciprocal
multiple scattering from electronic noise. Independent noise keeps half of
its energy in the symmetric part, so the calibrated split attributes
max(0, 2β − 1) of the background to multiple scattering.
"""

import logging
from dataclasses import dataclass

import numpy as np

from umi.services.beamformer_impl.focused import FocusedRMatrix
from umi.services.exceptions import ContractError
from umi.services.geometry_impl.resolution import diffraction_limit
from umi.services.geometry_impl.window import SpatialWindow

from .config import RpsfConfig
from .local_rpsf import average_intensity, check_window, window_entries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScatteringRates:
    beta: float
    alpha_s: float
    alpha_m: float
    alpha_n: float
    contrast: float
    confocal_intensity: float
    background_intensity: float


def annulus_mask(focused: FocusedRMatrix, depth: float, config: RpsfConfig) -> np.ndarray:
    """(N_off,) mask of offsets inside the background annulus at ``depth``."""
    cell = diffraction_limit(focused.probe, depth)
    inner = config.annulus_inner_factor * cell
    outer = min(focused.max_offset, config.annulus_outer_factor * cell)
    radius = np.hypot(focused.offsets[:, 0], focused.offsets[:, 1])
    mask = (radius > inner) & (radius <= outer + 1e-9)
    if not mask.any():
        raise ContractError(
            f"Offsets reach {focused.max_offset:g} mm; the background annulus starts at {inner:.2f} mm.",
            {"max_offset": focused.max_offset, "inner": inner, "depth": depth},
        )
    return mask


def symmetry_degree(blocks: np.ndarray, mirrored: np.ndarray, region: np.ndarray) -> float:
    """β over the entries selected by ``region``; 1 when they carry no energy."""
    direct = blocks[region]
    energy = float(np.sum(np.abs(direct) ** 2))
    if energy == 0:
        return 1.0
    return float(np.sum(np.abs((direct + mirrored[region]) / 2.0) ** 2) / energy)


def split_background(confocal: float, background: float, beta: float, calibrated: bool = True) -> tuple[float, float, float]:
    """(α_S, α_M, α_N) from the confocal and background intensities; the three sum to one."""
    share = min(background / confocal, 1.0) if confocal > 0 else 1.0
    alpha_m = (max(0.0, 2.0 * beta - 1.0) if calibrated else beta) * share
    return (1.0 - share, alpha_m, share - alpha_m)


def window_rates(focused: FocusedRMatrix, transposed: FocusedRMatrix, window: SpatialWindow, config: RpsfConfig) -> ScatteringRates:
    check_window(focused, window, config.min_resolution_cells)
    annulus = annulus_mask(focused, window.depth, config)
    blocks, valid = window_entries(focused, window)
    mirrored, _ = window_entries(transposed, window)

    rpsf = average_intensity(blocks, valid)
    confocal = float(rpsf[focused.center_offset])
    covered = annulus & valid.any(axis=0)
    if not covered.any():
        raise ContractError("No stored entry of the window falls inside the background annulus.", {"center": window.center})
    background = float(rpsf[covered].mean())
    beta = symmetry_degree(blocks, mirrored, valid & annulus[np.newaxis])
    alpha_s, alpha_m, alpha_n = split_background(confocal, background, beta, config.calibrated)
    single = max(confocal - background, 0.0)
    contrast = single / background if background > 0 else float("inf")
    return ScatteringRates(
        beta=beta,
        alpha_s=alpha_s,
        alpha_m=alpha_m,
        alpha_n=alpha_n,
        contrast=contrast,
        confocal_intensity=confocal,
        background_intensity=background,
    )


def scattering_rates(focused: FocusedRMatrix, windows: list[SpatialWindow], config: RpsfConfig | None = None) -> list[ScatteringRates]:
    config = config or RpsfConfig()
    transposed = focused.transposed()
    rates = [window_rates(focused, transposed, window, config) for window in windows]
    for window, rate in zip(windows, rates):
        logger.debug(f"Window at {window.center}: beta={rate.beta:.3f}, alpha_s={rate.alpha_s:.3f}, alpha_m={rate.alpha_m:.3f}.")
    return rates
