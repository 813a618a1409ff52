import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from umi.services.beamformer_impl.focused import FocusedRMatrix
from umi.services.beamformer_impl.phase_law import Side
from umi.services.correction_impl.basis import CorrectionBasis
from umi.services.correction_impl.correlation import local_correlation
from umi.services.correction_impl.distortion import distortion
from umi.services.exceptions import ContractError
from umi.services.geometry_impl.window import SpatialWindow

from .coherence import coherence_factor
from .config import RpsfConfig
from .local_rpsf import local_rpsf
from .resolution import resolution
from .scattering import window_rates
from .stack import RpsfStack, WindowMetrics

logger = logging.getLogger(__name__)


class RpsfAnalyzer:
    """Local RPSF maps plus resolution, contrast, scattering rates and, given a basis, the coherence factor."""

    def __init__(self, config: RpsfConfig | None = None, basis: CorrectionBasis | None = None) -> None:
        self.config = config or RpsfConfig()
        self.basis = basis

    def analyze(self, focused: FocusedRMatrix, windows: list[SpatialWindow], laws_in: list[np.ndarray] | None = None) -> RpsfStack:
        if laws_in is not None and len(laws_in) != len(windows):
            raise ContractError("One input law per window is needed.", {"laws": len(laws_in), "windows": len(windows)})
        stack = local_rpsf(focused, windows, self.config.min_resolution_cells)
        transposed = focused.transposed()
        matrix = distortion(focused, self.basis, Side.INPUT) if self.basis is not None else None

        def _metrics(index: int) -> WindowMetrics:
            window = windows[index]
            rates = window_rates(focused, transposed, window, self.config)
            coherence = None
            if matrix is not None:
                law = laws_in[index] if laws_in is not None else None
                coherence = coherence_factor(local_correlation(matrix, window, self.config.min_resolution_cells), law)
            return WindowMetrics(
                window=window,
                resolution=resolution(stack.amplitude(index), stack.pitch),
                confocal_intensity=rates.confocal_intensity,
                background_intensity=rates.background_intensity,
                contrast=rates.contrast,
                beta=rates.beta,
                alpha_s=rates.alpha_s,
                alpha_m=rates.alpha_m,
                alpha_n=rates.alpha_n,
                coherence=coherence,
            )

        with ThreadPoolExecutor(max_workers=self.config.max_workers) as pool:
            metrics = list(pool.map(_metrics, range(len(windows))))
        unresolved = sum(metric.resolution is None for metric in metrics)
        if unresolved:
            logger.warning(f"{unresolved} of {len(windows)} windows have no resolvable RPSF peak.")
        logger.info(f"Analyzed {len(windows)} RPSF windows.")
        return stack.with_metrics(metrics)
