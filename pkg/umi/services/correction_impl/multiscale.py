"""Multi-scale aberration correction of a focused reflection matrix.

Each schedule step tiles the field with smaller windows. Within a step the
output laws are estimated and compensated first, then the input laws on the
output-corrected matrix; the input/output scalar product of each window then
decides whether the window is kept or frozen for the rest of the schedule.
Steps run sequentially, windows of a step in parallel.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from umi.services.beamformer_impl.focused import FocusedRMatrix
from umi.services.beamformer_impl.phase_law import Side, apply_phase_law
from umi.services.geometry_impl.window import SpatialWindow

from .basis import CorrectionBasis
from .config import CorrectionConfig
from .confocal_filter import confocal_filter, filter_widths
from .correlation import local_correlation
from .distortion import DistortionMatrix, distortion
from .estimates import TransmissionEstimate, WindowEstimate
from .ipr import IprResult, iterative_phase_reversal
from .laws import LawField
from .reciprocity import reciprocity_score
from .schedule import Schedule

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CorrectionResult:
    focused: FocusedRMatrix
    estimates: TransmissionEstimate
    law_in: LawField
    law_out: LawField


class WindowLawEstimator:
    """Local correlation followed by phase reversal on one window."""

    def __init__(self, config: CorrectionConfig) -> None:
        self.config = config

    def estimate(self, matrix: DistortionMatrix, window: SpatialWindow) -> IprResult:
        correlation = local_correlation(matrix, window, self.config.min_resolution_cells)
        return iterative_phase_reversal(
            correlation,
            tolerance=self.config.tolerance,
            max_iterations=self.config.max_iterations,
            anchor_index=matrix.basis.anchor_index,
        )


def _contains(frozen: list[SpatialWindow], window: SpatialWindow) -> bool:
    return any(bool(region.contains(*window.center)) for region in frozen)


class MultiscaleCorrector:
    def __init__(self, basis: CorrectionBasis, config: CorrectionConfig | None = None, estimator: WindowLawEstimator | None = None) -> None:
        self.basis = basis
        self.config = config or CorrectionConfig(basis=basis.kind)
        self.estimator = estimator or WindowLawEstimator(self.config)

    def _estimation_copy(self, focused: FocusedRMatrix) -> FocusedRMatrix:
        if not self.config.use_filter:
            return focused
        return confocal_filter(focused, filter_widths(focused, self.config.filter_width_factor))

    def _estimate_side(self, focused: FocusedRMatrix, side: Side, windows: list[SpatialWindow]) -> list[IprResult]:
        matrix = distortion(self._estimation_copy(focused), self.basis, side)
        with ThreadPoolExecutor(max_workers=self.config.max_workers) as pool:
            return list(pool.map(lambda window: self.estimator.estimate(matrix, window), windows))

    def _field(self, windows: list[SpatialWindow], laws: list[np.ndarray]) -> LawField:
        return LawField.blend(self.basis, windows, laws) if windows else LawField.flat(self.basis)

    def correct(self, focused: FocusedRMatrix, schedule: Schedule, observer: Callable[[int, FocusedRMatrix], None] | None = None) -> CorrectionResult:
        """Run every step of ``schedule`` and return the corrected matrix with all estimates.

        ``observer`` is called with the step index and the matrix corrected so far after each step.
        """
        self.basis.check_compatible(focused.grid, focused.probe)
        flat_law = np.ones(self.basis.size, dtype=np.complex128)
        current = focused
        total_in = LawField.flat(self.basis)
        total_out = LawField.flat(self.basis)
        frozen: list[SpatialWindow] = []
        records: list[WindowEstimate] = []

        for index, windows in enumerate(schedule.windows(focused.grid)):
            step = schedule.steps[index]
            live = [window for window in windows if not _contains(frozen, window)]
            logger.info(f"Step {index + 1}/{len(schedule.steps)} ({step.label}): {len(live)} of {len(windows)} windows to estimate.")
            if not live:
                if observer is not None:
                    observer(index, current)
                continue

            outputs = self._estimate_side(current, Side.OUTPUT, live)
            field_out = self._field(live, [result.law for result in outputs])
            half_corrected = apply_phase_law(current, field_out, self.basis, Side.OUTPUT)
            inputs = self._estimate_side(half_corrected, Side.INPUT, live)

            laws_in, laws_out, newly_frozen = [], [], []
            for window, result_in, result_out in zip(live, inputs, outputs):
                score = reciprocity_score(result_in.law, result_out.law, self.basis)
                rejected = score.scalar_product < self.config.min_scalar_product
                if rejected:
                    newly_frozen.append(window)
                    logger.info(f"Window at {tuple(round(c, 2) for c in window.center)} stops: scalar product {score.scalar_product:.3f}.")
                laws_in.append(flat_law if rejected else result_in.law)
                laws_out.append(flat_law if rejected else result_out.law)
                records.append(
                    WindowEstimate(
                        step=index,
                        window=window,
                        law_in=result_in.law,
                        law_out=result_out.law,
                        epsilon=score.epsilon,
                        scalar_product=score.scalar_product,
                        iterations_in=result_in.iterations,
                        iterations_out=result_out.iterations,
                        converged=result_in.converged and result_out.converged,
                        frozen=rejected,
                    )
                )

            # Frozen areas keep a flat law in this and every later step.
            blend_windows = live + [w for w in windows if _contains(frozen, w)]
            flat_extra = [flat_law] * (len(blend_windows) - len(live))
            field_out = self._field(blend_windows, laws_out + flat_extra)
            field_in = self._field(blend_windows, laws_in + flat_extra)
            if newly_frozen or len(blend_windows) != len(live):
                half_corrected = apply_phase_law(current, field_out, self.basis, Side.OUTPUT)
            current = apply_phase_law(half_corrected, field_in, self.basis, Side.INPUT)
            total_out = total_out.compose(field_out)
            total_in = total_in.compose(field_in)
            frozen.extend(newly_frozen)
            if observer is not None:
                observer(index, current)

        estimates = TransmissionEstimate(kind=self.basis.kind, coordinates=self.basis.coordinates, active=self.basis.active, schedule=str(schedule), windows=tuple(records))
        logger.info(f"Correction finished: {len(records)} window estimates, median scalar product {estimates.median_scalar_product():.3f}.")
        return CorrectionResult(focused=current, estimates=estimates, law_in=total_in, law_out=total_out)

    def direct_correct(self, focused: FocusedRMatrix, schedule: Schedule) -> CorrectionResult:
        """Single-step correction on the smallest windows of ``schedule``."""
        return self.correct(focused, Schedule(name=f"{schedule.name}-direct", steps=(schedule.last,)))


def multiscale_correct(focused: FocusedRMatrix, schedule: Schedule, basis: CorrectionBasis, config: CorrectionConfig | None = None) -> CorrectionResult:
    return MultiscaleCorrector(basis, config).correct(focused, schedule)
