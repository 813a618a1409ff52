from dataclasses import dataclass

import numpy as np
import pandas as pd

from umi.services.geometry_impl.window import SpatialWindow

from .basis import CorrectionKind


@dataclass(frozen=True, eq=False)
class WindowEstimate:
    """Input and output laws estimated on one window at one schedule step."""

    step: int
    window: SpatialWindow
    law_in: np.ndarray
    law_out: np.ndarray
    epsilon: float
    scalar_product: float
    iterations_in: int
    iterations_out: int
    converged: bool
    frozen: bool = False

    @property
    def accepted(self) -> bool:
        return not self.frozen


@dataclass(frozen=True, eq=False)
class TransmissionEstimate:
    """All window estimates of a correction run, in schedule order."""

    kind: CorrectionKind
    coordinates: np.ndarray
    active: np.ndarray
    schedule: str
    windows: tuple[WindowEstimate, ...]

    @property
    def n_steps(self) -> int:
        return max((estimate.step for estimate in self.windows), default=-1) + 1

    def for_step(self, step: int) -> list[WindowEstimate]:
        return [estimate for estimate in self.windows if estimate.step == step]

    def median_scalar_product(self, step: int | None = None) -> float:
        chosen = self.windows if step is None else tuple(self.for_step(step))
        values = [estimate.scalar_product for estimate in chosen if not estimate.frozen]
        return float(np.median(values)) if values else float("nan")

    def to_frame(self) -> pd.DataFrame:
        """One row per window: step, center, extents, ε, scalar product, iterations, flags."""
        return pd.DataFrame(
            [
                {
                    "step": e.step,
                    "x": e.window.center[0],
                    "y": e.window.center[1],
                    "z": e.window.center[2],
                    "w_rho": e.window.lateral_extent[0],
                    "w_z": e.window.axial_extent,
                    "epsilon": e.epsilon,
                    "scalar_product": e.scalar_product,
                    "iterations_in": e.iterations_in,
                    "iterations_out": e.iterations_out,
                    "converged": e.converged,
                    "frozen": e.frozen,
                }
                for e in self.windows
            ]
        )
