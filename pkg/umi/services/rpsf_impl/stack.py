from dataclasses import dataclass

import numpy as np
import pandas as pd

from umi.services.exceptions import ContractError, ValidationError
from umi.services.geometry_impl.window import SpatialWindow

from .resolution import resolution

METRIC_COLUMNS = ["x", "y", "z", "delta_rho_3db", "contrast", "alpha_s", "alpha_m", "alpha_n", "beta", "coherence"]


@dataclass(frozen=True)
class WindowMetrics:
    """Focusing-quality figures of one window.

    Attributes:
        resolution: δρ₋₃dB in mm, None when unresolved.
        confocal_intensity: ⟨RPSF⟩(0).
        background_intensity: I_B, mean ⟨RPSF⟩ over the background annulus.
        contrast: I_S / I_B.
        beta: Symmetric share of the annulus energy.
        coherence: Coherence factor, None when no input law was supplied.
    """

    window: SpatialWindow
    resolution: float | None
    confocal_intensity: float
    background_intensity: float
    contrast: float
    beta: float
    alpha_s: float
    alpha_m: float
    alpha_n: float
    coherence: float | None = None

    def as_row(self) -> dict:
        x, y, z = self.window.center
        return {
            "x": x,
            "y": y,
            "z": z,
            "delta_rho_3db": self.resolution,
            "contrast": self.contrast,
            "alpha_s": self.alpha_s,
            "alpha_m": self.alpha_m,
            "alpha_n": self.alpha_n,
            "beta": self.beta,
            "coherence": self.coherence,
        }


@dataclass(frozen=True, eq=False)
class RpsfStack:
    """Per-window ⟨RPSF⟩ maps, shape (K, O_y, O_x), with optional per-window metrics."""

    windows: tuple[SpatialWindow, ...]
    maps: np.ndarray
    pitch: float
    metrics: tuple[WindowMetrics, ...] = ()

    def __post_init__(self) -> None:
        maps = np.asarray(self.maps, dtype=np.float64)
        if maps.ndim != 3 or maps.shape[0] != len(self.windows):
            raise ContractError("RPSF maps must be stacked one per window.", {"shape": maps.shape, "windows": len(self.windows)})
        if np.any(maps < 0):
            raise ValidationError("RPSF maps must be non-negative.")
        if self.metrics and len(self.metrics) != len(self.windows):
            raise ContractError("Metrics must be given for every window.", {"metrics": len(self.metrics), "windows": len(self.windows)})
        maps.setflags(write=False)
        object.__setattr__(self, "maps", maps)

    @property
    def offset_shape(self) -> tuple[int, int]:
        return (int(self.maps.shape[1]), int(self.maps.shape[2]))

    def amplitude(self, index: int) -> np.ndarray:
        return np.sqrt(self.maps[index])

    def resolutions(self) -> list[float | None]:
        return [resolution(self.amplitude(index), self.pitch) for index in range(len(self.windows))]

    def confocal(self) -> np.ndarray:
        return self.maps[:, self.offset_shape[0] // 2, self.offset_shape[1] // 2]

    def with_metrics(self, metrics: list[WindowMetrics]) -> "RpsfStack":
        return RpsfStack(windows=self.windows, maps=self.maps, pitch=self.pitch, metrics=tuple(metrics))

    def to_frame(self) -> pd.DataFrame:
        if self.metrics:
            return pd.DataFrame([metric.as_row() for metric in self.metrics], columns=METRIC_COLUMNS)
        rows = [{"x": w.center[0], "y": w.center[1], "z": w.center[2], "delta_rho_3db": r} for w, r in zip(self.windows, self.resolutions())]
        return pd.DataFrame(rows, columns=["x", "y", "z", "delta_rho_3db"])
