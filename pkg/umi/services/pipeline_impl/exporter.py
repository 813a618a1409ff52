"""Plot-ready exports of a finished run.

Volumes and RPSF maps are written as little-endian float32 ``.raw`` files,
x fastest, each with a ``.txt`` sidecar giving dimensions, spacing and
origin in mm. Phase laws and metrics are CSV tables.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from umi.services.beamformer_impl.focused_format import read_focused
from umi.services.correction_impl.estimates import TransmissionEstimate
from umi.services.correction_impl.law_format import read_estimates
from umi.services.exceptions import ArtifactError
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.rpsf_impl.rpsf_format import read_metrics, read_rpsf

from .stages import CORRECTED, FOCUSED, LAWS, METRICS_AFTER, METRICS_BEFORE, RPSF_AFTER, RPSF_BEFORE

logger = logging.getLogger(__name__)

EXPORTS = ("confocal", "rpsf", "phase_laws", "metrics")
EXPORT_DIR = "export"
METRICS_COLUMNS = ["z", "delta_rho_3db_before", "delta_rho_3db_after", "contrast_gain_db", "alpha_s", "alpha_m", "alpha_n", "beta", "epsilon"]
LAW_COLUMNS = ["step", "window", "center_x", "center_y", "center_z", "element", "coord_x", "coord_y", "active", "phase_in", "phase_out", "frozen"]


@dataclass
class ExportResult:
    written: list[Path] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)


def _sidecar(path: Path, lines: dict[str, str]) -> Path:
    path.write_text("".join(f"{key} = {value}\n" for key, value in lines.items()), encoding="utf-8")
    return path


def _write_volume(values: np.ndarray, path: Path, lines: dict[str, str]) -> list[Path]:
    np.ascontiguousarray(values, dtype="<f4").tofile(path)
    return [path, _sidecar(path.with_suffix(".txt"), {**lines, "dtype": "float32 little-endian", "order": "x fastest"})]


def _grid_lines(grid: VoxelGrid) -> dict[str, str]:
    depths = " ".join(f"{z:.6g}" for z in grid.z)
    dz = float(np.diff(grid.z).mean()) if grid.nz > 1 else 0.0
    return {
        "dims": f"{grid.nx} {grid.ny} {grid.nz}",
        "spacing_mm": f"{grid.pitch:.6g} {grid.pitch:.6g} {dz:.6g}",
        "origin_mm": f"{grid.x[0]:.6g} {grid.y[0]:.6g} {grid.z[0]:.6g}",
        "depths_mm": depths,
    }


class MapExporter:
    """Writes the exports of one run directory into ``<run_dir>/export`` (or ``out``)."""

    def __init__(self, run_dir: str | Path, out: str | Path | None = None) -> None:
        self.run_dir = Path(run_dir)
        if not self.run_dir.is_dir():
            raise ArtifactError(f"Run directory {self.run_dir} does not exist.", path=str(self.run_dir))
        self.out = Path(out) if out is not None else self.run_dir / EXPORT_DIR
        self.out.mkdir(parents=True, exist_ok=True)

    def _input(self, name: str, result: ExportResult) -> Path | None:
        path = self.run_dir / name
        if path.is_file():
            return path
        logger.warning(f"Export input {name} is missing in {self.run_dir}; skipped.")
        result.missing.append(name)
        return None

    def export(self, what: Iterable[str] = EXPORTS) -> ExportResult:
        selected = list(what)
        unknown = sorted(set(selected) - set(EXPORTS))
        if unknown:
            raise ArtifactError(f"Unknown export kinds: {', '.join(unknown)}.", details={"choices": list(EXPORTS)})
        result = ExportResult()
        for kind in EXPORTS:
            if kind in selected:
                getattr(self, f"export_{kind}")(result)
        logger.info(f"Exported {len(result.written)} files to {self.out}, {len(result.missing)} inputs missing.")
        return result

    def export_confocal(self, result: ExportResult) -> None:
        for name, label in ((FOCUSED, "before"), (CORRECTED, "after")):
            path = self._input(name, result)
            if path is None:
                continue
            volume = read_focused(path).confocal()
            result.written += _write_volume(volume.intensity, self.out / f"confocal_{label}.raw", {"source": name, **_grid_lines(volume.grid)})

    def export_rpsf(self, result: ExportResult) -> None:
        names = [RPSF_BEFORE, RPSF_AFTER] + sorted(path.name for path in self.run_dir.glob("rpsf_step*.ums"))
        for name in names:
            path = self._input(name, result)
            if path is None:
                continue
            stack = read_rpsf(path)
            rows, cols = stack.offset_shape
            lines = {
                "source": name,
                "dims": f"{cols} {rows} {len(stack.windows)}",
                "spacing_mm": f"{stack.pitch:.6g} {stack.pitch:.6g}",
                "origin_mm": f"{-(cols // 2) * stack.pitch:.6g} {-(rows // 2) * stack.pitch:.6g}",
            }
            for index, window in enumerate(stack.windows):
                lines[f"window_{index}"] = " ".join(f"{c:.6g}" for c in window.center)
            result.written += _write_volume(stack.maps, self.out / f"{Path(name).stem}.raw", lines)

    def export_phase_laws(self, result: ExportResult) -> None:
        path = self._input(LAWS, result)
        if path is None:
            return
        target = self.out / "phase_laws.csv"
        law_table(read_estimates(path)).to_csv(target, index=False, float_format="%.6g")
        result.written.append(target)

    def export_metrics(self, result: ExportResult) -> None:
        before_path = self._input(METRICS_BEFORE, result)
        if before_path is None:
            return
        after_path = self.run_dir / METRICS_AFTER
        after = read_metrics(after_path) if after_path.is_file() else None
        laws_path = self.run_dir / LAWS
        estimates = read_estimates(laws_path) if laws_path.is_file() else None
        target = self.out / "metrics.csv"
        metrics_table(read_metrics(before_path), after, estimates).to_csv(target, index=False, float_format="%.6g")
        result.written.append(target)


def law_table(estimates: TransmissionEstimate) -> pd.DataFrame:
    """One row per (window estimate, basis entry); phases in radians, NaN on inactive entries."""
    frames = []
    step_counts: dict[int, int] = {}
    for estimate in estimates.windows:
        index = step_counts.get(estimate.step, 0)
        step_counts[estimate.step] = index + 1
        x, y, z = estimate.window.center
        frames.append(
            pd.DataFrame(
                {
                    "step": estimate.step,
                    "window": index,
                    "center_x": x,
                    "center_y": y,
                    "center_z": z,
                    "element": np.arange(estimates.active.size),
                    "coord_x": estimates.coordinates[:, 0],
                    "coord_y": estimates.coordinates[:, 1],
                    "active": estimates.active,
                    "phase_in": np.where(estimates.active, np.angle(estimate.law_in), np.nan),
                    "phase_out": np.where(estimates.active, np.angle(estimate.law_out), np.nan),
                    "frozen": estimate.frozen,
                }
            )
        )
    if not frames:
        return pd.DataFrame(columns=LAW_COLUMNS)
    return pd.concat(frames, ignore_index=True)[LAW_COLUMNS]


def _by_depth(frame: pd.DataFrame | None, column: str) -> pd.Series:
    if frame is None or column not in frame:
        return pd.Series(dtype=float)
    return frame.groupby("z")[column].mean()


def _epsilon_by_depth(estimates: TransmissionEstimate | None, depths: np.ndarray) -> list[float]:
    if estimates is None or estimates.n_steps == 0:
        return [float("nan")] * len(depths)
    last = estimates.for_step(estimates.n_steps - 1)
    values = []
    for z in depths:
        covering = [e.epsilon for e in last if abs(z - e.window.depth) < e.window.axial_extent / 2]
        values.append(float(np.median(covering)) if covering else float("nan"))
    return values


def metrics_table(before: pd.DataFrame, after: pd.DataFrame | None, estimates: TransmissionEstimate | None) -> pd.DataFrame:
    """Per-depth summary of a run.

    Widths and contrasts are averaged over the windows of each depth; the
    scattering rates describe the corrected image when there is one; ε is the
    median over the last-step windows covering the depth.
    """
    depths = np.sort(before["z"].unique())
    final = after if after is not None else before
    contrast_before = _by_depth(before, "contrast").reindex(depths)
    contrast_after = _by_depth(after, "contrast").reindex(depths)
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = 10.0 * np.log10(contrast_after.to_numpy(dtype=float) / contrast_before.to_numpy(dtype=float))
    table = pd.DataFrame(
        {
            "z": depths,
            "delta_rho_3db_before": _by_depth(before, "delta_rho_3db").reindex(depths).to_numpy(dtype=float),
            "delta_rho_3db_after": _by_depth(after, "delta_rho_3db").reindex(depths).to_numpy(dtype=float),
            "contrast_gain_db": gain,
            "epsilon": _epsilon_by_depth(estimates, depths),
        }
    )
    for column in ("alpha_s", "alpha_m", "alpha_n", "beta"):
        table[column] = _by_depth(final, column).reindex(depths).to_numpy(dtype=float)
    return table[METRICS_COLUMNS]


def export_maps(run_dir: str | Path, what: Iterable[str] = EXPORTS, out: str | Path | None = None) -> ExportResult:
    return MapExporter(run_dir, out).export(what)
