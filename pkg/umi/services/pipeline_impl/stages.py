"""The pipeline stages.

Each stage reads its inputs from the in-memory run state, falling back to the
artifacts an earlier invocation left in the output directory, so any stage
can be re-run on its own.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from umi.services.acquisition_impl.raw import ReflectionMatrixRaw
from umi.services.acquisition_impl.raw_format import read_raw, write_raw
from umi.services.acquisition_impl.screen import PhaseScreen
from umi.services.acquisition_impl.simulator import inject_raw_background, simulate
from umi.services.beamformer_impl.beamformer import Beamformer
from umi.services.beamformer_impl.focused import FocusedRMatrix
from umi.services.beamformer_impl.focused_format import read_focused, write_focused
from umi.services.correction_impl.basis import CorrectionBasis
from umi.services.correction_impl.estimates import TransmissionEstimate
from umi.services.correction_impl.law_format import read_estimates, write_estimates
from umi.services.correction_impl.multiscale import MultiscaleCorrector
from umi.services.exceptions import ArtifactError
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.probe import ProbeModel
from umi.services.rpsf_impl.analyzer import RpsfAnalyzer
from umi.services.rpsf_impl.local_rpsf import local_rpsf
from umi.services.rpsf_impl.rpsf_format import write_metrics, write_rpsf
from umi.services.rpsf_impl.stack import RpsfStack

from .artifacts import RunArtifacts
from .builders import (
    build_beamform_config,
    build_correction_config,
    build_grid,
    build_illumination,
    build_medium,
    build_probe,
    build_rpsf_config,
    build_schedule,
    build_screen,
    build_windows,
)
from .config import PipelineConfig
from .report import RunReport, StepRecord
from .seeding import stage_rng

logger = logging.getLogger(__name__)

STAGES = ("simulate", "beamform", "rpsf_before", "correct", "rpsf_after", "checks")

RAW = "raw.umr"
FOCUSED = "focused.umf"
CORRECTED = "corrected.umf"
LAWS = "laws.umt"
RPSF_BEFORE = "rpsf_before.ums"
RPSF_AFTER = "rpsf_after.ums"
METRICS_BEFORE = "metrics_before.tsv"
METRICS_AFTER = "metrics_after.tsv"


def step_map_name(step: int) -> str:
    return f"rpsf_step{step}.ums"


@dataclass
class RunState:
    raw: ReflectionMatrixRaw | None = None
    focused: FocusedRMatrix | None = None
    corrected: FocusedRMatrix | None = None
    estimates: TransmissionEstimate | None = None
    before: RpsfStack | None = None
    after: RpsfStack | None = None


class PipelineStages:
    """Stage implementations bound to one configuration and output directory."""

    def __init__(self, config: PipelineConfig, artifacts: RunArtifacts) -> None:
        self.config = config
        self.artifacts = artifacts
        self.state = RunState()

    @property
    def seed(self) -> int:
        return self.config.run.seed

    @cached_property
    def probe(self) -> ProbeModel:
        return build_probe(self.config.probe)

    @cached_property
    def screen(self) -> PhaseScreen | None:
        return build_screen(self.config.screen, self.probe, stage_rng(self.seed, "screen"))

    @cached_property
    def grid(self) -> VoxelGrid:
        return build_grid(self.config.grid)

    def _require(self, name: str) -> Path:
        path = self.artifacts.existing(name)
        if path is None:
            raise ArtifactError(f"Missing input artifact {name}; run the earlier stages first.", path=str(self.artifacts.path(name)))
        return path

    def raw(self) -> ReflectionMatrixRaw:
        if self.state.raw is None:
            self.state.raw = read_raw(self._require(RAW))
        return self.state.raw

    def focused(self) -> FocusedRMatrix:
        if self.state.focused is None:
            self.state.focused = read_focused(self._require(FOCUSED))
        return self.state.focused

    def corrected(self) -> FocusedRMatrix:
        if self.state.corrected is None:
            self.state.corrected = read_focused(self._require(CORRECTED))
        return self.state.corrected

    def estimates(self) -> TransmissionEstimate:
        if self.state.estimates is None:
            self.state.estimates = read_estimates(self._require(LAWS))
        return self.state.estimates

    def correction_basis(self, focused: FocusedRMatrix) -> CorrectionBasis:
        return CorrectionBasis.build(self.config.correction_kind, focused.probe, focused.grid)

    def skip_reason(self, stage: str) -> str | None:
        if stage in ("correct", "rpsf_after") and not self.config.correction.enabled:
            return "correction disabled"
        if stage == "rpsf_after" and self.state.corrected is None and self.artifacts.existing(CORRECTED) is None:
            return f"no {CORRECTED}"
        if stage == "checks" and not self.config.checks.enabled:
            return "no check configured"
        return None

    # --- stages ---

    def simulate(self, report: RunReport) -> None:
        medium = self.config.medium
        basis = build_illumination(self.config.acquisition, self.probe)
        raw = simulate(build_medium(medium, self.config.run.name), self.screen, self.probe, basis, noise_power=medium.noise_power, rng=stage_rng(self.seed, "simulate"))
        if medium.background_power > 0:
            raw = inject_raw_background(raw, medium.background_power, stage_rng(self.seed, "background"))
        self.state.raw = raw
        report.sizes["raw_bytes"] = int(raw.signals.nbytes)
        report.sizes["inputs"] = raw.n_inputs
        report.sizes["samples"] = raw.n_samples
        self.artifacts.record(write_raw(raw, self.artifacts.path(RAW)))

    def beamform(self, report: RunReport) -> None:
        focused = Beamformer(build_beamform_config(self.config)).beamform(self.raw(), self.grid)
        self.state.focused = focused
        report.sizes["voxels"] = focused.grid.n_lateral * focused.grid.nz
        report.sizes["offsets"] = focused.n_offsets
        report.sizes["focused_bytes"] = int(focused.blocks.nbytes)
        self.artifacts.record(write_focused(focused, self.artifacts.path(FOCUSED)))

    def analyze(self, focused: FocusedRMatrix) -> RpsfStack:
        windows = build_windows(self.config.rpsf, focused.grid)
        if not self.config.rpsf.scattering:
            return local_rpsf(focused, windows)
        analyzer = RpsfAnalyzer(build_rpsf_config(self.config.rpsf), basis=self.correction_basis(focused))
        return analyzer.analyze(focused, windows)

    def _write_stack(self, stack: RpsfStack, maps: str, metrics: str) -> None:
        self.artifacts.record(write_rpsf(stack, self.artifacts.path(maps)))
        self.artifacts.record(write_metrics(stack, self.artifacts.path(metrics)))

    def rpsf_before(self, report: RunReport) -> None:
        stack = self.analyze(self.focused())
        self.state.before = stack
        report.add_metrics("before", stack.to_frame())
        self._write_stack(stack, RPSF_BEFORE, METRICS_BEFORE)

    def correct(self, report: RunReport) -> None:
        focused = self.focused()
        schedule = build_schedule(self.config)
        corrector = MultiscaleCorrector(self.correction_basis(focused), build_correction_config(self.config))
        windows = build_windows(self.config.rpsf, focused.grid)
        maps: dict[int, str] = {}

        def _observe(step: int, current: FocusedRMatrix) -> None:
            name = step_map_name(step)
            self.artifacts.record(write_rpsf(local_rpsf(current, windows), self.artifacts.path(name)))
            maps[step] = name

        if self.config.correction.direct:
            result = corrector.direct_correct(focused, schedule)
            labels = [schedule.last.label]
        else:
            result = corrector.correct(focused, schedule, observer=_observe)
            labels = [step.label for step in schedule.steps]

        self.state.corrected = result.focused
        self.state.estimates = result.estimates
        for step in range(result.estimates.n_steps):
            report.steps.append(
                StepRecord(
                    step=step,
                    label=labels[step],
                    windows=len(result.estimates.for_step(step)),
                    median_scalar_product=result.estimates.median_scalar_product(step),
                    rpsf_map=maps.get(step, ""),
                )
            )
        self.artifacts.record(write_focused(result.focused, self.artifacts.path(CORRECTED)))
        self.artifacts.record(write_estimates(result.estimates, self.artifacts.path(LAWS)))

    def rpsf_after(self, report: RunReport) -> None:
        stack = self.analyze(self.corrected())
        self.state.after = stack
        report.add_metrics("after", stack.to_frame())
        self._write_stack(stack, RPSF_AFTER, METRICS_AFTER)
