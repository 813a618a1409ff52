import logging
import time
from collections.abc import Sequence

from umi.services.exceptions import StageError

from .artifacts import REPORT_NAME, TIMINGS_NAME, RunArtifacts
from .checks import CHECKS, CheckContext
from .config import PipelineConfig
from .report import RunReport
from .reporter import PipelineReporter
from .stages import STAGES, PipelineStages

logger = logging.getLogger(__name__)


class PipelineCoordinator:
    """Runs the stages of a pipeline in order and writes the run report."""

    def __init__(self, config: PipelineConfig, artifacts: RunArtifacts, reporter: PipelineReporter, stages: PipelineStages | None = None):
        self.config = config
        self.artifacts = artifacts
        self.reporter = reporter
        self.stages = stages or PipelineStages(config, artifacts)
        logger.info(f"Coordinator initialized for run '{config.run.name}' (seed {config.run.seed}) in {artifacts.root}")

    def run(self, only: Sequence[str] | None = None) -> RunReport:
        """Executes the selected stages (all of them by default).

        The full run writes report.json and timings.json; every invocation
        writes the manifest, also when a stage fails.

        Raises:
            StageError: A stage raised; the manifest lists what was written before.
        """
        selected = [stage for stage in STAGES if only is None or stage in only]
        report = RunReport(name=self.config.run.name, seed=self.config.run.seed)
        logger.info(f"Starting pipeline run: {', '.join(selected)}")
        try:
            for stage in selected:
                self._run_stage(stage, report)
            if only is None:
                self.artifacts.write_json(REPORT_NAME, report.to_dict())
                self.artifacts.write_json(TIMINGS_NAME, report.timings)
            return report
        finally:
            self.artifacts.write_manifest()
            self.reporter.print_summary(report)
            logger.info("Pipeline run finished.")

    def _run_stage(self, stage: str, report: RunReport) -> None:
        reason = self.stages.skip_reason(stage)
        if reason:
            logger.info(f"Skipping stage '{stage}': {reason}")
            self.reporter.stage_skipped(stage, reason)
            return

        self.reporter.stage_started(stage)
        started = time.perf_counter()
        try:
            if stage == "checks":
                self._run_checks(report)
            else:
                getattr(self.stages, stage)(report)
        except Exception as e:
            logger.exception(f"Stage '{stage}' failed: {e}")
            self.reporter.stage_failed(stage, e)
            raise StageError(stage, str(e), manifest=list(self.artifacts.manifest)) from e
        report.timings[stage] = time.perf_counter() - started
        self.reporter.stage_finished(stage, report.timings[stage])

    def _run_checks(self, report: RunReport) -> None:
        context = CheckContext(config=self.config, stages=self.stages, report=report)
        for name in self.config.checks.enabled:
            result = CHECKS[name](context)
            report.checks[name] = result
            self.reporter.check_result(result)
            logger.info(f"Check {name}: {'skipped' if result.skipped else 'passed' if result.passed else 'failed'}")
