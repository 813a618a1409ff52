import logging
from pathlib import Path

from django.core.management.base import CommandError

from umi.services.exceptions import StageError
from umi.services.pipeline_impl.config import PipelineConfig
from umi.services.pipeline_impl.coordinator import PipelineCoordinator
from umi.services.pipeline_impl.recorder import RunRecorder
from umi.services.pipeline_impl.report import RunReport

from ._pipeline import PipelineCommand

logger = logging.getLogger(__name__)

CHECKS_FAILED_EXIT_CODE = 3


class Command(PipelineCommand):
    """Full pipeline run; exits with code 3 when a configured acceptance check fails."""

    help = "Runs simulate, beamform, rpsf, correct and the configured acceptance checks."

    def execute_run(self, coordinator: PipelineCoordinator, config: PipelineConfig, output_dir: Path) -> RunReport:
        recorder = RunRecorder()
        record = recorder.start(config, output_dir)
        try:
            report = coordinator.run()
        except Exception as e:
            recorder.finish(record, None, failed_stage=e.stage if isinstance(e, StageError) else None)
            raise
        recorder.finish(record, report)
        return report

    def after_run(self, report: RunReport) -> None:
        if report.failed_checks:
            raise CommandError(f"Acceptance checks failed: {', '.join(report.failed_checks)}", returncode=CHECKS_FAILED_EXIT_CODE)
        self.stdout.write(self.style.SUCCESS("Pipeline run completed successfully."))
