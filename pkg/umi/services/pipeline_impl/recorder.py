import logging
from pathlib import Path

from django.conf import settings
from django.db import DatabaseError

from umi.models import PipelineRun

from .config import PipelineConfig
from .report import RunReport

logger = logging.getLogger(__name__)


class RunRecorder:
    """Keeps a ``PipelineRun`` row in step with a run; database failures never reach the caller."""

    def __init__(self, enabled: bool | None = None) -> None:
        self.enabled = bool(getattr(settings, "UMI_RECORD_RUNS", True)) if enabled is None else enabled

    def start(self, config: PipelineConfig, output_dir: str | Path) -> PipelineRun | None:
        if not self.enabled:
            return None
        try:
            return PipelineRun.objects.create(
                config_name=config.run.name,
                seed=config.run.seed,
                output_dir=str(output_dir),
                status=PipelineRun.Status.RUNNING,
            )
        except DatabaseError as e:
            logger.error(f"Could not record the start of run '{config.run.name}': {e}")
            return None

    def finish(self, run: PipelineRun | None, report: RunReport | None, failed_stage: str | None = None) -> None:
        if run is None:
            return
        if report is not None:
            run.stage_timings = dict(report.timings)
            run.check_results = {name: result.passed for name, result in report.checks.items()}
            run.all_checks_passed = report.all_passed if report.checks else None
        run.failed_stage = failed_stage or ""
        failed = failed_stage is not None or report is None or not report.all_passed
        run.mark_finished(PipelineRun.Status.FAILED if failed else PipelineRun.Status.SUCCEEDED)
        try:
            run.save()
        except DatabaseError as e:
            logger.error(f"Could not record the end of run {run.pk}: {e}")
