from django.core.management.base import BaseCommand

from .report import CheckResult, RunReport


class PipelineReporter:
    """Handles progress output for the pipeline commands."""

    def __init__(self, command: BaseCommand):
        self.command = command
        self.failed_stage: str | None = None

    def stage_started(self, stage: str) -> None:
        self.command.stdout.write(self.command.style.NOTICE(f"[{stage}] started"))

    def stage_finished(self, stage: str, seconds: float) -> None:
        self.command.stdout.write(self.command.style.SUCCESS(f"[{stage}] done in {seconds:.2f} s"))

    def stage_skipped(self, stage: str, reason: str) -> None:
        self.command.stdout.write(self.command.style.WARNING(f"[{stage}] skipped: {reason}"))

    def stage_failed(self, stage: str, error: Exception) -> None:
        self.command.stderr.write(self.command.style.ERROR(f"[{stage}] failed: {error}"))
        self.failed_stage = stage

    def check_result(self, result: CheckResult) -> None:
        value = "" if result.value is None else f" value={result.value:.4g}"
        if result.skipped:
            self.command.stdout.write(self.command.style.WARNING(f"check {result.name}: skipped{value}"))
        elif result.passed:
            self.command.stdout.write(self.command.style.SUCCESS(f"check {result.name}: passed{value} ({result.threshold})"))
        else:
            self.command.stderr.write(self.command.style.ERROR(f"check {result.name}: FAILED{value} ({result.threshold})"))

    def print_summary(self, report: RunReport | None) -> None:
        """Prints the final execution summary."""
        self.command.stdout.write(self.command.style.NOTICE("--------------------\n"))
        self.command.stdout.write(self.command.style.NOTICE("Pipeline run finished."))
        if report is None or self.failed_stage:
            self.command.stderr.write(self.command.style.ERROR(f"Run aborted in stage '{self.failed_stage}'."))
            return

        total = sum(report.timings.values())
        self.command.stdout.write(f"Run '{report.name}' (seed {report.seed}): {len(report.timings)} stages in {total:.2f} s")
        for step in report.steps:
            self.command.stdout.write(f"  step {step.step} {step.label}: {step.windows} windows, median scalar product {step.median_scalar_product:.3f}")

        if report.failed_checks:
            self.command.stderr.write(self.command.style.ERROR(f"Failed checks: {', '.join(report.failed_checks)}"))
        elif report.checks:
            self.command.stdout.write(self.command.style.SUCCESS("All configured checks passed."))
