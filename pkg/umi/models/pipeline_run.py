from django.db import models
from django.db.models import JSONField
from django.utils import timezone
from django.utils.translation import gettext_lazy as _


class PipelineRun(models.Model):
    """Bookkeeping row for one ``umi run`` invocation."""

    class Status(models.TextChoices):
        PENDING = "PENDING", _("Pending")
        RUNNING = "RUNNING", _("Running")
        SUCCEEDED = "SUCCEEDED", _("Succeeded")
        FAILED = "FAILED", _("Failed")

    config_name = models.CharField(_("Configuration"), max_length=100, db_index=True)
    seed = models.BigIntegerField(_("Seed"))
    output_dir = models.CharField(_("Output Directory"), max_length=500)
    status = models.CharField(
        max_length=10,
        choices=Status.choices,
        default=Status.PENDING,
        db_index=True,
        help_text=_("The current status of the run."),
    )
    failed_stage = models.CharField(_("Failed Stage"), max_length=30, blank=True, default="")
    all_checks_passed = models.BooleanField(
        _("All Checks Passed"),
        null=True,
        blank=True,
        help_text=_("Unset until the checks stage has run."),
    )
    check_results = JSONField(_("Check Results"), default=dict, blank=True)
    stage_timings = JSONField(_("Stage Timings"), default=dict, blank=True, help_text=_("Seconds per stage."))
    created_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        verbose_name = _("Pipeline Run")
        verbose_name_plural = _("Pipeline Runs")
        ordering = ["-created_at"]

    def mark_finished(self, status: "PipelineRun.Status") -> None:
        self.status = status
        self.finished_at = timezone.now()

    def __str__(self) -> str:
        return f"{self.config_name} (seed {self.seed}): {self.status}"
