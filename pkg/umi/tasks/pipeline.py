"""Celery wrappers around the pipeline commands."""

from celery import shared_task
from django.core.management import call_command


@shared_task
def run_pipeline(config_path: str, out: str | None = None, seed: int | None = None) -> None:
    """Run the run management command on a worker."""
    options: dict[str, object] = {"config": config_path}
    if out is not None:
        options["out"] = out
    if seed is not None:
        options["seed"] = seed
    call_command("run", **options)


@shared_task
def export_run(run_dir: str) -> None:
    """Run the export management command."""
    call_command("export", run_dir)
