from .pipeline import export_run, run_pipeline

__all__ = (
    "run_pipeline",
    "export_run",
)
