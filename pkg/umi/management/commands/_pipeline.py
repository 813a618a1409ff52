"""Shared plumbing of the pipeline commands (``simulate``, ``beamform``, ``rpsf``, ``correct``, ``run``)."""

import logging
from pathlib import Path
from typing import Any

import numba
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from umi.services.exceptions import ConfigurationError, StageError
from umi.services.pipeline_impl.artifacts import RunArtifacts
from umi.services.pipeline_impl.config import PipelineConfig, load_config
from umi.services.pipeline_impl.coordinator import PipelineCoordinator
from umi.services.pipeline_impl.report import RunReport
from umi.services.pipeline_impl.reporter import PipelineReporter

logger = logging.getLogger(__name__)


class PipelineCommand(BaseCommand):
    """Runs ``stages`` of the pipeline configured by ``--config``; ``None`` runs all of them."""

    stages: tuple[str, ...] | None = None

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument("--config", required=True, help="Pipeline configuration file (INI).")
        parser.add_argument("--seed", type=int, help="Override the seed of the [run] section.")
        parser.add_argument(
            "--threads",
            type=int,
            default=None,
            help=f"Worker threads for the numerical kernels. Defaults to UMI_THREADS ({settings.UMI_THREADS}, 0 keeps the numba default).",
        )
        parser.add_argument("--out", help="Output directory. Defaults to UMI_OUTPUT_DIR/<run name>.")

    def handle(self, *args: Any, **options: Any) -> None:
        try:
            # 1. Create Configuration from the file and CLI arguments
            config = self._create_config(options)
            self._set_threads(options.get("threads"))
            output_dir = Path(options.get("out") or Path(settings.UMI_OUTPUT_DIR) / config.run.name)

            # 2. Wire up dependencies
            artifacts = RunArtifacts(output_dir)
            reporter = PipelineReporter(self)

            # 3. Instantiate and run the coordinator
            self.stdout.write(self.style.NOTICE(f"Run '{config.run.name}' (seed {config.run.seed}) writing to {output_dir}"))
            coordinator = PipelineCoordinator(config=config, artifacts=artifacts, reporter=reporter)
            report = self.execute_run(coordinator, config, output_dir)

        except ConfigurationError as e:
            raise CommandError(f"Configuration error: {e}")
        except StageError as e:
            raise CommandError(f"{e}. Artifacts written: {', '.join(e.manifest) or 'none'}")
        except Exception as e:
            logger.exception("An unexpected error occurred during the handle execution.")
            raise CommandError(f"An unexpected error occurred: {e}")

        self.after_run(report)

    def execute_run(self, coordinator: PipelineCoordinator, config: PipelineConfig, output_dir: Path) -> RunReport:
        return coordinator.run(only=self.stages)

    def after_run(self, report: RunReport) -> None:
        self.stdout.write(self.style.SUCCESS("Pipeline command completed successfully."))

    def _create_config(self, options: dict[str, Any]) -> PipelineConfig:
        config = load_config(options["config"])
        seed = options.get("seed")
        return config.with_seed(seed) if seed is not None else config

    def _set_threads(self, threads: int | None) -> None:
        count = settings.UMI_THREADS if threads is None else threads
        if count < 0:
            raise ConfigurationError("--threads must be >= 0.", {"threads": count})
        if count > numba.config.NUMBA_NUM_THREADS:
            raise ConfigurationError(f"--threads must be <= {numba.config.NUMBA_NUM_THREADS}, the size of the numba thread pool.", {"threads": count})
        if count > 0:
            numba.set_num_threads(count)
            logger.info(f"Numerical kernels limited to {count} threads.")
