import logging
from typing import Any

from django.core.management.base import BaseCommand, CommandError

from umi.services.exceptions import ArtifactError
from umi.services.pipeline_impl.exporter import EXPORTS, MapExporter

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Exports confocal volumes, RPSF maps, phase laws and metrics of a finished run."

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument("run_dir", help="Output directory of a previous run.")
        parser.add_argument("--what", nargs="*", choices=EXPORTS, default=list(EXPORTS), help=f"What to export. Defaults to: {', '.join(EXPORTS)}")
        parser.add_argument("--out", help="Export directory. Defaults to <run_dir>/export.")

    def handle(self, *args: Any, **options: Any) -> None:
        try:
            exporter = MapExporter(options["run_dir"], options.get("out"))
            result = exporter.export(options["what"])
        except ArtifactError as e:
            raise CommandError(f"Export error: {e}")
        except Exception as e:
            logger.exception("An unexpected error occurred during the handle execution.")
            raise CommandError(f"An unexpected error occurred: {e}")

        for path in result.written:
            self.stdout.write(f"  wrote {path}")
        for name in result.missing:
            self.stdout.write(self.style.WARNING(f"  missing {name}"))
        self.stdout.write(self.style.SUCCESS(f"Exported {len(result.written)} files to {exporter.out}."))
