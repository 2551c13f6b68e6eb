from django.core.management.base import CommandError

from ...exceptions import StageError
from ...pipeline import EXIT_OK, PipelineConfig, run_pipeline
from ..base import EXIT_CONFIG, SurfacingCommand


class Command(SurfacingCommand):
    help = "Run the whole surfacing pipeline from a JSON config"
    stage = "pipeline"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--config",
            type=str,
            required=True,
            help="Pipeline config JSON",
        )
        parser.add_argument(
            "--overlay-svg",
            action="store_true",
            help="Write per-view occlusion overlays",
        )

    def run(self, **options):
        config = PipelineConfig.from_file(options["config"])
        if options["overlay_svg"]:
            config.overlay_svg = True
        result = run_pipeline(config, options.get("threads"))
        if isinstance(result.error, StageError):
            raise result.error
        if result.exit_code != EXIT_OK:
            raise CommandError("configuration error: %s" % result.error, returncode=EXIT_CONFIG)
        return "Pipeline finished, artifacts in %s" % result.directory
