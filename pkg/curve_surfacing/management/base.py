import logging

from django.core.exceptions import ImproperlyConfigured
from django.core.management.base import BaseCommand, CommandError

from ..exceptions import DrawingParseError, DrawingValidationError, StageError, SurfacingError
from ..settings import surfacing_settings


EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_FAILURE = 4


class SurfacingCommand(BaseCommand):
    """
    Base for the pipeline stage commands.

    Subclasses implement ``run(**options)``; library errors become a
    :class:`CommandError` carrying a nonzero exit code.
    """
    stage = None

    def add_arguments(self, parser):
        parser.add_argument(
            "--threads",
            type=int,
            default=None,
            help="Worker threads, defaults to the THREADS setting",
        )

    def threads(self, options):
        threads = options.get("threads")
        return surfacing_settings.THREADS if threads is None else threads

    def quiet(self, options):
        return options.get("verbosity", 1) < 1

    def run(self, **options):
        raise NotImplementedError("subclasses must implement run()")

    def handle(self, *args, **options):
        if self.quiet(options):
            logging.getLogger("curve_surfacing").setLevel(logging.WARNING)
        try:
            message = self.run(**options)
        except ImproperlyConfigured as e:
            raise CommandError("configuration error: %s" % e, returncode=EXIT_CONFIG)
        except (DrawingParseError, DrawingValidationError, FileNotFoundError) as e:
            raise CommandError("invalid input: %s" % e, returncode=EXIT_INPUT)
        except StageError as e:
            raise CommandError("stage %s failed: %s" % (e.stage, e), returncode=e.exit_code)
        except SurfacingError as e:
            raise CommandError("%s failed: %s" % (self.stage or "command", e), returncode=EXIT_FAILURE)
        if message:
            self.stdout.write(self.style.SUCCESS(message))
