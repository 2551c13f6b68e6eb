from django.core.management.base import CommandError

from ...curve_graph import load_drawing
from ...loft import PAIRINGS, PARALLEL, LoftParams, loft_closed, loft_pair, save_loft
from ..base import SurfacingCommand


class Command(SurfacingCommand):
    help = "Loft a surface patch over one closed curve or between two open curves"
    stage = "loft"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--curves",
            type=str,
            required=True,
            help="Drawing JSON holding one closed fragment or two open fragments",
        )
        parser.add_argument(
            "--pairing",
            choices=PAIRINGS,
            default=PARALLEL,
            help="How the second curve is oriented against the first",
        )
        parser.add_argument(
            "--params",
            type=str,
            default=None,
            help="JSON file with LoftParams fields",
        )
        parser.add_argument(
            "--out",
            type=str,
            required=True,
            help="Output OBJ; the measurements go to a .json next to it",
        )

    def run(self, **options):
        params = LoftParams.from_file(options["params"])
        fragments = load_drawing(options["curves"]).fragments
        if len(fragments) == 1 and fragments[0].closed:
            result = loft_closed(fragments[0], params)
        elif len(fragments) == 2:
            result = loft_pair(fragments[0], fragments[1], options["pairing"], params)
        else:
            raise CommandError("expected one closed fragment or two open fragments, got %d" % len(fragments))
        obj, sidecar = save_loft(result, options["out"])
        return "Wrote %d quads to %s (mean |K| %.4g, degenerate %s)" % (
            len(result.mesh.faces), obj, result.mean_abs_K, result.degenerate)
