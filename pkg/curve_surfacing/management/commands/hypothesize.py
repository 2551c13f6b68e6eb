from ...curve_graph import load_cameras, load_drawing
from ...hypothesis import HypothesisParams, form_hypotheses, save_hypotheses
from ...loft import LoftParams
from ..base import SurfacingCommand


class Command(SurfacingCommand):
    help = "Form surface hypotheses from pairs of proximate curves and closed curves"
    stage = "hypothesize"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--drawing",
            type=str,
            required=True,
            help="Reorganized drawing JSON",
        )
        parser.add_argument(
            "--cameras",
            type=str,
            required=True,
            help="Cameras JSON",
        )
        parser.add_argument(
            "--out",
            type=str,
            required=True,
            help="Output directory for hypothesis OBJs and the manifest",
        )
        parser.add_argument(
            "--params",
            type=str,
            default=None,
            help="JSON file with HypothesisParams fields",
        )
        parser.add_argument(
            "--loft-params",
            type=str,
            default=None,
            help="JSON file with LoftParams fields",
        )

    def run(self, **options):
        params = HypothesisParams.from_file(options["params"])
        loft_params = LoftParams.from_file(options["loft_params"])
        drawing = load_drawing(options["drawing"])
        views = load_cameras(options["cameras"])
        hypotheses = form_hypotheses(drawing, views, params, loft_params, self.threads(options))
        save_hypotheses(hypotheses, options["out"])
        return "Formed %d hypotheses" % len(hypotheses)
