from ...curve_graph import load_cameras, load_drawing
from ...hypothesis import load_hypotheses, save_hypotheses
from ...occlusion import OcclusionParams, save_records, verify, write_overlays
from ..base import SurfacingCommand


class Command(SurfacingCommand):
    help = "Confirm or reject hypotheses by the image evidence along the curves they occlude"
    stage = "verify"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--hyps",
            type=str,
            required=True,
            help="Directory written by the hypothesize command",
        )
        parser.add_argument(
            "--drawing",
            type=str,
            required=True,
            help="Drawing JSON the hypotheses were formed from",
        )
        parser.add_argument(
            "--cameras",
            type=str,
            required=True,
            help="Cameras JSON with edge maps",
        )
        parser.add_argument(
            "--out",
            type=str,
            required=True,
            help="Output directory for the classified hypotheses",
        )
        parser.add_argument(
            "--records",
            type=str,
            default=None,
            help="JSON file for the occlusion records, defaults to OUT/records.json",
        )
        parser.add_argument(
            "--params",
            type=str,
            default=None,
            help="JSON file with OcclusionParams fields",
        )
        parser.add_argument(
            "--overlay-svg",
            type=str,
            default=None,
            help="Directory for one SVG overlay per view",
        )

    def run(self, **options):
        params = OcclusionParams.from_file(options["params"])
        hypotheses = load_hypotheses(options["hyps"])
        drawing = load_drawing(options["drawing"])
        views = load_cameras(options["cameras"])
        updated, records = verify(hypotheses, drawing, views, params, threads=self.threads(options))
        save_hypotheses(updated, options["out"])
        save_records(records, options["records"] or "%s/records.json" % options["out"].rstrip("/"))
        if options["overlay_svg"]:
            write_overlays(options["overlay_svg"], updated, records, drawing, views, params)
        return "Verified %d hypotheses with %d occlusion records" % (len(hypotheses), len(records))
