import json
from pathlib import Path

from ...curve_graph import load_drawing, save_drawing
from ...reorg import ReorgParams, reorganize_with_report
from ..base import SurfacingCommand


class Command(SurfacingCommand):
    help = "Reorganize a 3D curve drawing: smooth, merge, bridge, deduplicate, break and prune"
    stage = "reorg"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--in",
            dest="input",
            type=str,
            required=True,
            help="Input drawing JSON",
        )
        parser.add_argument(
            "--out",
            type=str,
            required=True,
            help="Output drawing JSON",
        )
        parser.add_argument(
            "--params",
            type=str,
            default=None,
            help="JSON file with ReorgParams fields",
        )
        parser.add_argument(
            "--report",
            type=str,
            default=None,
            help="Optional JSON file for the operation counts",
        )

    def run(self, **options):
        params = ReorgParams.from_file(options["params"])
        drawing = load_drawing(options["input"])
        drawing.validate()
        result, report = reorganize_with_report(drawing, params, self.threads(options))
        save_drawing(result, options["out"])
        if options["report"]:
            Path(options["report"]).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        return "Reorganized %d fragments into %d" % (len(drawing), len(result))
