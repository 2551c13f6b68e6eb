import json
from pathlib import Path

from django.core.exceptions import ImproperlyConfigured

from ...curve_graph import load_trimesh
from ...evaluation import STAGES, EvalParams, plot_pr, pr_curve, write_pr_csv
from ...hypothesis import load_hypotheses
from ...pipeline import SURVIVING, stage_members
from ..base import SurfacingCommand


class Command(SurfacingCommand):
    help = "Precision and recall of hypothesis surfaces against a ground-truth mesh"
    stage = "evaluate"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--result",
            type=str,
            required=True,
            help="Hypothesis directory to evaluate",
        )
        parser.add_argument(
            "--gt",
            type=str,
            required=True,
            help="Ground-truth OBJ",
        )
        parser.add_argument(
            "--stages",
            type=str,
            default=None,
            help="Pipeline manifest; evaluates the formed, confirmed and cleaned sets it lists",
        )
        parser.add_argument(
            "--stage",
            choices=STAGES,
            default="confirmed",
            help="Stage label when no manifest is given",
        )
        parser.add_argument(
            "--params",
            type=str,
            default=None,
            help="JSON file with EvalParams fields",
        )
        parser.add_argument(
            "--out",
            type=str,
            required=True,
            help="Output CSV",
        )
        parser.add_argument(
            "--plot",
            type=str,
            default=None,
            help="Optional SVG plot",
        )

    def selections(self, hypotheses, options):
        if not options["stages"]:
            return [(options["stage"], [h for h in hypotheses if h.status in SURVIVING])]
        try:
            manifest = json.loads(Path(options["stages"]).read_text())
        except (OSError, ValueError) as e:
            raise ImproperlyConfigured("cannot read stage manifest: %s" % e)
        by_id = {h.id: h for h in hypotheses}
        members = stage_members(manifest)
        return [(stage, [by_id[i] for i in members[stage] if i in by_id]) for stage in STAGES]

    def run(self, **options):
        params = EvalParams.from_file(options["params"])
        gt = load_trimesh(options["gt"])
        hypotheses = load_hypotheses(options["result"])
        points = []
        for stage, selected in self.selections(hypotheses, options):
            points.extend(pr_curve([h.tri for h in selected], gt, params.taus, params, stage))
        write_pr_csv(points, options["out"])
        if options["plot"]:
            plot_pr(points, options["plot"])
        return "Wrote %d precision-recall points to %s" % (len(points), options["out"])
