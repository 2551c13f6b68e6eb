from ...synth import SCENES, SceneSpec, generate, write_scene
from ..base import SurfacingCommand


class Command(SurfacingCommand):
    help = "Generate a synthetic scene: drawing, cameras with edge maps and ground truth"
    stage = "synth"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--scene",
            choices=SCENES,
            default="box",
            help="The scene to build",
        )
        parser.add_argument(
            "--views",
            type=int,
            default=None,
            help="Number of ring cameras",
        )
        parser.add_argument(
            "--seed",
            type=int,
            default=None,
            help="Seed for defects, noise and clutter",
        )
        parser.add_argument(
            "--params",
            type=str,
            default=None,
            help="JSON file with SceneSpec fields",
        )
        parser.add_argument(
            "--out",
            type=str,
            required=True,
            help="Output directory",
        )

    def run(self, **options):
        data = {}
        if options["params"]:
            data = SceneSpec.from_file(options["params"]).to_dict()
        data["scene"] = options["scene"]
        if options["views"] is not None:
            data["n_views"] = options["views"]
        if options["seed"] is not None:
            data["rng_seed"] = options["seed"]
        spec = SceneSpec.from_dict(data)
        drawing, views, truth = generate(spec)
        write_scene(options["out"], drawing, views, truth, spec)
        return "Wrote %s scene with %d fragments and %d views to %s" % (
            spec.scene, len(drawing), len(views), options["out"])
