"""
End-to-end surfacing run: reorganize, hypothesize, verify, clean up and evaluate.

Artifacts land in one directory::

    01_reorg/      reorganized drawing and report
    02_hyps/       formed hypotheses
    03_verified/   hypotheses after occlusion reasoning, records.json
    04_final/      hypotheses after hidden-surface and redundancy cleanup
    eval/          pr.csv and pr.svg when ground truth is given
    manifest.json  configuration, stage summaries and status histories
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from django.core.exceptions import ImproperlyConfigured

from .curve_graph import load_cameras, load_drawing, load_trimesh, save_drawing
from .evaluation import EvalParams, plot_pr, pr_curve, write_pr_csv
from .exceptions import StageError, SurfacingError
from .hypothesis import CONFIRMED, UNVERIFIABLE, HypothesisParams, form_hypotheses, save_hypotheses
from .log import JSONLineFormatter
from .loft import LoftParams
from .occlusion import (
    OcclusionParams, dedup_hypotheses, drop_fully_hidden, occlusion_assumption_fraction, save_records, verify,
    write_overlays,
)
from .reorg import ReorgParams, reorganize_with_report
from .signals import hypothesis_status_changed, stage_completed


log = logging.getLogger("curve_surfacing")

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REORG = 3
EXIT_HYPOTHESIZE = 4
EXIT_VERIFY = 5
EXIT_CLEANUP = 6
EXIT_EVALUATE = 7

STAGE_EXIT_CODES = {
    "reorg": EXIT_REORG,
    "hypothesize": EXIT_HYPOTHESIZE,
    "verify": EXIT_VERIFY,
    "cleanup": EXIT_CLEANUP,
    "evaluate": EXIT_EVALUATE,
}

STAGE_DIRECTORIES = {
    "reorg": "01_reorg",
    "hypothesize": "02_hyps",
    "verify": "03_verified",
    "cleanup": "04_final",
    "evaluate": "eval",
}

SURVIVING = (CONFIRMED, UNVERIFIABLE)


@dataclass
class PipelineConfig:
    drawing: Path
    cameras: Path
    out: Path
    gt: Path = None
    reorg: ReorgParams = None
    hypothesis: HypothesisParams = None
    loft: LoftParams = None
    occlusion: OcclusionParams = None
    evaluation: EvalParams = None
    threads: int = 1
    overlay_svg: bool = False
    schema: int = SCHEMA_VERSION

    def __post_init__(self):
        for name in ("drawing", "cameras", "out", "gt"):
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, Path(value))
        self.reorg = self.reorg or ReorgParams.from_settings()
        self.hypothesis = self.hypothesis or HypothesisParams.from_settings()
        self.loft = self.loft or LoftParams.from_settings()
        self.occlusion = self.occlusion or OcclusionParams.from_settings()
        self.evaluation = self.evaluation or EvalParams.from_settings()

    @classmethod
    def from_dict(cls, data, base=None):
        """
        Build from a parsed config file; relative paths resolve against ``base``.
        """
        if data.get("schema") != SCHEMA_VERSION:
            raise ImproperlyConfigured("pipeline config schema must be %d" % SCHEMA_VERSION)
        paths = data.get("paths", {})
        missing = [key for key in ("drawing", "cameras", "out") if key not in paths]
        if missing:
            raise ImproperlyConfigured("pipeline config is missing paths: %s" % ", ".join(missing))

        def resolve(value):
            if value is None:
                return None
            path = Path(value)
            return path if path.is_absolute() or base is None else Path(base) / path

        return cls(
            drawing=resolve(paths["drawing"]),
            cameras=resolve(paths["cameras"]),
            out=resolve(paths["out"]),
            gt=resolve(paths.get("gt")),
            reorg=ReorgParams.from_dict(data.get("reorg", {})),
            hypothesis=HypothesisParams.from_dict(data.get("hypothesis", {})),
            loft=LoftParams.from_dict(data.get("loft", {})),
            occlusion=OcclusionParams.from_dict(data.get("occlusion", {})),
            evaluation=EvalParams.from_dict(data.get("eval", {})),
            threads=int(data.get("threads", 1)),
            overlay_svg=bool(data.get("overlay_svg", False)),
        )

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except (OSError, ValueError) as e:
            raise ImproperlyConfigured("cannot read pipeline config %s: %s" % (path, e))
        return cls.from_dict(data, base=path.parent)

    def validate(self):
        for name in ("drawing", "cameras", "gt"):
            value = getattr(self, name)
            if value is not None and not value.exists():
                raise ImproperlyConfigured("%s file %s does not exist" % (name, value))

    def to_dict(self):
        return {
            "schema": self.schema,
            "paths": {
                "drawing": str(self.drawing),
                "cameras": str(self.cameras),
                "out": str(self.out),
                "gt": None if self.gt is None else str(self.gt),
            },
            "reorg": self.reorg.to_dict(),
            "hypothesis": self.hypothesis.to_dict(),
            "loft": self.loft.to_dict(),
            "occlusion": self.occlusion.to_dict(),
            "eval": self.evaluation.to_dict(),
            "overlay_svg": self.overlay_svg,
        }


@dataclass
class PipelineResult:
    exit_code: int
    directory: Path
    manifest: dict = field(default_factory=dict)
    error: Exception = None
    failed_stage: str = None
    error: Exception = None


def _write_json(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def _surfaces(hypotheses):
    return [h.tri for h in hypotheses if h.status in SURVIVING]


def stage_members(manifest):
    """
    Ids of the hypotheses present at each evaluation stage of a run manifest.
    """
    rows = manifest.get("hypotheses", [])
    return {
        "formed": [r["id"] for r in rows],
        "confirmed": [r["id"] for r in rows if set(r["history"]) & set(SURVIVING)],
        "cleaned": [r["id"] for r in rows if r["history"][-1] in SURVIVING and not r.get("hidden")],
    }


class _Run(object):
    """
    State of one pipeline run; every stage reads and extends it.
    """

    def __init__(self, config, threads):
        self.config = config
        self.threads = threads
        self.out = config.out
        self.transitions = []
        self.manifest = {"schema": SCHEMA_VERSION, "config": config.to_dict(), "stages": {}}

    def record_transition(self, sender, hypothesis, old_status, new_status, **kwargs):
        self.transitions.append({"hypothesis": hypothesis.id, "from": old_status, "to": new_status})

    def finish(self, stage, **summary):
        directory = self.out / STAGE_DIRECTORIES[stage]
        self.manifest["stages"][stage] = summary
        stage_completed.send(sender=self.__class__, stage=stage, directory=directory)
        log.info("stage %s done", stage, extra={"stage": stage})
        return directory

    def reorg(self):
        drawing, report = reorganize_with_report(self.drawing, self.config.reorg, self.threads)
        directory = self.out / STAGE_DIRECTORIES["reorg"]
        save_drawing(drawing, directory / "drawing.json")
        _write_json(directory / "report.json", report.to_dict())
        self.drawing = drawing
        self.finish("reorg", fragments=len(drawing), **report.to_dict())

    def hypothesize(self):
        self.formed = form_hypotheses(
            self.drawing, self.views, self.config.hypothesis, self.config.loft, self.threads,
        )
        save_hypotheses(self.formed, self.out / STAGE_DIRECTORIES["hypothesize"])
        self.finish("hypothesize", hypotheses=len(self.formed))

    def verify(self):
        self.verified, self.records = verify(
            self.formed, self.drawing, self.views, self.config.occlusion, threads=self.threads,
        )
        directory = self.out / STAGE_DIRECTORIES["verify"]
        save_hypotheses(self.verified, directory)
        save_records(self.records, directory / "records.json")
        if self.config.overlay_svg:
            write_overlays(directory / "overlays", self.verified, self.records, self.drawing, self.views,
                           self.config.occlusion)
        fraction = occlusion_assumption_fraction(self.formed, self.records)
        self.finish("verify", records=len(self.records), occlusion_assumption_fraction=fraction,
                    **{s: sum(h.status == s for h in self.verified) for s in SURVIVING})

    def cleanup(self):
        visible = drop_fully_hidden(self.verified, self.views, self.config.occlusion)
        self.hidden = sorted({h.id for h in self.verified} - {h.id for h in visible})
        self.final = dedup_hypotheses(visible, self.config.occlusion)
        save_hypotheses(self.final, self.out / STAGE_DIRECTORIES["cleanup"])
        self.finish("cleanup", hidden=self.hidden, surviving=len(_surfaces(self.final)))

    def evaluate(self):
        gt = load_trimesh(self.config.gt)
        params = self.config.evaluation
        stages = (
            ("formed", [h.tri for h in self.formed]),
            ("confirmed", _surfaces(self.verified)),
            ("cleaned", _surfaces(self.final)),
        )
        points = [p for stage, meshes in stages for p in pr_curve(meshes, gt, params.taus, params, stage)]
        directory = self.out / STAGE_DIRECTORIES["evaluate"]
        write_pr_csv(points, directory / "pr.csv")
        plot_pr(points, directory / "pr.svg")
        self.manifest["pr"] = [
            {"stage": p.stage, "tau": p.tau, "precision": p.precision, "recall": p.recall,
             "precision_defined": p.precision_defined}
            for p in points
        ]
        self.finish("evaluate", points=len(points))

    def hypothesis_summary(self):
        final = {h.id: h for h in getattr(self, "final", [])}
        hidden = set(getattr(self, "hidden", []))
        rows = []
        for h in getattr(self, "formed", []):
            current = final.get(h.id)
            history = list(current.history) if current is not None else None
            if history is None:
                history = [t["to"] for t in self.transitions if t["hypothesis"] == h.id]
                history = [h.status] + history
            rows.append({
                "id": h.id,
                "source_fragment_ids": list(h.source_fragment_ids),
                "pairing": h.pairing,
                "mean_abs_K": h.mean_abs_K,
                "history": history,
                "hidden": h.id in hidden,
            })
        return rows

    def write_manifest(self):
        self.manifest["hypotheses"] = self.hypothesis_summary()
        self.manifest["transitions"] = self.transitions
        return _write_json(self.out / "manifest.json", self.manifest)


def _file_handler(directory):
    directory.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(directory / "pipeline.log", mode="w")
    handler.setFormatter(JSONLineFormatter())
    log.addHandler(handler)
    return handler


# errors a stage body may raise; anything else is a bug and propagates
STAGE_FAILURES = (
    SurfacingError, ValueError, ArithmeticError, LookupError, OSError, np.linalg.LinAlgError,
)


def run_stage(name, stage):
    """
    Call one stage body, turning its failure into a :class:`StageError`
    that carries the stage exit code.
    """
    try:
        stage()
    except StageError:
        raise
    except STAGE_FAILURES as e:
        raise StageError(name, STAGE_EXIT_CODES[name], "%s: %s" % (type(e).__name__, e)) from e


def run_pipeline(config, threads=None):
    """
    Run every stage in order and return a :class:`PipelineResult`.

    A failing stage stops the run with its stage exit code; artifacts of
    earlier stages and the manifest stay on disk. A configuration error
    writes nothing.
    """
    threads = config.threads if threads is None else threads
    run = _Run(config, threads)
    try:
        config.validate()
        run.drawing = load_drawing(config.drawing)
        run.views = load_cameras(config.cameras)
    except (ImproperlyConfigured, SurfacingError, OSError, ValueError) as e:
        log.error("configuration error: %s", e, extra={"stage": "config"})
        return PipelineResult(EXIT_CONFIG, config.out, failed_stage="config", error=e)

    handler = _file_handler(config.out)
    hypothesis_status_changed.connect(run.record_transition, dispatch_uid="curve_surfacing.pipeline")
    stages = [run.reorg, run.hypothesize, run.verify, run.cleanup]
    if config.gt is not None:
        stages.append(run.evaluate)
    result = PipelineResult(EXIT_OK, config.out, run.manifest)
    try:
        for stage in stages:
            run_stage(stage.__name__, stage)
    except StageError as e:
        log.error("%s", e, exc_info=e.__cause__, extra={"stage": e.stage})
        run.manifest["failed_stage"] = e.stage
        result.exit_code = e.exit_code
        result.failed_stage = e.stage
        result.error = e
    finally:
        try:
            run.write_manifest()
        finally:
            hypothesis_status_changed.disconnect(dispatch_uid="curve_surfacing.pipeline")
            log.removeHandler(handler)
            handler.close()
    return result
