"""
Precision and recall of a set of surfaces against a ground-truth mesh.

Both sides are sampled uniformly by area; a sample counts as matched when it
lies within ``tau`` of the other side.
"""
import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure
from scipy.spatial import cKDTree

from .curve_graph import TriMesh
from .geometry import point_triangle_distance, sample_triangles
from .params import SettingsParams


log = logging.getLogger("curve_surfacing")

STAGES = ("formed", "confirmed", "cleaned")
CSV_HEADER = ("stage", "tau", "precision", "recall")


@dataclass(frozen=True)
class EvalParams(SettingsParams):
    samples_per_m2: float = 10000.0
    min_samples: int = 10000
    seed: int = 0
    taus: tuple = field(default=(0.005, 0.01, 0.02, 0.03, 0.05, 0.075, 0.1))

    setting_names = {
        "samples_per_m2": "EVAL_SAMPLES_PER_M2",
        "min_samples": "EVAL_MIN_SAMPLES",
        "seed": "EVAL_SEED",
        "taus": "EVAL_TAUS",
    }

    def __post_init__(self):
        object.__setattr__(self, "taus", tuple(sorted(float(t) for t in self.taus)))

    def validate(self):
        self.require(self.samples_per_m2 > 0, "samples_per_m2 must be positive")
        self.require(int(self.min_samples) >= 1, "min_samples must be >= 1")
        self.require(len(self.taus) > 0 and all(t > 0 for t in self.taus), "taus must be positive")


@dataclass(frozen=True)
class PRPoint:
    tau: float
    precision: float
    recall: float
    stage: str = "formed"
    precision_defined: bool = True


def sample_surface(mesh, samples_per_m2, min_samples, rng):
    """
    Area-uniform samples, ``samples_per_m2`` per square meter but at least ``min_samples``.
    """
    area = mesh.area()
    count = max(int(min_samples), int(np.ceil(area * samples_per_m2)))
    points, _ = sample_triangles(mesh.vertices, mesh.faces, count, rng)
    return points


def point_to_mesh_distance(points, mesh, chunk=2048):
    """
    Exact distance from each point to the nearest triangle of ``mesh``.

    The nearest triangle centroid bounds the distance from above, so only
    triangles whose centroid lies within that bound plus the largest
    centroid-to-vertex reach need the exact point-triangle test.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    mesh = mesh.drop_degenerate(0.0)
    if not len(mesh.faces):
        return np.full(len(points), np.inf)
    tri = mesh.triangles()
    centroids = tri.mean(axis=1)
    reach = float(np.linalg.norm(tri - centroids[:, None], axis=2).max())
    tree = cKDTree(centroids)
    out = np.empty(len(points))
    for start in range(0, len(points), chunk):
        block = points[start:start + chunk]
        upper, _ = tree.query(block)
        candidates = tree.query_ball_point(block, upper + reach)
        lengths = np.fromiter((len(c) for c in candidates), dtype=np.int64, count=len(block))
        rows = np.repeat(np.arange(len(block)), lengths)
        tris = np.fromiter((t for c in candidates for t in c), dtype=np.int64, count=int(lengths.sum()))
        d = point_triangle_distance(block[rows], tri[tris, 0], tri[tris, 1], tri[tris, 2])
        best = np.full(len(block), np.inf)
        np.minimum.at(best, rows, d)
        out[start:start + chunk] = best
    return out


def pr_curve(result, gt, taus, params=None, stage="formed"):
    """
    Precision and recall of the meshes in ``result`` against ``gt`` at each threshold.

    An empty result has recall 0 and precision reported as 1 with
    ``precision_defined`` False.
    """
    params = params or EvalParams.from_settings()
    if not len(gt.faces) or gt.area() <= 0:
        raise ValueError("ground truth mesh is empty")
    taus = sorted(float(t) for t in taus)
    result_mesh = TriMesh.concatenate(result).drop_degenerate(0.0)
    rng = np.random.default_rng(params.seed)
    gt_samples = sample_surface(gt, params.samples_per_m2, params.min_samples, rng)
    if not len(result_mesh.faces) or result_mesh.area() <= 0:
        log.warning("stage %s has no surfaces; precision is undefined", stage, extra={"stage": stage})
        return [PRPoint(t, 1.0, 0.0, stage, precision_defined=False) for t in taus]

    result_samples = sample_surface(result_mesh, params.samples_per_m2, params.min_samples, rng)
    to_gt = point_to_mesh_distance(result_samples, gt)
    to_result = point_to_mesh_distance(gt_samples, result_mesh)
    points = [
        PRPoint(t, float(np.mean(to_gt <= t)), float(np.mean(to_result <= t)), stage)
        for t in taus
    ]
    log.info("stage %s: %d result samples, %d gt samples", stage, len(result_samples), len(gt_samples),
             extra={"stage": stage, "count": len(result_samples)})
    return points


def write_pr_csv(points, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(CSV_HEADER)
        for p in points:
            writer.writerow([p.stage, repr(p.tau), repr(p.precision), repr(p.recall)])
    return path


def read_pr_csv(path):
    with Path(path).open(newline="") as fp:
        reader = csv.DictReader(fp)
        return [
            PRPoint(float(row["tau"]), float(row["precision"]), float(row["recall"]), row["stage"])
            for row in reader
        ]


def plot_pr(points, path):
    """
    Precision against recall, one line per stage, saved as SVG.
    """
    figure = Figure(figsize=(5, 4))
    axes = figure.add_subplot()
    for stage in [s for s in STAGES if any(p.stage == s for p in points)]:
        rows = sorted((p for p in points if p.stage == stage), key=lambda p: p.tau)
        axes.plot([p.recall for p in rows], [p.precision for p in rows], marker="o", label=stage)
    axes.set_xlabel("recall")
    axes.set_ylabel("precision")
    axes.set_xlim(0.0, 1.02)
    axes.set_ylim(0.0, 1.02)
    axes.legend(loc="lower left")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    figure.savefig(path, format="svg", metadata={"Date": None})
    return path
