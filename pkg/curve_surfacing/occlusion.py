"""
Occlusion reasoning over surface hypotheses.

A surface that hides part of a drawn curve in some view predicts that no
image edges are visible along the hidden stretch. Edge evidence found there
rejects the surface; a clean hidden stretch confirms it.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure
from scipy.integrate import trapezoid

from .curve_graph import ProjectedCurve
from .evaluation import point_to_mesh_distance
from .geometry import sample_triangles
from .hypothesis import CONFIRMED, FORMED, REDUNDANT, REJECTED, UNVERIFIABLE
from .loft import edge_face_counts
from .params import SettingsParams
from .raytrace import get_ray_tracer
from .utils import parallel_map


log = logging.getLogger("curve_surfacing")

INACTIVE = (REJECTED, REDUNDANT)
# surfaces that block the view of others
OCCLUDING = (FORMED, CONFIRMED)


@dataclass(frozen=True)
class OcclusionParams(SettingsParams):
    tau_E: float = 3.0
    tau_loc: float = 2.0
    tau_theta: float = 0.3
    subsume_frac: float = 0.8
    subsume_eps: float = 0.01
    keep_unverifiable: bool = True
    strict_all: bool = False
    strength_weighted: bool = False
    samples: int = 200

    setting_names = {
        "tau_E": "TAU_E",
        "tau_loc": "TAU_LOC",
        "tau_theta": "TAU_THETA",
        "subsume_frac": "SUBSUME_FRAC",
        "subsume_eps": "SUBSUME_EPS",
        "keep_unverifiable": "KEEP_UNVERIFIABLE",
        "strict_all": "STRICT_ALL",
        "strength_weighted": "STRENGTH_WEIGHTED",
        "samples": "SURFACE_SAMPLES",
    }

    def validate(self):
        self.require(self.tau_E > 0, "tau_E must be positive")
        self.require(self.tau_loc > 0, "tau_loc must be positive")
        self.require(0 < self.tau_theta < np.pi / 2, "tau_theta must be in (0, pi/2)")
        self.require(0 < self.subsume_frac <= 1, "subsume_frac must be in (0, 1]")
        self.require(self.subsume_eps > 0, "subsume_eps must be positive")
        self.require(int(self.samples) >= 1, "samples must be >= 1")


@dataclass(frozen=True)
class OcclusionRecord:
    """
    The stretches of curve ``curve_id`` hidden by hypothesis ``hypothesis_id``
    in view ``view_id``, as 3D arclength intervals in meters, with the edge
    evidence ``evidence`` integrated over them.
    """
    hypothesis_id: int
    curve_id: int
    view_id: int
    intervals: tuple
    evidence: float

    def to_dict(self):
        return {
            "hypothesis": self.hypothesis_id,
            "curve": self.curve_id,
            "view": self.view_id,
            "intervals": [[a, b] for a, b in self.intervals],
            "evidence": self.evidence,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            int(data["hypothesis"]), int(data["curve"]), int(data["view"]),
            tuple((float(a), float(b)) for a, b in data["intervals"]), float(data["evidence"]),
        )


def view_samples(fragment, view):
    """
    Densify a fragment so consecutive samples are at most one pixel apart
    in ``view``, keeping samples in front of the camera.

    Returns the 3D samples and their projection as a :class:`ProjectedCurve`
    whose :attr:`s` is the 3D arclength of each kept sample.
    """
    points = np.asarray(fragment.points)
    if fragment.closed:
        points = np.vstack([points, points[:1]])
    pixels = view.project(points)
    gaps = np.linalg.norm(np.diff(pixels, axis=0), axis=1)
    pieces = np.where(np.isfinite(gaps), np.maximum(1, np.ceil(gaps)), 1).astype(np.int64)
    segment = np.repeat(np.arange(len(pieces)), pieces)
    offset = np.arange(len(segment)) - np.repeat(np.cumsum(pieces) - pieces, pieces)
    t = (offset / np.repeat(pieces, pieces))[:, None]
    dense = np.vstack([points[segment] + t * (points[segment + 1] - points[segment]), points[-1:]])
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(dense, axis=0), axis=1))])

    front = np.flatnonzero(view.depth(dense) > 0)
    dense_pixels = view.project(dense[front])
    s_pixels = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(dense_pixels, axis=0), axis=1))])
    return dense[front], ProjectedCurve(
        fragment_id=fragment.id,
        view_id=view.id,
        pixels=dense_pixels,
        indices=front,
        s=s[front],
        s_pixels=s_pixels,
        clipped=np.flatnonzero(view.depth(dense) <= 0),
    )


def _runs(mask):
    padded = np.concatenate([[False], mask, [False]]).astype(np.int8)
    change = np.flatnonzero(np.diff(padded))
    return list(zip(change[0::2], change[1::2] - 1))


def intervals_from_mask(s, occluded):
    """
    Maximal runs of occluded samples as arclength intervals padded by half
    a sample spacing on each side, clipped to the curve.
    """
    intervals = []
    for i0, i1 in _runs(np.asarray(occluded, dtype=bool)):
        a = s[i0] - 0.5 * (s[i0] - s[i0 - 1]) if i0 > 0 else s[i0]
        b = s[i1] + 0.5 * (s[i1 + 1] - s[i1]) if i1 < len(s) - 1 else s[i1]
        if b > a:
            intervals.append((float(a), float(b)))
    return intervals


def occluded_intervals(curve, hyp, view, tracer=None):
    """
    Arclength intervals of ``curve`` hidden behind ``hyp`` in ``view``.

    A curve is never occluded by a patch it bounds.
    """
    if curve.id in hyp.source_fragment_ids:
        return []
    samples, projected = view_samples(curve, view)
    if not len(samples):
        return []
    tracer = tracer or get_ray_tracer([(hyp.id, hyp.tri)])
    origins = np.repeat(view.camera_center[None], len(samples), axis=0)
    blocked = tracer.occluded(origins, samples, only={hyp.id})
    return intervals_from_mask(projected.s, blocked)


def _angle_difference(a, b):
    d = np.mod(np.abs(a - b), np.pi)
    return np.minimum(d, np.pi - d)


def edge_support(view, gamma, interval, params, tree=None):
    """
    Edge evidence along ``gamma`` over the pixel arclength ``interval``.

    The integrand counts the edges of ``view`` within ``tau_loc`` pixels of
    the curve whose orientation is within ``tau_theta`` of the curve tangent
    (or sums their strengths when ``strength_weighted``). The trapezoidal
    integral is taken over pixel arclength.
    """
    edges = view.edges
    if edges is None or not len(edges) or len(gamma) < 2:
        return 0.0
    a, b = max(0.0, interval[0]), min(gamma.pixel_length, interval[1])
    if not b > a:
        return 0.0
    tree = tree or edges.tree()
    s = np.linspace(a, b, max(2, int(np.ceil(b - a)) + 1))
    positions = np.column_stack([np.interp(s, gamma.s_pixels, gamma.pixels[:, k]) for k in range(2)])
    segment = np.clip(np.searchsorted(gamma.s_pixels, s, side="right") - 1, 0, len(gamma) - 2)
    tangent = gamma.pixels[segment + 1] - gamma.pixels[segment]
    theta = np.mod(np.arctan2(tangent[:, 1], tangent[:, 0]), np.pi)

    phi = np.zeros(len(s))
    weights = edges.strengths if params.strength_weighted else np.ones(len(edges))
    for i, near in enumerate(tree.query_ball_point(positions, params.tau_loc)):
        if near:
            near = np.asarray(near)
            match = _angle_difference(edges.orientations[near], theta[i]) < params.tau_theta
            phi[i] = weights[near][match].sum()
    return float(trapezoid(phi, s))


def _view_records(view, drawing, hypotheses, tracer, params):
    active = {h.id: h for h in hypotheses}
    tree = view.edges.tree() if view.edges is not None and len(view.edges) else None
    records = []
    for curve in drawing.fragments:
        samples, projected = view_samples(curve, view)
        if not len(samples):
            continue
        origins = np.repeat(view.camera_center[None], len(samples), axis=0)
        pairs = tracer.blocking_owners(origins, samples)
        for owner in np.unique(pairs[:, 1]):
            hyp = active.get(int(owner))
            if hyp is None or curve.id in hyp.source_fragment_ids:
                continue
            blocked = np.zeros(len(samples), dtype=bool)
            blocked[pairs[pairs[:, 1] == owner, 0]] = True
            intervals = intervals_from_mask(projected.s, blocked)
            if not intervals:
                continue
            evidence = 0.0
            for a, b in intervals:
                pixel_interval = (np.interp(a, projected.s, projected.s_pixels),
                                  np.interp(b, projected.s, projected.s_pixels))
                evidence += edge_support(view, projected, pixel_interval, params, tree)
            records.append(OcclusionRecord(hyp.id, curve.id, view.id, tuple(intervals), evidence))
    return records


def decide(records, params):
    """
    Status implied by one hypothesis' records.
    """
    if any(r.evidence >= params.tau_E for r in records):
        return REJECTED
    if records:
        return CONFIRMED
    return REJECTED if params.strict_all else UNVERIFIABLE


def verify(hypotheses, drawing, views, params, tracer=None, threads=None):
    """
    Classify formed hypotheses by the edge evidence along the curve stretches
    they hide.

    A hypothesis is rejected when any hidden stretch carries evidence of at
    least ``tau_E``, confirmed when it hides something and nothing it hides
    is contradicted, and unverifiable when it hides nothing. With
    ``strict_all`` every hypothesis must be confirmed at least once, so
    unverifiable ones are rejected instead. Unverifiable hypotheses are
    dropped from the output unless ``keep_unverifiable``.
    """
    candidates = [h for h in hypotheses if h.status == FORMED]
    tracer = tracer or get_ray_tracer([(h.id, h.tri) for h in candidates])
    per_view = parallel_map(
        lambda view: _view_records(view, drawing, candidates, tracer, params), views, threads,
    )
    records = sorted(
        (r for rs in per_view for r in rs),
        key=lambda r: (r.hypothesis_id, r.curve_id, r.view_id),
    )
    by_hypothesis = {}
    for r in records:
        by_hypothesis.setdefault(r.hypothesis_id, []).append(r)

    updated = []
    for h in hypotheses:
        if h.status == FORMED:
            h = h.with_status(decide(by_hypothesis.get(h.id, []), params))
        if h.status == UNVERIFIABLE and not params.keep_unverifiable:
            log.debug("dropping unverifiable hypothesis %d", h.id, extra={"hypothesis": h.id})
            continue
        updated.append(h)
    counts = {s: sum(h.status == s for h in updated) for s in (CONFIRMED, REJECTED, UNVERIFIABLE)}
    log.info("verified %d hypotheses: %d confirmed, %d rejected, %d unverifiable",
             len(candidates), counts[CONFIRMED], counts[REJECTED], counts[UNVERIFIABLE],
             extra={"stage": "verify", "count": len(records)})
    return updated, records


def _surface_samples(hypothesis, count):
    rng = np.random.default_rng(hypothesis.id)
    points, _ = sample_triangles(hypothesis.tri.vertices, hypothesis.tri.faces, count, rng)
    return points


def _visible_somewhere(points, views, tracer, exclude):
    for view in views:
        pixels = view.project(points)
        in_frame = (
            np.all(np.isfinite(pixels), axis=1)
            & (pixels[:, 0] >= 0) & (pixels[:, 0] <= view.width)
            & (pixels[:, 1] >= 0) & (pixels[:, 1] <= view.height)
        )
        if not in_frame.any():
            continue
        targets = points[in_frame]
        origins = np.repeat(view.camera_center[None], len(targets), axis=0)
        if not tracer.occluded(origins, targets, exclude=exclude).all():
            return True
    return False


def drop_fully_hidden(hypotheses, views, params=None, tracer=None):
    """
    Drop active hypotheses that no view can see past the formed and
    confirmed ones.

    Unverifiable hypotheses can be dropped but never occlude. Samples
    outside every image count as unseen. Higher ids are tested first and,
    once dropped, stop occluding, so of two coincident patches the lower id
    survives.
    """
    params = params or OcclusionParams.from_settings()
    active = [h for h in hypotheses if h.status not in INACTIVE]
    tracer = tracer or get_ray_tracer([(h.id, h.tri) for h in active if h.status in OCCLUDING])
    dropped = set()
    for h in sorted(active, key=lambda h: -h.id):
        points = _surface_samples(h, params.samples)
        if not len(points):
            continue
        if not _visible_somewhere(points, views, tracer, exclude={h.id} | dropped):
            dropped.add(h.id)
            log.info("hypothesis %d is hidden in every view", h.id, extra={"hypothesis": h.id})
    return [h for h in hypotheses if h.id not in dropped]


def dedup_hypotheses(hypotheses, params):
    """
    Mark as redundant every confirmed or unverifiable hypothesis mostly
    covered by a larger one; other statuses are passed through.

    Hypotheses are visited by decreasing area, higher id first on ties; one
    is redundant when at least ``subsume_frac`` of its samples lie within
    ``subsume_eps`` of a hypothesis kept before it.
    """
    active = [h for h in hypotheses if h.status in (CONFIRMED, UNVERIFIABLE)]
    kept, redundant = [], set()
    for h in sorted(active, key=lambda h: (-h.area, -h.id)):
        points = _surface_samples(h, params.samples)
        for other in kept:
            if not len(points):
                break
            covered = np.mean(point_to_mesh_distance(points, other.tri) <= params.subsume_eps)
            if covered >= params.subsume_frac:
                redundant.add(h.id)
                log.debug("hypothesis %d is %.0f%% covered by %d", h.id, 100 * covered, other.id,
                          extra={"hypothesis": h.id})
                break
        else:
            kept.append(h)
    return [h.with_status(REDUNDANT) if h.id in redundant else h for h in hypotheses]


def occlusion_assumption_fraction(hypotheses, records):
    """
    Fraction of hypotheses hiding at least one curve stretch in at least one view.
    """
    if not hypotheses:
        return 0.0
    occluding = {r.hypothesis_id for r in records if r.intervals}
    return sum(h.id in occluding for h in hypotheses) / len(hypotheses)


def save_records(records, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"records": [r.to_dict() for r in records]}, indent=2, sort_keys=True) + "\n")
    return path


def load_records(path):
    return [OcclusionRecord.from_dict(r) for r in json.loads(Path(path).read_text())["records"]]


def _outline(hypothesis, view):
    edges, _, counts = edge_face_counts(hypothesis.mesh.faces)
    border = edges[counts == 1]
    pixels = view.project(hypothesis.mesh.vertices)
    return pixels[border]


def write_overlays(directory, hypotheses, records, drawing, views, params):
    """
    One SVG per view: hypothesis outlines, hidden curve stretches and the
    edges matched along them.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for view in views:
        figure = Figure(figsize=(view.width / 100.0, view.height / 100.0))
        axes = figure.add_axes([0, 0, 1, 1])
        axes.set_xlim(0, view.width)
        axes.set_ylim(view.height, 0)
        axes.set_axis_off()
        if len(view.edges):
            axes.scatter(view.edges.positions[:, 0], view.edges.positions[:, 1], s=0.2, color="0.75")
        for h in hypotheses:
            for segment in _outline(h, view):
                if np.all(np.isfinite(segment)):
                    axes.plot(segment[:, 0], segment[:, 1], color="tab:blue", linewidth=0.5)
        tree = view.edges.tree() if len(view.edges) else None
        for r in (r for r in records if r.view_id == view.id):
            _, projected = view_samples(drawing.fragment(r.curve_id), view)
            for a, b in r.intervals:
                hidden = (projected.s >= a) & (projected.s <= b)
                axes.plot(projected.pixels[hidden, 0], projected.pixels[hidden, 1],
                          color="tab:red", linewidth=1.0)
                if tree is None:
                    continue
                matches = tree.query_ball_point(projected.pixels[hidden], params.tau_loc)
                near = sorted({i for ns in matches for i in ns})
                if near:
                    matched = view.edges.positions[near]
                    axes.scatter(matched[:, 0], matched[:, 1], s=2, color="tab:orange")
        path = directory / ("view_%03d.svg" % view.id)
        figure.savefig(path, format="svg", metadata={"Date": None})
        paths.append(path)
    return paths
