"""
Surface hypotheses: lofted patches proposed from pairs of curve fragments
and from closed fragments, before occlusion reasoning verifies them.
"""
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.spatial import Delaunay, QhullError, cKDTree

from .curve_graph import QuadMesh, TriMesh, arclength, load_quadmesh, project_curve, write_obj
from .exceptions import DrawingParseError, EmptyProjectionError, StatusTransitionError, SurfacingError
from .loft import ANTIPARALLEL, PARALLEL, LoftParams, loft_closed, loft_pair
from .params import SettingsParams
from .settings import surfacing_settings
from .signals import hypothesis_status_changed
from .utils import parallel_map, point_polyline_distance


log = logging.getLogger("curve_surfacing")

CLOSED = "closed"

FORMED = "formed"
CONFIRMED = "confirmed"
REJECTED = "rejected"
UNVERIFIABLE = "unverifiable"
REDUNDANT = "redundant"

STATUS_TRANSITIONS = {
    FORMED: {CONFIRMED, REJECTED, UNVERIFIABLE},
    CONFIRMED: {REDUNDANT},
    UNVERIFIABLE: {REDUNDANT},
    REJECTED: {REDUNDANT},
    REDUNDANT: set(),
}

TOPOLOGY_MODES = ("or", "only", "off")
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class HypothesisParams(SettingsParams):
    tau_length: float = 0.03
    tau_alpha: float = 0.18
    tau_G: float = 1.0
    use_view_topology: bool = True
    topology_mode: str = "or"

    setting_names = {
        "tau_length": "TAU_LENGTH",
        "tau_alpha": "TAU_ALPHA",
        "tau_G": "TAU_G",
        "use_view_topology": "USE_VIEW_TOPOLOGY",
        "topology_mode": "TOPOLOGY_MODE",
    }

    def validate(self):
        for name in ("tau_length", "tau_alpha", "tau_G"):
            self.require(getattr(self, name) > 0, "%s must be positive" % name)
        self.require(self.topology_mode in TOPOLOGY_MODES,
                     "topology_mode must be one of %s" % ", ".join(TOPOLOGY_MODES))

    @property
    def effective_topology_mode(self):
        return self.topology_mode if self.use_view_topology else "off"


@dataclass(frozen=True, eq=False)
class SurfaceHypothesis:
    """
    A candidate surface patch.

    :attr:`tri` is always the triangulation of :attr:`mesh`. Statuses only
    move forward: formed, then confirmed, rejected or unverifiable, then
    possibly redundant. :attr:`history` lists every status held, oldest first.
    """
    id: int
    source_fragment_ids: tuple
    pairing: str
    mesh: QuadMesh
    mean_abs_K: float
    status: str = FORMED
    history: tuple = (FORMED,)
    degenerate: bool = False
    boundary_deviation: float = 0.0
    tri: Optional[TriMesh] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "source_fragment_ids", tuple(int(i) for i in self.source_fragment_ids))
        object.__setattr__(self, "tri", self.mesh.triangulate())
        if self.status not in STATUS_TRANSITIONS:
            raise ValueError("unknown status %r" % self.status)

    def __repr__(self):
        return "SurfaceHypothesis(id=%d, sources=%s, pairing=%s, status=%s)" % (
            self.id, list(self.source_fragment_ids), self.pairing, self.status)

    @property
    def area(self):
        return self.tri.area()

    def with_status(self, status):
        if status == self.status:
            return self
        if status not in STATUS_TRANSITIONS.get(self.status, ()):
            raise StatusTransitionError(
                "hypothesis %d cannot go from %s to %s" % (self.id, self.status, status)
            )
        updated = replace(self, status=status, history=self.history + (status,))
        log.debug("hypothesis %d: %s -> %s", self.id, self.status, status, extra={"hypothesis": self.id})
        hypothesis_status_changed.send(
            sender=self.__class__, hypothesis=updated, old_status=self.status, new_status=status,
        )
        return updated

    def to_dict(self):
        return {
            "id": self.id,
            "source_fragment_ids": list(self.source_fragment_ids),
            "pairing": self.pairing,
            "mean_abs_K": self.mean_abs_K,
            "status": self.status,
            "history": list(self.history),
            "degenerate": bool(self.degenerate),
            "boundary_deviation": self.boundary_deviation,
            "boundary_vertices": np.flatnonzero(self.mesh.boundary_tags).tolist(),
        }


def curve_distance(c1, c2):
    """
    Symmetric mean point-to-curve distance between two fragments.
    """
    forward = point_polyline_distance(c1.points, c2.points, closed=c2.closed).mean()
    backward = point_polyline_distance(c2.points, c1.points, closed=c1.closed).mean()
    return float(0.5 * (forward + backward))


def _projected_samples(drawing, view):
    pixels, labels = [], []
    for fragment in drawing.fragments:
        try:
            projected = project_curve(fragment, view)
        except EmptyProjectionError:
            continue
        pixels.append(projected.pixels)
        labels.append(np.full(len(projected), fragment.id, dtype=np.int64))
    if not pixels:
        return np.zeros((0, 2)), np.zeros(0, dtype=np.int64)
    return np.vstack(pixels), np.concatenate(labels)


def _nearest_fragment_pairs(pixels, labels):
    pairs = set()
    ids = np.unique(labels)
    if len(ids) < 2:
        return pairs
    for fid in ids:
        others = labels != fid
        tree = cKDTree(pixels[others])
        d, j = tree.query(pixels[labels == fid])
        nearest = int(labels[others][j[np.argmin(d)]])
        pairs.add((min(fid, nearest), max(fid, nearest)))
    return pairs


def _delaunay_pairs(pixels, labels):
    triangulation = Delaunay(pixels)
    simplices = triangulation.simplices
    edges = np.vstack([simplices[:, [0, 1]], simplices[:, [1, 2]], simplices[:, [2, 0]]])
    edges = np.unique(np.sort(edges, axis=1), axis=0)
    edges = edges[labels[edges[:, 0]] != labels[edges[:, 1]]]
    if not len(edges):
        return set()
    tree = cKDTree(pixels)
    mids = 0.5 * (pixels[edges[:, 0]] + pixels[edges[:, 1]])
    radii = 0.5 * np.linalg.norm(pixels[edges[:, 0]] - pixels[edges[:, 1]], axis=1)
    pairs = set()
    for (i, j), mid, r in zip(edges, mids, radii):
        a, b = int(labels[i]), int(labels[j])
        key = (min(a, b), max(a, b))
        if key in pairs:
            continue
        close = tree.query_ball_point(mid, r * (1 - 1e-9))
        if any(labels[k] != a and labels[k] != b for k in close):
            continue
        pairs.add(key)
    return pairs


def view_topology_neighbors(drawing, views):
    """
    Fragment pairs whose projections are Delaunay neighbors in at least one view.

    An edge of the Delaunay triangulation of all projected samples joins two
    fragments unless a sample of a third fragment is closer to the edge
    midpoint than the edge endpoints are.
    """
    neighbors = set()
    for view in views:
        pixels, labels = _projected_samples(drawing, view)
        if len(np.unique(labels)) < 2:
            continue
        try:
            if len(pixels) < 3:
                raise QhullError("too few samples")
            pairs = _delaunay_pairs(pixels, labels)
        except QhullError as e:
            log.info("view %d: degenerate sample set (%s), using nearest fragments", view.id, e,
                     extra={"view": view.id})
            pairs = _nearest_fragment_pairs(pixels, labels)
        neighbors |= pairs
    return neighbors


class DrawingPairSource(object):
    """
    Candidate fragment pairs from proximity and view topology.

    Fragments must be open and longer than ``tau_length``. A pair passes the
    proximity gate when its ``curve_distance`` is below ``tau_alpha`` and
    the topology gate when the two are view neighbors; ``topology_mode``
    decides how the two gates combine.
    """

    def candidate_pairs(self, drawing, views, params):
        eligible = [f for f in drawing.fragments if not f.closed and arclength(f) > params.tau_length]
        mode = params.effective_topology_mode
        topology = view_topology_neighbors(drawing, views) if mode != "off" and views else set()
        pairs = []
        for i, c1 in enumerate(eligible):
            for c2 in eligible[i + 1:]:
                key = (c1.id, c2.id)
                near = mode != "only" and curve_distance(c1, c2) < params.tau_alpha
                if near or key in topology:
                    pairs.append(key)
        log.debug("%d candidate pairs from %d eligible fragments (topology %s)",
                  len(pairs), len(eligible), mode)
        return sorted(pairs)


def get_pair_source():
    return surfacing_settings.PAIR_SOURCE_CLASS()


def _loft_or_none(job, loft_params):
    kind, fragments = job
    try:
        if kind == CLOSED:
            return loft_closed(fragments[0], loft_params)
        return loft_pair(fragments[0], fragments[1], kind, loft_params)
    except SurfacingError as e:
        log.warning("loft of %s (%s) failed: %s", [f.id for f in fragments], kind, e)
        return None


def _selected(results):
    """
    The pairing with the lower mean |K|, parallel on ties. Degeneracy is not
    considered here: a degenerate winner is discarded, not replaced.
    """
    ranked = [
        (r.mean_abs_K if np.isfinite(r.mean_abs_K) else np.inf, k, r)
        for k, r in enumerate(results) if r is not None
    ]
    if not ranked:
        return None
    return min(ranked, key=lambda item: item[:2])[2]


def form_hypotheses(drawing, views, params, loft_params=None, threads=None):
    """
    Loft every closed fragment and every candidate pair, keeping patches
    whose mean |K| is below ``tau_G`` and which are not degenerate.

    Hypotheses are numbered from 0: closed fragments by id, then pairs by
    their fragment ids.
    """
    loft_params = loft_params or LoftParams.from_settings()
    closed = [f for f in drawing.fragments if f.closed]
    pairs = get_pair_source().candidate_pairs(drawing, views, params)

    jobs = [(CLOSED, (f,)) for f in closed]
    for id1, id2 in pairs:
        c1, c2 = drawing.fragment(id1), drawing.fragment(id2)
        jobs.append((PARALLEL, (c1, c2)))
        jobs.append((ANTIPARALLEL, (c1, c2)))
    results = parallel_map(lambda job: _loft_or_none(job, loft_params), jobs, threads)

    candidates = results[:len(closed)]
    for k in range(len(pairs)):
        candidates.append(_selected(results[len(closed) + 2 * k:len(closed) + 2 * k + 2]))

    hypotheses = []
    for result in candidates:
        if result is None:
            continue
        sources = result.fragment_ids
        if result.degenerate or not result.mean_abs_K < params.tau_G:
            log.debug("discarding %s (%s): mean |K| %.4g, degenerate %s",
                      list(sources), result.pairing or CLOSED, result.mean_abs_K, result.degenerate)
            continue
        hypotheses.append(SurfaceHypothesis(
            id=len(hypotheses),
            source_fragment_ids=sources,
            pairing=result.pairing or CLOSED,
            mesh=result.mesh,
            mean_abs_K=result.mean_abs_K,
            degenerate=result.degenerate,
            boundary_deviation=result.boundary_deviation,
        ))
    log.info("formed %d hypotheses from %d closed fragments and %d pairs",
             len(hypotheses), len(closed), len(pairs),
             extra={"stage": "hypothesize", "count": len(hypotheses)})
    return hypotheses


def _obj_name(hypothesis):
    return "hyp_%04d.obj" % hypothesis.id


def save_hypotheses(hypotheses, directory, extra=None):
    """
    Write one OBJ and one metadata JSON per hypothesis plus ``manifest.json``.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for hypothesis in sorted(hypotheses, key=lambda h: h.id):
        obj = directory / _obj_name(hypothesis)
        write_obj(obj, hypothesis.mesh.vertices, hypothesis.mesh.faces)
        metadata = hypothesis.to_dict()
        obj.with_suffix(".json").write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n")
        entry = {k: v for k, v in metadata.items() if k != "boundary_vertices"}
        entry["obj"] = obj.name
        entries.append(entry)
    manifest = {"hypotheses": entries}
    manifest.update(extra or {})
    path = directory / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def load_hypotheses(directory):
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    try:
        manifest = json.loads(manifest_path.read_text())
    except (OSError, ValueError) as e:
        raise DrawingParseError("cannot read hypothesis manifest: %s" % e, path=manifest_path)
    hypotheses = []
    for entry in manifest.get("hypotheses", []):
        obj = directory / entry["obj"]
        metadata = json.loads(obj.with_suffix(".json").read_text())
        mesh = load_quadmesh(obj)
        tags = np.zeros(len(mesh.vertices), dtype=bool)
        tags[np.asarray(metadata.get("boundary_vertices", []), dtype=np.int64)] = True
        hypotheses.append(SurfaceHypothesis(
            id=int(metadata["id"]),
            source_fragment_ids=metadata["source_fragment_ids"],
            pairing=metadata["pairing"],
            mesh=QuadMesh(mesh.vertices, mesh.faces, tags),
            mean_abs_K=float(metadata["mean_abs_K"]),
            status=metadata["status"],
            history=tuple(metadata["history"]),
            degenerate=bool(metadata.get("degenerate", False)),
            boundary_deviation=float(metadata.get("boundary_deviation", 0.0)),
        ))
    return hypotheses
