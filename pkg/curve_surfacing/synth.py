"""
Synthetic scenes with complete ground truth.

A scene is a set of planar polygons. Its feature edges become the curve
drawing, damaged by the configured defects, and its visible feature edges,
seen from a ring of cameras, become the per-view edge maps.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curve_graph import (
    CameraView, CurveDrawing, CurveFragment, EdgeMap, TriMesh, save_cameras, save_drawing, write_obj,
)
from .occlusion import view_samples
from .params import SettingsParams
from .raytrace import get_ray_tracer
from .utils import angle_between, resample_polyline


log = logging.getLogger("curve_surfacing")

SCENES = ("box", "house", "two_chairs")
DEFECT_RATES = ("fragmentation_rate", "gap_rate", "overgroup_rate", "duplicate_rate", "clutter_edge_density")


@dataclass(frozen=True)
class SceneSpec(SettingsParams):
    scene: str = "box"
    n_views: int = 8
    ring_radius: float = None
    elevation: float = 25.0
    image_width: int = 640
    image_height: int = 480
    noise_sigma: float = 0.0
    fragmentation_rate: float = 0.0
    gap_rate: float = 0.0
    overgroup_rate: float = 0.0
    duplicate_rate: float = 0.0
    # expected clutter edges per 100 pixels
    clutter_edge_density: float = 0.0
    rng_seed: int = 0
    feature_angle: float = 30.0
    sample_step: float = 0.01

    setting_names = {
        "feature_angle": "FEATURE_ANGLE",
        "sample_step": "RESAMPLE_STEP",
    }

    def validate(self):
        self.require(self.scene in SCENES, "scene must be one of %s" % ", ".join(SCENES))
        self.require(int(self.n_views) >= 2, "n_views must be >= 2")
        self.require(self.ring_radius is None or self.ring_radius > 0, "ring_radius must be positive")
        self.require(int(self.image_width) > 0 and int(self.image_height) > 0, "image size must be positive")
        self.require(self.noise_sigma >= 0, "noise_sigma must be non-negative")
        for name in DEFECT_RATES:
            self.require(0 <= getattr(self, name) <= 1, "%s must be in [0, 1]" % name)
        self.require(0 < self.feature_angle < 180, "feature_angle must be in (0, 180)")
        self.require(self.sample_step > 0, "sample_step must be positive")


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """
    Everything the generator knows about a scene.

    * :attr:`gt_faces` one entry per planar polygon: id, label and triangle indices
    * :attr:`veridical_fragments` fragment id to the ids of the polygons it bounds
    * :attr:`defects` every injected defect, in injection order
    """
    gt_mesh: TriMesh
    gt_faces: tuple
    veridical_fragments: dict
    defects: tuple = ()
    feature_edges: tuple = field(default=(), repr=False)

    def to_dict(self):
        return {
            "faces": list(self.gt_faces),
            "veridical_fragments": {str(k): list(v) for k, v in sorted(self.veridical_fragments.items())},
            "defects": list(self.defects),
        }


# Scene geometry, as (vertices, polygons) with outward counter-clockwise polygons

def _box(lo, hi):
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    vertices = np.array([[(hi if i & 1 else lo)[0], (hi if i & 2 else lo)[1], (hi if i & 4 else lo)[2]]
                         for i in range(8)])
    polygons = [(0, 2, 3, 1), (4, 5, 7, 6), (0, 1, 5, 4), (2, 6, 7, 3), (0, 4, 6, 2), (1, 3, 7, 5)]
    return vertices, polygons


def _house(width=2.0, depth=1.5, height=1.0, ridge=0.6):
    W, D, H, R = width, depth, height, ridge
    vertices = np.array([
        [0, 0, 0], [W, 0, 0], [W, D, 0], [0, D, 0],
        [0, 0, H], [W, 0, H], [W, D, H], [0, D, H],
        [0, D / 2, H + R], [W, D / 2, H + R],
    ], dtype=float)
    polygons = [
        (0, 3, 2, 1), (0, 1, 5, 4), (3, 7, 6, 2),
        (0, 4, 8, 7, 3), (1, 2, 6, 9, 5),
        (4, 5, 9, 8), (7, 8, 9, 6),
    ]
    return vertices, polygons


def _chair(origin, angle):
    rotation = np.array([[np.cos(angle), -np.sin(angle), 0], [np.sin(angle), np.cos(angle), 0], [0, 0, 1]])
    parts = [_box((0.0, 0.0, 0.4), (0.5, 0.5, 0.45)), _box((0.0, 0.45, 0.45), (0.5, 0.5, 0.9))]
    return [(v @ rotation.T + origin, p) for v, p in parts]


def _merge(parts):
    vertices, polygons, offset = [], [], 0
    for v, p in parts:
        vertices.append(v)
        polygons.extend(tuple(i + offset for i in poly) for poly in p)
        offset += len(v)
    return np.vstack(vertices), polygons


def scene_geometry(scene):
    if scene == "box":
        return _box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
    if scene == "house":
        return _house()
    if scene == "two_chairs":
        return _merge(_chair(np.zeros(3), 0.0) + _chair(np.array([1.0, 0.2, 0.0]), np.radians(-30.0)))
    raise ValueError("unknown scene %r" % scene)


def triangulate_polygons(vertices, polygons):
    """
    Fan-triangulate convex polygons; returns the mesh and the polygon of each triangle.
    """
    triangles, owners = [], []
    for k, poly in enumerate(polygons):
        for i in range(1, len(poly) - 1):
            triangles.append((poly[0], poly[i], poly[i + 1]))
            owners.append(k)
    return TriMesh(vertices, np.asarray(triangles, dtype=np.int64)), np.asarray(owners, dtype=np.int64)


def feature_edges(mesh, polygon_of, feature_angle):
    """
    Chains of mesh edges whose dihedral angle exceeds ``feature_angle`` degrees.

    Chains break at vertices where the feature graph branches, ends or turns
    by more than ``feature_angle``. Returns ``(vertex_chain, closed, polygon_ids)`` triples.
    """
    V, F = np.asarray(mesh.vertices), np.asarray(mesh.faces)
    normals = np.cross(V[F[:, 1]] - V[F[:, 0]], V[F[:, 2]] - V[F[:, 0]])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    incident = {}
    for t, tri in enumerate(F.tolist()):
        for k in range(3):
            incident.setdefault(tuple(sorted((tri[k], tri[(k + 1) % 3]))), []).append(t)
    limit = np.radians(feature_angle)
    sharp = {}
    for edge, tris in incident.items():
        if len(tris) != 2 or angle_between(normals[tris[0]], normals[tris[1]]) > limit:
            sharp[edge] = sorted({int(polygon_of[t]) for t in tris})

    adjacency = {}
    for a, b in sharp:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)

    def stops_at(v, previous):
        nbrs = adjacency[v]
        if len(nbrs) != 2:
            return True
        following = nbrs[0] if nbrs[1] == previous else nbrs[1]
        return angle_between(V[v] - V[previous], V[following] - V[v]) > limit

    visited, chains = set(), []

    def walk(start, first):
        chain = [start, first]
        visited.add(tuple(sorted((start, first))))
        while chain[-1] != start and not stops_at(chain[-1], chain[-2]):
            current, previous = chain[-1], chain[-2]
            following = adjacency[current][0] if adjacency[current][1] == previous else adjacency[current][1]
            key = tuple(sorted((current, following)))
            if key in visited:
                break
            visited.add(key)
            chain.append(following)
        return chain

    for v in sorted(adjacency):
        for w in sorted(adjacency[v]):
            key = tuple(sorted((v, w)))
            if key not in visited and (len(adjacency[v]) != 2 or stops_at(v, w)):
                chains.append(walk(v, w))
    for v in sorted(adjacency):
        for w in sorted(adjacency[v]):
            if tuple(sorted((v, w))) not in visited:
                chains.append(walk(v, w))

    result = []
    for chain in chains:
        closed = len(chain) > 2 and chain[-1] == chain[0]
        vertices = chain[:-1] if closed else chain
        polygons = set()
        for a, b in zip(chain[:-1], chain[1:]):
            polygons.update(sharp[tuple(sorted((a, b)))])
        result.append((np.asarray(vertices), closed, tuple(sorted(polygons))))
    return result


def _sample_chain(points, closed, step):
    length = float(np.linalg.norm(np.diff(np.vstack([points, points[:1]]) if closed else points, axis=0),
                                  axis=1).sum())
    if closed:
        return resample_polyline(points, max(4, int(round(length / step))), closed=True)
    return resample_polyline(points, max(2, int(round(length / step)) + 1))


class _Defects(object):
    """
    Applies the defect toggles to a list of fragments, logging every change.
    """

    def __init__(self, spec, rng, fragments, faces):
        self.spec = spec
        self.rng = rng
        self.fragments = list(fragments)
        self.faces = dict(faces)
        self.log = []
        self.next_id = max((f.id for f in self.fragments), default=-1) + 1

    def _new(self, points, closed, faces):
        fragment = CurveFragment(self.next_id, points, closed)
        self.faces[fragment.id] = tuple(sorted(set(faces)))
        self.next_id += 1
        return fragment

    def _retire(self, *fragments):
        for f in fragments:
            self.faces.pop(f.id, None)

    def overgroup(self):
        tolerance = 1e-9
        out, used = [], set()
        by_id = {f.id: f for f in self.fragments}
        open_ids = sorted(f.id for f in self.fragments if not f.closed)
        for i, a_id in enumerate(open_ids):
            for b_id in open_ids[i + 1:]:
                if a_id in used or b_id in used:
                    continue
                a, b = by_id[a_id], by_id[b_id]
                join = [(ea, eb) for ea in (0, -1) for eb in (0, -1)
                        if np.linalg.norm(a.points[ea] - b.points[eb]) <= tolerance]
                if not join or self.rng.random() >= self.spec.overgroup_rate:
                    continue
                ea, eb = join[0]
                first = a.points if ea == -1 else a.points[::-1]
                second = b.points if eb == 0 else b.points[::-1]
                merged = self._new(np.vstack([first, second[1:]]), False, self.faces[a.id] + self.faces[b.id])
                self.log.append({"type": "overgroup", "fragments": [a.id, b.id], "result": merged.id})
                self._retire(a, b)
                used.update((a_id, b_id))
                out.append(merged)
        self.fragments = [f for f in self.fragments if f.id not in used] + out

    def fragmentation(self):
        out = []
        for f in self.fragments:
            n = len(f)
            if f.closed or n < 4 or self.rng.random() >= self.spec.fragmentation_rate:
                out.append(f)
                continue
            at = int(self.rng.integers(2, n - 1))
            faces = self.faces[f.id]
            pieces = [self._new(f.points[:at], False, faces), self._new(f.points[at - 1:], False, faces)]
            self.log.append({"type": "split", "fragment": f.id, "at": at, "result": [p.id for p in pieces]})
            self._retire(f)
            out.extend(pieces)
        self.fragments = out

    def gaps(self):
        out = []
        for f in self.fragments:
            n = len(f)
            width = max(1, int(round(0.1 * n)))
            if f.closed or n < width + 4 or self.rng.random() >= self.spec.gap_rate:
                out.append(f)
                continue
            start = int(self.rng.integers(2, n - width - 1))
            faces = self.faces[f.id]
            pieces = [
                self._new(f.points[:start], False, faces),
                self._new(f.points[start + width:], False, faces),
            ]
            self.log.append({"type": "gap", "fragment": f.id, "removed": [start, start + width],
                             "result": [p.id for p in pieces]})
            self._retire(f)
            out.extend(pieces)
        self.fragments = out

    def duplicates(self):
        out = list(self.fragments)
        sigma = max(self.spec.noise_sigma, 0.002)
        for f in self.fragments:
            if self.rng.random() >= self.spec.duplicate_rate:
                continue
            jitter = self.rng.normal(0.0, sigma, size=f.points.shape)
            copy = self._new(f.points + jitter, f.closed, self.faces[f.id])
            self.log.append({"type": "duplicate", "fragment": f.id, "result": copy.id, "sigma": sigma})
            out.append(copy)
        self.fragments = out

    def noise(self):
        if self.spec.noise_sigma <= 0:
            return
        self.fragments = [
            f.with_points(f.points + self.rng.normal(0.0, self.spec.noise_sigma, size=f.points.shape))
            for f in self.fragments
        ]
        self.log.append({"type": "noise", "sigma": self.spec.noise_sigma, "fragments": len(self.fragments)})

    def apply(self):
        self.overgroup()
        self.fragmentation()
        self.gaps()
        self.duplicates()
        self.noise()
        return self.fragments, self.faces, self.log


def ring_cameras(spec, center, radius):
    """
    ``n_views`` cameras on a horizontal ring around ``center``, looking at it.
    """
    ring = spec.ring_radius or 3.0 * radius
    elevation = np.radians(spec.elevation)
    half_angle = np.arcsin(min(0.99, radius / ring))
    focal = 0.5 * min(spec.image_width, spec.image_height) / np.tan(half_angle) * 0.9
    views = []
    for k in range(spec.n_views):
        azimuth = 2 * np.pi * k / spec.n_views
        eye = center + ring * np.array([
            np.cos(elevation) * np.cos(azimuth), np.cos(elevation) * np.sin(azimuth), np.sin(elevation),
        ])
        views.append(CameraView.look_at(k, eye, center, focal, spec.image_width, spec.image_height))
    return views


def render_edges(view, chains, tracer, rng, spec):
    """
    Edge map of the visible parts of ``chains`` in ``view`` at one-pixel
    spacing, plus uniform clutter with random orientation.
    """
    positions, orientations = [], []
    for chain in chains:
        samples, projected = view_samples(chain, view)
        if len(samples) < 2:
            continue
        origins = np.repeat(view.camera_center[None], len(samples), axis=0)
        visible = ~tracer.occluded(origins, samples)
        px = projected.pixels
        visible &= (px[:, 0] >= 0) & (px[:, 0] < view.width) & (px[:, 1] >= 0) & (px[:, 1] < view.height)
        positions.append(px[visible])
        orientations.append(projected.tangent_orientations()[visible])
    clutter = int(rng.poisson(spec.clutter_edge_density * view.width * view.height / 100.0))
    if clutter:
        positions.append(rng.random((clutter, 2)) * [view.width, view.height])
        orientations.append(rng.random(clutter) * np.pi)
    if not positions:
        return EdgeMap()
    return EdgeMap(np.vstack(positions), np.concatenate(orientations))


def generate(spec):
    """
    Build the drawing, calibrated views with edge maps, and ground truth of a scene.

    The result is a deterministic function of ``spec``.
    """
    rng = np.random.default_rng(spec.rng_seed)
    vertices, polygons = scene_geometry(spec.scene)
    mesh, polygon_of = triangulate_polygons(vertices, polygons)
    chains = feature_edges(mesh, polygon_of, spec.feature_angle)

    fragments, faces = [], {}
    for k, (chain, closed, polygon_ids) in enumerate(chains):
        fragments.append(CurveFragment(k, _sample_chain(vertices[chain], closed, spec.sample_step), closed))
        faces[k] = polygon_ids
    clean = tuple(fragments)
    fragments, faces, defects = _Defects(spec, rng, fragments, faces).apply()

    center = 0.5 * (vertices.min(axis=0) + vertices.max(axis=0))
    radius = float(np.linalg.norm(vertices - center, axis=1).max())
    views = ring_cameras(spec, center, radius)
    tracer = get_ray_tracer([(0, mesh)])
    views = [view.with_edges(render_edges(view, clean, tracer, rng, spec)) for view in views]

    gt_faces = tuple(
        {"id": k, "label": "planar", "polygon": list(map(int, poly)),
         "triangles": np.flatnonzero(polygon_of == k).tolist()}
        for k, poly in enumerate(polygons)
    )
    truth = GroundTruth(mesh, gt_faces, faces, tuple(defects), clean)
    log.info("generated %s scene: %d fragments, %d views, %d defects",
             spec.scene, len(fragments), len(views), len(defects),
             extra={"stage": "synth", "count": len(fragments)})
    return CurveDrawing(fragments), views, truth


def write_scene(directory, drawing, views, truth, spec=None):
    """
    Write ``drawing.json``, ``cameras.json`` with per-view edge CSVs, ``gt.obj`` and ``gt.json``.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_drawing(drawing, directory / "drawing.json")
    save_cameras(views, directory / "cameras.json", directory / "edges")
    write_obj(directory / "gt.obj", truth.gt_mesh.vertices, truth.gt_mesh.faces)
    data = truth.to_dict()
    if spec is not None:
        data["spec"] = spec.to_dict()
    (directory / "gt.json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return directory
