"""
Data model for 3D curve drawings, calibrated views, edge maps and meshes.

All containers are immutable: numpy buffers are flagged read-only and
dataclasses are frozen, so instances may be shared between workers.
Modifications go through ``replace``-style helpers returning new objects.
"""
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .exceptions import DrawingParseError, DrawingValidationError, EmptyProjectionError
from .settings import surfacing_settings


log = logging.getLogger("curve_surfacing")

MIN_POINT_SEPARATION = 1e-9
START = "start"
END = "end"


def _frozen_array(values, dtype=float, shape_tail=None):
    arr = np.array(values, dtype=dtype, copy=True)
    if shape_tail is not None:
        arr = arr.reshape((-1,) + shape_tail)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CurveFragment:
    """
    A 3D polyline. Closed fragments do not repeat their first point.

    Fields:

    * :attr:`id` Unique id within a drawing
    * :attr:`points` ``(n, 3)`` array of samples, meters
    * :attr:`closed` Whether the last sample connects back to the first
    """
    id: int
    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "points", _frozen_array(self.points, shape_tail=(3,)))
        object.__setattr__(self, "closed", bool(self.closed))

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return "CurveFragment(id=%d, n=%d, closed=%s)" % (self.id, len(self), self.closed)

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    def endpoint(self, flag):
        return self.points[-1] if flag == END else self.points[0]

    def segment_lengths(self):
        pts = self.points
        if self.closed:
            pts = np.vstack([pts, pts[:1]])
        return np.linalg.norm(np.diff(pts, axis=0), axis=1)

    def with_points(self, points, closed=None, id=None):
        return replace(
            self,
            points=points,
            closed=self.closed if closed is None else closed,
            id=self.id if id is None else id,
        )

    def reversed(self):
        return self.with_points(self.points[::-1])

    def validate(self):
        if len(self.points) < 2:
            raise DrawingValidationError("needs at least 2 points, got %d" % len(self.points), self.id)
        if not np.all(np.isfinite(self.points)):
            raise DrawingValidationError("non-finite coordinates", self.id)
        gaps = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        if np.any(gaps <= MIN_POINT_SEPARATION):
            raise DrawingValidationError("consecutive points coincide", self.id)
        if self.closed and np.linalg.norm(self.points[0] - self.points[-1]) <= MIN_POINT_SEPARATION:
            raise DrawingValidationError("closed fragment repeats its first point", self.id)


@dataclass(frozen=True, eq=False)
class Node:
    """
    A junction: the endpoints listed in :attr:`incident` as
    ``(fragment id, "start" | "end")`` pairs meet at :attr:`point`.
    """
    point: np.ndarray
    incident: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "point", _frozen_array(self.point).reshape(3))
        object.__setattr__(self, "incident", tuple((int(i), str(f)) for i, f in self.incident))

    @property
    def degree(self):
        return len(self.incident)


def build_nodes(fragments, tolerance=None):
    """
    Cluster open-fragment endpoints closer than ``tolerance`` into junction
    nodes. Clusters of a single endpoint are not nodes.
    """
    if tolerance is None:
        tolerance = surfacing_settings.NODE_MERGE_TOLERANCE
    keys, points = [], []
    for fragment in sorted(fragments, key=lambda f: f.id):
        if fragment.closed:
            continue
        keys.append((fragment.id, START))
        points.append(fragment.start)
        keys.append((fragment.id, END))
        points.append(fragment.end)
    if not keys:
        return ()

    points = np.asarray(points)
    pairs = cKDTree(points).query_pairs(tolerance, output_type="ndarray")
    n = len(points)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    count, labels = connected_components(graph, directed=False)

    nodes = []
    for label in range(count):
        members = np.flatnonzero(labels == label)
        if len(members) < 2:
            continue
        nodes.append(Node(points[members[0]], [keys[m] for m in members]))
    nodes.sort(key=lambda node: node.incident)
    return tuple(nodes)


@dataclass(frozen=True, eq=False)
class CurveDrawing:
    """
    A graph of curve fragments (links) meeting at junction nodes.
    """
    fragments: tuple = ()
    nodes: tuple = None

    def __post_init__(self):
        fragments = tuple(sorted(self.fragments, key=lambda f: f.id))
        object.__setattr__(self, "fragments", fragments)
        if self.nodes is None:
            object.__setattr__(self, "nodes", build_nodes(fragments))
        else:
            object.__setattr__(self, "nodes", tuple(self.nodes))

    def __len__(self):
        return len(self.fragments)

    def __iter__(self):
        return iter(self.fragments)

    @property
    def by_id(self):
        return {f.id: f for f in self.fragments}

    def fragment(self, fragment_id):
        for f in self.fragments:
            if f.id == fragment_id:
                return f
        raise KeyError(fragment_id)

    def next_id(self):
        return max((f.id for f in self.fragments), default=-1) + 1

    def with_fragments(self, fragments):
        """
        Return a new drawing with ``fragments``; nodes are rebuilt.
        """
        return CurveDrawing(tuple(fragments))

    def validate(self, tolerance=None):
        if tolerance is None:
            tolerance = surfacing_settings.NODE_MERGE_TOLERANCE
        seen = set()
        for fragment in self.fragments:
            if fragment.id in seen:
                raise DrawingValidationError("duplicated id", fragment.id)
            seen.add(fragment.id)
            fragment.validate()
        lookup = self.by_id
        for node in self.nodes:
            for fragment_id, flag in node.incident:
                if fragment_id not in lookup:
                    raise DrawingValidationError("node references unknown fragment", fragment_id)
                if flag not in (START, END):
                    raise DrawingValidationError("bad endpoint flag %r" % flag, fragment_id)
                fragment = lookup[fragment_id]
                if np.linalg.norm(fragment.endpoint(flag) - node.point) > tolerance:
                    raise DrawingValidationError("endpoint is away from its node", fragment_id)
        return self


def arclength(fragment):
    """
    Total length of the polyline, including the closing segment of closed fragments.
    """
    return float(np.sum(fragment.segment_lengths()))


def cumulative_arclength(fragment):
    """
    Arclength at each sample, starting at 0 (the closing segment is not included).
    """
    gaps = np.linalg.norm(np.diff(fragment.points, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(gaps)])


@dataclass(frozen=True, eq=False)
class EdgeElement:
    position: tuple
    orientation: float
    strength: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "orientation", float(np.mod(self.orientation, np.pi)))


@dataclass(frozen=True, eq=False)
class EdgeMap:
    """
    Oriented 2D edge elements of one view, stored column-wise.

    Orientations are undirected and normalized into ``[0, pi)``.
    """
    positions: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    orientations: np.ndarray = field(default_factory=lambda: np.zeros(0))
    strengths: np.ndarray = None

    def __post_init__(self):
        positions = _frozen_array(self.positions, shape_tail=(2,))
        orientations = np.mod(np.asarray(self.orientations, dtype=float).reshape(-1), np.pi)
        orientations[orientations >= np.pi] = 0.0
        strengths = np.ones(len(positions)) if self.strengths is None else self.strengths
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "orientations", _frozen_array(orientations))
        object.__setattr__(self, "strengths", _frozen_array(strengths).reshape(-1))
        if not (len(self.positions) == len(self.orientations) == len(self.strengths)):
            raise ValueError("edge map columns differ in length")
        if np.any(self.strengths < 0):
            raise ValueError("edge strengths must be non-negative")

    def __len__(self):
        return len(self.positions)

    @classmethod
    def from_elements(cls, elements):
        elements = list(elements)
        if not elements:
            return cls()
        return cls(
            [e.position for e in elements],
            [e.orientation for e in elements],
            [e.strength for e in elements],
        )

    def elements(self):
        for p, o, s in zip(self.positions, self.orientations, self.strengths):
            yield EdgeElement(tuple(p), o, s)

    def tree(self):
        return cKDTree(self.positions) if len(self) else None


def camera_center_of(projection):
    """
    Right null space of the 3x4 projection matrix, dehomogenized.
    """
    _, _, vt = np.linalg.svd(projection)
    c = vt[-1]
    if abs(c[3]) < 1e-15:
        raise ValueError("camera at infinity is not supported")
    return c[:3] / c[3]


@dataclass(frozen=True, eq=False)
class CameraView:
    """
    A calibrated pinhole view.

    Fields:

    * :attr:`projection` ``3x4`` matrix mapping homogeneous world points to pixels
    * :attr:`width`, :attr:`height` Image size in pixels
    * :attr:`camera_center` World position of the optical center
    * :attr:`edges` The :class:`EdgeMap` observed in this view
    """
    id: int
    projection: np.ndarray
    width: int
    height: int
    edges: EdgeMap = field(default_factory=EdgeMap)
    camera_center: np.ndarray = None

    def __post_init__(self):
        projection = _frozen_array(self.projection).reshape(3, 4)
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "projection", projection)
        center = camera_center_of(projection) if self.camera_center is None else self.camera_center
        object.__setattr__(self, "camera_center", _frozen_array(center).reshape(3))
        residual = projection @ np.append(self.camera_center, 1.0)
        if np.linalg.norm(residual) > 1e-8 * max(1.0, np.linalg.norm(projection)) * max(
                1.0, np.linalg.norm(self.camera_center)):
            raise ValueError("camera_center is not the null space of the projection")
        # sign of det(M) orients the depth axis
        object.__setattr__(self, "_depth_sign", float(np.sign(np.linalg.det(projection[:, :3])) or 1.0))
        object.__setattr__(self, "_depth_scale", float(np.linalg.norm(projection[2, :3])))

    @classmethod
    def from_krt(cls, id, K, R, t, width, height, edges=None):
        projection = np.asarray(K, dtype=float) @ np.hstack([np.asarray(R, dtype=float),
                                                             np.asarray(t, dtype=float).reshape(3, 1)])
        return cls(id, projection, width, height, edges if edges is not None else EdgeMap())

    @classmethod
    def look_at(cls, id, eye, target, focal, width, height, up=(0.0, 0.0, 1.0), edges=None):
        eye = np.asarray(eye, dtype=float)
        forward = np.asarray(target, dtype=float) - eye
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, up)
        if np.linalg.norm(right) < 1e-12:
            right = np.cross(forward, (0.0, 1.0, 0.0))
        right /= np.linalg.norm(right)
        down = np.cross(forward, right)
        R = np.vstack([right, down, forward])
        K = np.array([[focal, 0.0, width / 2.0], [0.0, focal, height / 2.0], [0.0, 0.0, 1.0]])
        return cls.from_krt(id, K, R, -R @ eye, width, height, edges)

    def with_edges(self, edges):
        return replace(self, edges=edges)

    def depth(self, points):
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        w = points @ self.projection[2, :3] + self.projection[2, 3]
        return w * self._depth_sign / self._depth_scale

    def project(self, points):
        """
        Pixel coordinates of ``points``; rows with non-positive depth are NaN.
        """
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        homogeneous = points @ self.projection[:, :3].T + self.projection[:, 3]
        depth = homogeneous[:, 2] * self._depth_sign
        pixels = np.full((len(points), 2), np.nan)
        front = depth > 0
        pixels[front] = homogeneous[front, :2] / homogeneous[front, 2:3]
        return pixels


@dataclass(frozen=True, eq=False)
class ProjectedCurve:
    """
    Image projection of a fragment in one view.

    * :attr:`pixels` ``(m, 2)`` positions of the samples in front of the camera
    * :attr:`indices` Sample indices into the source fragment
    * :attr:`s` Arclength of each kept sample along the 3D fragment, meters
    * :attr:`s_pixels` Cumulative pixel arclength along the kept samples
    * :attr:`clipped` Indices of samples behind the camera
    """
    fragment_id: int
    view_id: int
    pixels: np.ndarray
    indices: np.ndarray
    s: np.ndarray
    s_pixels: np.ndarray
    clipped: np.ndarray

    def __len__(self):
        return len(self.pixels)

    @property
    def pixel_length(self):
        return float(self.s_pixels[-1]) if len(self.s_pixels) else 0.0

    def tangent_orientations(self):
        """
        Undirected tangent orientation at each sample, in ``[0, pi)``.
        """
        if len(self.pixels) < 2:
            return np.zeros(len(self.pixels))
        d = np.gradient(self.pixels, axis=0)
        return np.mod(np.arctan2(d[:, 1], d[:, 0]), np.pi)


def project_curve(fragment, view):
    depth = view.depth(fragment.points)
    front = depth > 0
    if not np.any(front):
        raise EmptyProjectionError("fragment %d is behind view %d" % (fragment.id, view.id))
    clipped = np.flatnonzero(~front)
    if len(clipped):
        log.debug("fragment %d: %d samples clipped in view %d", fragment.id, len(clipped), view.id)
    indices = np.flatnonzero(front)
    pixels = view.project(fragment.points[indices])
    gaps = np.linalg.norm(np.diff(pixels, axis=0), axis=1)
    return ProjectedCurve(
        fragment_id=fragment.id,
        view_id=view.id,
        pixels=pixels,
        indices=indices,
        s=cumulative_arclength(fragment)[indices],
        s_pixels=np.concatenate([[0.0], np.cumsum(gaps)]),
        clipped=clipped,
    )


@dataclass(frozen=True, eq=False)
class TriMesh:
    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen_array(self.vertices, shape_tail=(3,)))
        object.__setattr__(self, "faces", _frozen_array(self.faces, dtype=np.int64, shape_tail=(3,)))
        if len(self.faces) and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise ValueError("face index out of range")

    def triangles(self):
        return self.vertices[self.faces]

    def face_areas(self):
        tri = self.triangles()
        return 0.5 * np.linalg.norm(np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1)

    def area(self):
        return float(np.sum(self.face_areas()))

    def drop_degenerate(self, tolerance=1e-12):
        keep = self.face_areas() > tolerance
        return TriMesh(self.vertices, self.faces[keep])

    def transformed(self, rotation=None, translation=None, scale=1.0):
        v = self.vertices * scale
        if rotation is not None:
            v = v @ np.asarray(rotation).T
        if translation is not None:
            v = v + translation
        return TriMesh(v, self.faces)

    @staticmethod
    def concatenate(meshes):
        meshes = list(meshes)
        if not meshes:
            return TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
        offsets = np.cumsum([0] + [len(m.vertices) for m in meshes[:-1]])
        return TriMesh(
            np.vstack([m.vertices for m in meshes]),
            np.vstack([m.faces + o for m, o in zip(meshes, offsets)]),
        )


@dataclass(frozen=True, eq=False)
class QuadMesh:
    """
    Indexed quad mesh; :attr:`boundary_tags` is True for vertices on an input curve.
    """
    vertices: np.ndarray
    faces: np.ndarray
    boundary_tags: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen_array(self.vertices, shape_tail=(3,)))
        object.__setattr__(self, "faces", _frozen_array(self.faces, dtype=np.int64, shape_tail=(4,)))
        tags = np.zeros(len(self.vertices), dtype=bool) if self.boundary_tags is None else self.boundary_tags
        object.__setattr__(self, "boundary_tags", _frozen_array(tags, dtype=bool).reshape(-1))
        if len(self.boundary_tags) != len(self.vertices):
            raise ValueError("boundary_tags must have one entry per vertex")
        if len(self.faces):
            if self.faces.min() < 0 or self.faces.max() >= len(self.vertices):
                raise ValueError("face index out of range")
            if any(len(set(face)) != 4 for face in self.faces.tolist()):
                raise ValueError("degenerate quad face")

    def with_vertices(self, vertices):
        return QuadMesh(vertices, self.faces, self.boundary_tags)

    def triangulate(self):
        f = self.faces
        # quad i maps to triangles 2i and 2i+1
        tri = np.empty((2 * len(f), 3), dtype=np.int64)
        tri[0::2] = f[:, [0, 1, 2]]
        tri[1::2] = f[:, [0, 2, 3]]
        return TriMesh(self.vertices, tri)

    def edges(self):
        """
        Unique undirected edges as a sorted ``(e, 2)`` array.
        """
        f = self.faces
        e = np.vstack([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 3]], f[:, [3, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def transformed(self, rotation=None, translation=None, scale=1.0):
        v = self.vertices * scale
        if rotation is not None:
            v = v @ np.asarray(rotation).T
        if translation is not None:
            v = v + translation
        return self.with_vertices(v)


# Serialization

def _load_json(path):
    path = Path(path)
    try:
        with path.open() as fp:
            return json.load(fp)
    except json.JSONDecodeError as e:
        raise DrawingParseError(e.msg, path=path, line=e.lineno)


def _require(record, key, path, where):
    try:
        return record[key]
    except (KeyError, TypeError):
        raise DrawingParseError("missing field", path=path, field="%s.%s" % (where, key))


def _fragment_id(value, path, field):
    if isinstance(value, bool) or not isinstance(value, int):
        raise DrawingParseError("id must be an integer, got %r" % (value,), path=path, field=field)
    return value


def _node(record, path, where):
    point = _require(record, "point", path, where)
    incident = _require(record, "incident", path, where)
    try:
        return Node(point, incident)
    except (ValueError, TypeError):
        raise DrawingParseError("node must have a 3D point and (id, end) pairs", path=path, field=where)


def drawing_to_dict(drawing, include_nodes=True):
    data = {
        "fragments": [
            {"id": f.id, "closed": f.closed, "points": f.points.tolist()}
            for f in drawing.fragments
        ],
    }
    if include_nodes:
        data["nodes"] = [
            {"point": n.point.tolist(), "incident": [list(i) for i in n.incident]}
            for n in drawing.nodes
        ]
    return data


def drawing_from_dict(data, path=None):
    fragments = []
    for index, record in enumerate(_require(data, "fragments", path, "drawing")):
        where = "fragments[%d]" % index
        try:
            points = np.asarray(_require(record, "points", path, where), dtype=float)
        except ValueError:
            raise DrawingParseError("points must be numbers", path=path, field=where + ".points")
        if points.ndim != 2 or points.shape[1] != 3:
            if points.size == 3:
                points = points.reshape(1, 3)
            else:
                raise DrawingParseError("points must be [[x, y, z], ...]", path=path, field=where + ".points")
        fragments.append(CurveFragment(
            _fragment_id(_require(record, "id", path, where), path, where + ".id"), points,
            bool(record.get("closed", False)),
        ))
    nodes = None
    if data.get("nodes") is not None:
        nodes = [_node(n, path, "nodes[%d]" % i) for i, n in enumerate(data["nodes"])]
    drawing = CurveDrawing(tuple(fragments), nodes)
    return drawing.validate()


def load_drawing(path):
    """
    Read and validate a drawing JSON file. Nodes are rebuilt when absent.
    """
    return drawing_from_dict(_load_json(path), path=path)


def save_drawing(drawing, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fp:
        # json writes float repr, which round-trips exactly
        json.dump(drawing_to_dict(drawing), fp)
    return path


EDGE_HEADER = "x,y,theta,strength"


def save_edge_map(edges, path):
    path = Path(path)
    with path.open("w") as fp:
        fp.write(EDGE_HEADER + "\n")
        for e in edges.elements():
            fp.write("%r,%r,%r,%r\n" % (float(e.position[0]), float(e.position[1]), e.orientation,
                                          float(e.strength)))
    return path


def _edge_element(line, path, lineno):
    fields = line.split(",")
    if len(fields) != 4:
        raise DrawingParseError("expected 4 columns, got %d" % len(fields), path=path, line=lineno)
    try:
        x, y, theta, strength = (float(f) for f in fields)
    except ValueError as e:
        raise DrawingParseError(str(e), path=path, line=lineno)
    if not np.all(np.isfinite([x, y, theta, strength])):
        raise DrawingParseError("non-finite value", path=path, line=lineno)
    if strength < 0:
        raise DrawingParseError("negative strength", path=path, line=lineno, field="strength")
    return EdgeElement((x, y), theta, strength)


def load_edge_map(path):
    """
    Read a CSV edge map; malformed rows are reported with their line number.
    """
    path = Path(path)
    with path.open() as fp:
        header = fp.readline().strip()
        if header.replace(" ", "") != EDGE_HEADER:
            raise DrawingParseError("bad edge map header %r" % header, path=path, line=1)
        elements = [
            _edge_element(line.strip(), path, lineno)
            for lineno, line in enumerate(fp, start=2) if line.strip()
        ]
    return EdgeMap.from_elements(elements)


def save_cameras(views, path, edges_dir=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    edges_dir = Path(edges_dir) if edges_dir is not None else path.parent / "edges"
    edges_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for view in views:
        edges_path = edges_dir / ("view_%03d.csv" % view.id)
        save_edge_map(view.edges, edges_path)
        records.append({
            "id": view.id,
            "P": view.projection.tolist(),
            "width": view.width,
            "height": view.height,
            "edges_path": str(edges_path.relative_to(path.parent)) if edges_path.is_relative_to(path.parent)
            else str(edges_path),
        })
    with path.open("w") as fp:
        json.dump({"views": records}, fp)
    return path


def load_cameras(path):
    path = Path(path)
    data = _load_json(path)
    views = []
    for index, record in enumerate(_require(data, "views", path, "cameras")):
        where = "views[%d]" % index
        edges = EdgeMap()
        edges_path = record.get("edges_path")
        if edges_path:
            edges_path = Path(edges_path)
            if not edges_path.is_absolute():
                edges_path = path.parent / edges_path
            edges = load_edge_map(edges_path)
        try:
            view = CameraView(
                _require(record, "id", path, where),
                np.asarray(_require(record, "P", path, where), dtype=float),
                int(_require(record, "width", path, where)),
                int(_require(record, "height", path, where)),
                edges,
            )
        except ValueError as e:
            raise DrawingParseError(str(e), path=path, field=where + ".P")
        views.append(view)
    return views


def write_obj(path, vertices, faces):
    """
    Write a Wavefront OBJ; faces may be triangles or quads.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["v %.17g %.17g %.17g" % tuple(v) for v in np.asarray(vertices).tolist()]
    lines += ["f " + " ".join(str(i + 1) for i in face) for face in np.asarray(faces).tolist()]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_obj(path):
    """
    Read vertices and faces from an OBJ file, ignoring texture and normal indices.
    """
    path = Path(path)
    vertices, faces = [], []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        try:
            if parts[0] == "v":
                vertices.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(p.split("/")[0]) - 1 for p in parts[1:]])
        except ValueError:
            raise DrawingParseError("malformed OBJ record", path=path, line=lineno)
    return np.asarray(vertices, dtype=float).reshape(-1, 3), faces


def load_trimesh(path):
    vertices, faces = read_obj(path)
    triangles = []
    for face in faces:
        for i in range(1, len(face) - 1):
            triangles.append([face[0], face[i], face[i + 1]])
    return TriMesh(vertices, np.asarray(triangles, dtype=np.int64).reshape(-1, 3))


def load_quadmesh(path):
    vertices, faces = read_obj(path)
    if any(len(f) != 4 for f in faces):
        raise DrawingParseError("expected quad faces only", path=path)
    return QuadMesh(vertices, np.asarray(faces, dtype=np.int64).reshape(-1, 4))
