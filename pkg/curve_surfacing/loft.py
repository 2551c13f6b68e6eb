"""
Lofting: from a closed boundary loop to a smooth quad mesh.

The loop is quadrangulated into a base mesh (skinning), the interior of the
base mesh is faired against a thin-plate proxy energy and the result is
refined with Catmull-Clark subdivision.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu
from scipy.spatial import cKDTree

from .curve_graph import QuadMesh, _frozen_array, write_obj
from .exceptions import DegenerateLoopError, LoftError, NonManifoldError, SolverError
from .geometry import triangles_intersect
from .params import SettingsParams
from .utils import point_polyline_distance, resample_polyline


log = logging.getLogger("curve_surfacing")

PARALLEL = "parallel"
ANTIPARALLEL = "antiparallel"
PAIRINGS = (PARALLEL, ANTIPARALLEL)

LOOP_TOLERANCE = 1e-9
# adjacent faces whose normals are closer to opposite than this fold onto each other
FOLD_COSINE = -0.9


@dataclass(frozen=True)
class LoftParams(SettingsParams):
    rows: Optional[int] = None
    subdiv_levels: int = 2
    fairing_tolerance: float = 1e-10
    fairing_max_iterations: int = 20000
    fairing_clamp: bool = True
    max_rows: int = 32
    max_columns: int = 24
    resample_step: float = 0.01

    setting_names = {
        "rows": "LOFT_ROWS",
        "subdiv_levels": "SUBDIV_LEVELS",
        "fairing_tolerance": "FAIRING_TOLERANCE",
        "fairing_max_iterations": "FAIRING_MAX_ITERATIONS",
        "fairing_clamp": "FAIRING_CLAMP",
        "max_rows": "LOFT_MAX_ROWS",
        "max_columns": "LOFT_MAX_COLUMNS",
        "resample_step": "RESAMPLE_STEP",
    }

    def validate(self):
        self.require(self.rows is None or int(self.rows) >= 1, "rows must be >= 1")
        self.require(0 <= int(self.subdiv_levels) <= 4, "subdiv_levels must be in [0, 4]")
        self.require(self.fairing_tolerance > 0, "fairing_tolerance must be positive")
        self.require(int(self.fairing_max_iterations) >= 1, "fairing_max_iterations must be >= 1")
        self.require(int(self.max_rows) >= 1, "max_rows must be >= 1")
        self.require(int(self.max_columns) >= 2, "max_columns must be >= 2")
        self.require(self.resample_step > 0, "resample_step must be positive")

    def rows_for(self, distance):
        if self.rows is not None:
            return int(self.rows)
        return int(np.clip(round(distance / self.resample_step), 1, self.max_rows))


@dataclass(frozen=True, eq=False)
class BoundaryLoop:
    """
    A closed loop given as consecutive sides.

    Each side ends where the next one starts. ``rails`` holds the two input
    curves for two-rail loops, both oriented so that sample ``i`` of one faces
    sample ``i`` of the other; it is None for loops made from a closed curve.
    """
    sides: tuple
    rails: Optional[tuple] = None

    def __post_init__(self):
        sides = tuple(_frozen_array(s, shape_tail=(3,)) for s in self.sides)
        object.__setattr__(self, "sides", sides)
        if self.rails is not None:
            object.__setattr__(self, "rails", tuple(_frozen_array(r, shape_tail=(3,)) for r in self.rails))
        if not sides:
            raise DegenerateLoopError("a loop needs at least one side")
        for i, side in enumerate(sides):
            if len(side) < 2:
                raise DegenerateLoopError("side %d has fewer than 2 points" % i)
            following = sides[(i + 1) % len(sides)]
            if np.linalg.norm(side[-1] - following[0]) > LOOP_TOLERANCE:
                raise DegenerateLoopError(
                    "side %d does not end where side %d starts" % (i, (i + 1) % len(sides))
                )
        if len(np.unique(np.round(self.points / LOOP_TOLERANCE), axis=0)) < 3:
            raise DegenerateLoopError("a loop needs at least 3 distinct points")

    @property
    def points(self):
        """
        Loop samples in traversal order, without repeating the first point.
        """
        pieces = [
            s[:-1] for s in self.sides
            if np.linalg.norm(np.diff(s, axis=0), axis=1).sum() > LOOP_TOLERANCE
        ]
        if not pieces:
            return self.sides[0][:1]
        return np.vstack(pieces)

    @property
    def length(self):
        pts = self.points
        return float(np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1).sum())


@dataclass(frozen=True, eq=False)
class LoftResult:
    mesh: QuadMesh
    base_mesh: QuadMesh
    boundary_deviation: float
    mean_abs_K: float
    degenerate: bool
    fragment_ids: tuple = ()
    pairing: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        data = {
            "boundary_deviation": self.boundary_deviation,
            "mean_abs_K": self.mean_abs_K,
            "degenerate": bool(self.degenerate),
            "fragment_ids": [int(i) for i in self.fragment_ids],
            "pairing": self.pairing,
            "vertices": int(len(self.mesh.vertices)),
            "faces": int(len(self.mesh.faces)),
        }
        data.update(self.extra)
        return data


def _bridge(a, b):
    return np.vstack([a, b])


def make_loop(c1, c2, pairing):
    """
    Join two open fragments with two straight bridges.

    ``parallel`` joins start to start and end to end, so the loop runs along
    ``c1``, bridges ``c1.end -> c2.end``, runs back along ``c2`` and bridges
    ``c2.start -> c1.start``. ``antiparallel`` joins ``c1.end -> c2.start``
    and traverses ``c2`` forwards.
    """
    if pairing not in PAIRINGS:
        raise ValueError("pairing must be one of %s" % ", ".join(PAIRINGS))
    for c in (c1, c2):
        if c.closed:
            raise LoftError("fragment %d is closed; use loft_closed" % c.id)
        if len(c) < 2:
            raise LoftError("fragment %d has fewer than 2 points" % c.id)

    a = np.asarray(c1.points)
    b = np.asarray(c2.points) if pairing == PARALLEL else np.asarray(c2.points)[::-1]
    if len(a) == len(b) and np.all(np.linalg.norm(a - b, axis=1) <= LOOP_TOLERANCE):
        raise DegenerateLoopError("fragments %d and %d coincide under %s pairing" % (c1.id, c2.id, pairing))
    sides = (a, _bridge(a[-1], b[-1]), b[::-1], _bridge(b[0], a[0]))
    return BoundaryLoop(sides, rails=(a, b))


def coons_patch(bottom, top, left, right):
    """
    Discrete transfinite interpolation of four boundary curves.

    ``bottom`` and ``top`` have ``n`` samples, ``left`` and ``right`` have
    ``m`` samples, and the corners must agree. Returns an ``(m, n, 3)`` grid
    whose row 0 is ``bottom`` and row ``m - 1`` is ``top``.
    """
    bottom, top, left, right = (np.asarray(x, dtype=float) for x in (bottom, top, left, right))
    n, m = len(bottom), len(left)
    u = np.linspace(0.0, 1.0, n)[None, :, None]
    v = np.linspace(0.0, 1.0, m)[:, None, None]
    ruled_uv = (1 - v) * bottom[None] + v * top[None]
    ruled_vu = (1 - u) * left[:, None] + u * right[:, None]
    corners = (
        (1 - u) * (1 - v) * bottom[0] + u * (1 - v) * bottom[-1]
        + (1 - u) * v * top[0] + u * v * top[-1]
    )
    grid = ruled_uv + ruled_vu - corners
    grid[0] = bottom
    grid[-1] = top
    grid[:, 0] = left
    grid[:, -1] = right
    return grid


def _advance(chain, next_chain, cyclic=False):
    """
    Quads of one chain advance: the layer between ``chain`` and ``next_chain``.
    """
    k = len(chain) if cyclic else len(chain) - 1
    i = np.arange(k)
    j = (i + 1) % len(chain)
    return np.column_stack([chain[i], chain[j], next_chain[j], next_chain[i]])


def _skin_rails(loop, params):
    a, b = loop.rails
    n = int(np.clip(max(len(a), len(b)), 2, params.max_columns))
    a = resample_polyline(a, n) if len(a) != n else np.asarray(a)
    b = resample_polyline(b, n) if len(b) != n else np.asarray(b)
    rows = params.rows_for(float(np.mean(np.linalg.norm(a - b, axis=1))))
    left = np.linspace(a[0], b[0], rows + 1)
    right = np.linspace(a[-1], b[-1], rows + 1)
    grid = coons_patch(a, b, left, right)

    index = np.arange((rows + 1) * n).reshape(rows + 1, n)
    faces = [_advance(index[r], index[r + 1]) for r in range(rows)]
    tags = np.zeros((rows + 1, n), dtype=bool)
    tags[0] = tags[-1] = True
    tags[:, 0] = tags[:, -1] = True
    return QuadMesh(grid.reshape(-1, 3), np.vstack(faces), tags.reshape(-1))


def _skin_closed(loop, params):
    points = loop.points
    count = int(np.clip(round(loop.length / params.resample_step), 4, 2 * params.max_columns))
    count += count % 2
    ring = resample_polyline(points, count, closed=True)
    center = ring.mean(axis=0)
    radius = float(np.mean(np.linalg.norm(ring - center, axis=1)))
    rings = params.rows_for(radius)

    vertices = [ring]
    faces = []
    index = np.arange(count)
    for k in range(1, rings):
        vertices.append(center + (1.0 - k / rings) * (ring - center))
        next_index = index + count
        faces.append(_advance(index, next_index, cyclic=True))
        index = next_index
    c = index[-1] + 1
    vertices.append(center[None])
    j = np.arange(0, count, 2)
    # pure-quad cap: every other ring vertex spans a quad with the center
    faces.append(np.column_stack([
        np.full(len(j), c), index[j], index[(j + 1) % count], index[(j + 2) % count]
    ]))

    tags = np.zeros(c + 1, dtype=bool)
    tags[:count] = True
    return QuadMesh(np.vstack(vertices), np.vstack(faces), tags)


def skin(loop, params):
    """
    Quadrangulate a loop into a base mesh by repeated chain advance.

    Two-rail loops grow an ``n x (rows + 1)`` grid from one rail to the other
    with Coons interpolation for the interior. Other loops shrink rings
    towards the centroid and close with a cap of quads.
    """
    if len(loop.points) < 4:
        raise LoftError("loop has %d samples; at least 4 are needed to quadrangulate" % len(loop.points))
    if loop.rails is not None:
        mesh = _skin_rails(loop, params)
    else:
        mesh = _skin_closed(loop, params)
    log.debug("skinned loop into %d quads", len(mesh.faces))
    return mesh


def edge_face_counts(faces):
    """
    Unique edges of a polygon mesh, the edge index of every half-edge and
    the number of faces on each edge.
    """
    faces = np.asarray(faces)
    k = faces.shape[1]
    tail = faces.reshape(-1)
    head = np.roll(faces, -1, axis=1).reshape(-1)
    edges, inverse = np.unique(np.sort(np.column_stack([tail, head]), axis=1), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    counts = np.bincount(inverse, minlength=len(edges))
    return edges, inverse.reshape(-1, k), counts


def _boundary_neighbors(n, edges, counts):
    boundary = edges[counts == 1]
    rows = np.concatenate([boundary[:, 0], boundary[:, 1]])
    cols = np.concatenate([boundary[:, 1], boundary[:, 0]])
    return sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))


def umbrella_operator(mesh):
    """
    Uniform umbrella Laplacian ``L`` with ``(L x)_v = mean(neighbors) - x_v``.

    Vertices on the mesh border average their two border neighbors only, so
    a straight evenly sampled border is in the kernel.
    """
    n = len(mesh.vertices)
    edges, _, counts = edge_face_counts(mesh.faces)
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    adjacency = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    adjacency.data[:] = 1.0
    border = _boundary_neighbors(n, edges, counts)
    border.data[:] = 1.0
    on_border = np.asarray(border.sum(axis=1)).ravel() > 0
    weights = (sparse.diags(on_border.astype(float)) @ border
               + sparse.diags((~on_border).astype(float)) @ adjacency)
    degree = np.asarray(weights.sum(axis=1)).ravel()
    inv = np.divide(1.0, degree, out=np.zeros(n), where=degree > 0)
    return (sparse.diags(inv) @ weights - sparse.diags((degree > 0).astype(float))).tocsr()


def fixed_vertices(mesh, clamp=False):
    """
    Vertices fairing must not move: the tagged boundary, or the border
    when nothing is tagged, plus their neighbors when ``clamp`` is set.
    """
    edges, _, counts = edge_face_counts(mesh.faces)
    if mesh.boundary_tags.any():
        fixed = np.array(mesh.boundary_tags, dtype=bool)
    else:
        fixed = np.zeros(len(mesh.vertices), dtype=bool)
        fixed[edges[counts == 1].ravel()] = True
    if clamp:
        ring = fixed.copy()
        ring[edges[fixed[edges[:, 0]], 1]] = True
        ring[edges[fixed[edges[:, 1]], 0]] = True
        fixed = ring
    return fixed


def thin_plate_energy(mesh, fixed=None):
    """
    Squared norm of the discrete bi-Laplacian summed over free vertices.
    """
    L = umbrella_operator(mesh)
    bilaplacian = L @ (L @ np.asarray(mesh.vertices))
    free = ~(fixed_vertices(mesh) if fixed is None else fixed)
    return float(np.sum(bilaplacian[free] ** 2))


def fair(mesh, params):
    """
    Move free vertices so the bi-Laplacian vanishes there, boundary fixed.

    With ``fairing_clamp`` the neighbors of the boundary are held too, which
    fixes the direction the patch leaves its boundary. The square system
    ``(L^2)_FF x_F = -(L^2)_FB x_B`` is factorized once and refined until the
    relative residual drops below ``fairing_tolerance``.
    """
    fixed = fixed_vertices(mesh, params.fairing_clamp)
    free = np.flatnonzero(~fixed)
    if not len(free):
        return mesh
    x = np.array(mesh.vertices)
    L = umbrella_operator(mesh)
    L2 = (L @ L).tocsr()
    A = L2[free][:, free].tocsc()
    rhs = -(L2[free][:, np.flatnonzero(fixed)] @ x[fixed])

    try:
        lu = splu(A)
    except RuntimeError as e:
        raise SolverError("fairing system is singular: %s" % e)
    solution = lu.solve(rhs)
    scale = max(float(np.linalg.norm(rhs)), 1e-300)
    residual = float(np.linalg.norm(A @ solution - rhs)) / scale
    iterations = 1
    while residual > params.fairing_tolerance and iterations < params.fairing_max_iterations:
        refined = solution + lu.solve(rhs - A @ solution)
        refined_residual = float(np.linalg.norm(A @ refined - rhs)) / scale
        iterations += 1
        if not refined_residual < residual:
            break
        solution, residual = refined, refined_residual
    if not np.isfinite(residual) or residual > params.fairing_tolerance:
        raise SolverError("fairing did not converge after %d iterations" % iterations, residual)

    x[free] = solution
    faired = mesh.with_vertices(x)
    before, after = thin_plate_energy(mesh, fixed), thin_plate_energy(faired, fixed)
    if after > before:
        log.debug("fairing raised the energy from %.3e to %.3e; keeping input", before, after)
        return mesh
    log.debug("faired %d free vertices, residual %.2e, energy %.3e -> %.3e",
              len(free), residual, before, after)
    return faired


def subdivide(mesh, levels):
    """
    ``levels`` rounds of Catmull-Clark subdivision.

    Border edges and vertices follow the cubic B-spline rules, so the border
    of the limit surface is the B-spline of the input border polygon.
    New vertices are ordered as original vertices, edge points, face points.
    """
    for _ in range(int(levels)):
        mesh = _catmull_clark(mesh)
    return mesh


def _catmull_clark(mesh):
    V = np.asarray(mesh.vertices)
    f = np.asarray(mesh.faces)
    nv, nf = len(V), len(f)
    edges, edge_of, counts = edge_face_counts(f)
    if np.any(counts > 2):
        raise NonManifoldError("%d edges are shared by more than two faces" % int(np.sum(counts > 2)))
    ne = len(edges)
    border = counts == 1

    face_points = V[f].mean(axis=1)
    face_sum = np.zeros((ne, 3))
    np.add.at(face_sum, edge_of.reshape(-1), np.repeat(face_points, 4, axis=0))
    midpoints = 0.5 * (V[edges[:, 0]] + V[edges[:, 1]])
    edge_points = np.where(
        border[:, None], midpoints, (V[edges[:, 0]] + V[edges[:, 1]] + face_sum) / 4.0,
    )

    valence = np.bincount(edges.reshape(-1), minlength=nv).astype(float)
    q = np.zeros((nv, 3))
    np.add.at(q, f.reshape(-1), np.repeat(face_points, 4, axis=0))
    q /= np.maximum(np.bincount(f.reshape(-1), minlength=nv), 1)[:, None]
    r = np.zeros((nv, 3))
    np.add.at(r, edges[:, 0], midpoints)
    np.add.at(r, edges[:, 1], midpoints)
    r /= np.maximum(valence, 1)[:, None]
    n = np.maximum(valence, 1)[:, None]
    vertex_points = np.where(valence[:, None] > 0, (q + 2 * r + (n - 3) * V) / n, V)

    border_edges = edges[border]
    border_count = np.bincount(border_edges.reshape(-1), minlength=nv)
    on_border = border_count > 0
    if np.any(border_count[on_border] != 2):
        raise NonManifoldError("%d border vertices are not on exactly two border edges"
                               % int(np.sum(border_count[on_border] != 2)))
    neighbor_sum = np.zeros((nv, 3))
    np.add.at(neighbor_sum, border_edges[:, 0], V[border_edges[:, 1]])
    np.add.at(neighbor_sum, border_edges[:, 1], V[border_edges[:, 0]])
    vertex_points[on_border] = (neighbor_sum[on_border] + 6.0 * V[on_border]) / 8.0

    corner = np.arange(4)
    prev = (corner - 1) % 4
    faces = np.stack([
        f,
        nv + edge_of[:, corner],
        np.repeat(nv + ne + np.arange(nf)[:, None], 4, axis=1),
        nv + edge_of[:, prev],
    ], axis=2).reshape(-1, 4)

    tags = np.asarray(mesh.boundary_tags)
    edge_tags = border & tags[edges[:, 0]] & tags[edges[:, 1]]
    new_tags = np.concatenate([tags, edge_tags, np.zeros(nf, dtype=bool)])
    return QuadMesh(np.vstack([vertex_points, edge_points, face_points]), faces, new_tags)


def boundary_deviation(mesh, loop):
    """
    Largest distance from a tagged mesh vertex to the loop polyline.
    """
    tagged = np.asarray(mesh.vertices)[np.asarray(mesh.boundary_tags)]
    if not len(tagged):
        return 0.0
    return float(point_polyline_distance(tagged, loop.points, closed=True).max())


def _as_trimesh(mesh):
    return mesh.triangulate() if isinstance(mesh, QuadMesh) else mesh


def mean_abs_gaussian_curvature(mesh):
    """
    Mean of ``|K|`` over interior vertices, ``K`` being the angle deficit
    divided by a third of the incident triangle area.

    Accepts a ``QuadMesh`` (triangulated first) or a ``TriMesh``.
    """
    tri_mesh = _as_trimesh(mesh)
    V = np.asarray(tri_mesh.vertices)
    t = np.asarray(tri_mesh.faces)
    edges, _, counts = edge_face_counts(t)
    interior = np.ones(len(V), dtype=bool)
    interior[edges[counts == 1].ravel()] = False
    interior[np.setdiff1d(np.arange(len(V)), t.ravel())] = False
    if not interior.any():
        raise LoftError("mesh has no interior vertices")

    angle_sum = np.zeros(len(V))
    for k in range(3):
        p = V[t[:, k]]
        u = V[t[:, (k + 1) % 3]] - p
        w = V[t[:, (k + 2) % 3]] - p
        angles = np.arctan2(np.linalg.norm(np.cross(u, w), axis=1), np.einsum("ij,ij->i", u, w))
        np.add.at(angle_sum, t[:, k], angles)
    area = np.zeros(len(V))
    np.add.at(area, t.ravel(), np.repeat(tri_mesh.face_areas() / 3.0, 3))

    valid = interior & (area > 0)
    if not valid.any():
        raise LoftError("interior vertices have no incident area")
    K = (2 * np.pi - angle_sum[valid]) / area[valid]
    return float(np.mean(np.abs(K)))


def _has_fold(tri_mesh, keep):
    normals = np.cross(
        tri_mesh.vertices[tri_mesh.faces[:, 1]] - tri_mesh.vertices[tri_mesh.faces[:, 0]],
        tri_mesh.vertices[tri_mesh.faces[:, 2]] - tri_mesh.vertices[tri_mesh.faces[:, 0]],
    )[keep]
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    faces = np.asarray(tri_mesh.faces)[keep]
    incident = sparse.csr_matrix(
        (np.ones(faces.size), (faces.ravel(), np.repeat(np.arange(len(faces)), 3))),
        shape=(len(tri_mesh.vertices), len(faces)),
    )
    for v in range(incident.shape[0]):
        around = incident.indices[incident.indptr[v]:incident.indptr[v + 1]]
        if len(around) > 1:
            cosines = normals[around] @ normals[around].T
            if cosines.min() < FOLD_COSINE:
                return True
    return False


def self_intersects(mesh):
    """
    Whether the mesh is degenerate: zero area, folded onto itself, or with
    two triangles that share no vertex crossing each other.

    Candidate pairs come from a centroid kd-tree and are pruned by bounding boxes.
    """
    tri_mesh = _as_trimesh(mesh)
    V = np.asarray(tri_mesh.vertices)
    if not len(tri_mesh.faces):
        return True
    extent = float(np.linalg.norm(V.max(axis=0) - V.min(axis=0)))
    areas = tri_mesh.face_areas()
    if extent == 0 or areas.sum() <= 1e-9 * extent ** 2:
        return True
    keep = areas > 1e-12 * extent ** 2
    if _has_fold(tri_mesh, keep):
        return True

    faces = np.asarray(tri_mesh.faces)[keep]
    tri = V[faces]
    centroids = tri.mean(axis=1)
    reach = float(np.linalg.norm(tri - centroids[:, None], axis=2).max())
    pairs = cKDTree(centroids).query_pairs(2 * reach, output_type="ndarray")
    if not len(pairs):
        return False
    lo, hi = tri.min(axis=1), tri.max(axis=1)
    i, j = pairs[:, 0], pairs[:, 1]
    overlap = np.all((lo[i] <= hi[j]) & (lo[j] <= hi[i]), axis=1)
    shared = (faces[i][:, :, None] == faces[j][:, None, :]).any(axis=(1, 2))
    i, j = i[overlap & ~shared], j[overlap & ~shared]
    return bool(triangles_intersect(tri[i], tri[j]).any())


def _finish(loop, base, params, fragment_ids, pairing):
    faired = fair(base, params)
    degenerate = self_intersects(faired)
    mesh = subdivide(faired, params.subdiv_levels)
    result = LoftResult(
        mesh=mesh,
        base_mesh=faired,
        boundary_deviation=boundary_deviation(mesh, loop),
        mean_abs_K=mean_abs_gaussian_curvature(mesh),
        degenerate=degenerate,
        fragment_ids=tuple(fragment_ids),
        pairing=pairing,
    )
    log.debug("lofted %s (%s): %d quads, mean |K| %.4g, degenerate %s",
              list(fragment_ids), pairing, len(mesh.faces), result.mean_abs_K, degenerate)
    return result


def loft_pair(c1, c2, pairing, params):
    """
    Loft a surface between two open fragments: loop, skin, fair, subdivide.
    """
    loop = make_loop(c1, c2, pairing)
    return _finish(loop, skin(loop, params), params, (c1.id, c2.id), pairing)


def loft_closed(c, params):
    """
    Fill a closed fragment with a surface patch.
    """
    if not c.closed:
        raise LoftError("fragment %d is open; use loft_pair" % c.id)
    if len(c) < 4:
        raise LoftError("closed fragment %d has fewer than 4 points" % c.id)
    points = np.asarray(c.points)
    loop = BoundaryLoop((np.vstack([points, points[:1]]),))
    return _finish(loop, skin(loop, params), params, (c.id,), None)


def save_loft(result, path):
    """
    Write the mesh as OBJ and its measurements to a ``.json`` sidecar next to it.
    """
    path = Path(path)
    write_obj(path, result.mesh.vertices, result.mesh.faces)
    sidecar = path.with_suffix(".json")
    sidecar.write_text(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n")
    return path, sidecar
