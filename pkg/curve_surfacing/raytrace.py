"""
Segment visibility queries against the triangles of many hypothesis meshes.

Every triangle remembers the hypothesis (its *owner*) it came from, so one
structure answers "which surfaces block the view of this point" for all
hypotheses at once. The tracer class is pluggable through the
``RAY_TRACER_CLASS`` setting.
"""
import logging

import numpy as np

from .geometry import ray_triangle
from .settings import surfacing_settings


log = logging.getLogger("curve_surfacing")

# hits closer than this fraction of the segment to either end are ignored
SEGMENT_EPSILON = 1e-6


class BaseRayTracer(object):
    """
    Base class for tracers over a fixed soup of owned triangles.

    Subclasses implement :meth:`_candidate_hits`, returning every
    ``(ray, triangle)`` pair whose segment crosses the triangle.
    """

    def __init__(self, triangles, owners):
        self.triangles = np.asarray(triangles, dtype=float).reshape(-1, 3, 3)
        self.owners = np.asarray(owners, dtype=np.int64).reshape(-1)
        if len(self.owners) != len(self.triangles):
            raise ValueError("one owner per triangle is required")

    @classmethod
    def from_meshes(cls, items):
        """
        Build from ``(owner_id, mesh)`` pairs; quad meshes are triangulated.
        """
        triangles, owners = [], []
        for owner, mesh in items:
            tri_mesh = mesh.triangulate() if hasattr(mesh, "triangulate") else mesh
            tri = tri_mesh.triangles()
            triangles.append(tri)
            owners.append(np.full(len(tri), int(owner), dtype=np.int64))
        if not triangles:
            return cls(np.zeros((0, 3, 3)), np.zeros(0, dtype=np.int64))
        return cls(np.concatenate(triangles), np.concatenate(owners))

    def __len__(self):
        return len(self.triangles)

    def _candidate_hits(self, origins, directions):
        raise NotImplementedError("Subclasses must implement this method.")

    def _hits(self, origins, targets):
        origins = np.asarray(origins, dtype=float).reshape(-1, 3)
        targets = np.asarray(targets, dtype=float).reshape(-1, 3)
        if not len(origins) or not len(self.triangles):
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        return self._candidate_hits(origins, targets - origins)

    def blocking_owners(self, origins, targets):
        """
        Every ``(segment index, owner)`` pair such that a triangle of ``owner``
        crosses the segment ``origins[i] -> targets[i]`` strictly between its ends.
        Pairs are unique and sorted.
        """
        rays, tris = self._hits(origins, targets)
        if not len(rays):
            return np.zeros((0, 2), dtype=np.int64)
        return np.unique(np.column_stack([rays, self.owners[tris]]), axis=0)

    def occluded(self, origins, targets, exclude=(), only=None):
        """
        Whether each segment is blocked by a triangle whose owner is not in
        ``exclude`` (and is in ``only`` when given).
        """
        n = len(np.asarray(origins).reshape(-1, 3))
        pairs = self.blocking_owners(origins, targets)
        keep = ~np.isin(pairs[:, 1], list(exclude))
        if only is not None:
            keep &= np.isin(pairs[:, 1], list(only))
        blocked = np.zeros(n, dtype=bool)
        blocked[pairs[keep, 0]] = True
        return blocked


def _segment_filter(hit, t):
    return hit & (t > SEGMENT_EPSILON) & (t < 1.0 - SEGMENT_EPSILON)


class LinearScanTracer(BaseRayTracer):
    """
    Tests every segment against every triangle; the reference for :class:`BVHTracer`.
    """
    chunk = 1 << 18

    def _candidate_hits(self, origins, directions):
        rays_out, tris_out = [], []
        n_tri = len(self.triangles)
        step = max(1, self.chunk // n_tri)
        tri_index = np.arange(n_tri)
        for start in range(0, len(origins), step):
            rays = np.repeat(np.arange(start, min(start + step, len(origins))), n_tri)
            tris = np.tile(tri_index, len(rays) // n_tri)
            tri = self.triangles[tris]
            hit, t = ray_triangle(origins[rays], directions[rays], tri[:, 0], tri[:, 1], tri[:, 2])
            keep = _segment_filter(hit, t)
            rays_out.append(rays[keep])
            tris_out.append(tris[keep])
        return np.concatenate(rays_out), np.concatenate(tris_out)


class BVHTracer(BaseRayTracer):
    """
    Axis-aligned bounding volume hierarchy traversed with packets of segments.

    Nodes are split at the median centroid along their longest axis until at
    most ``leaf_size`` triangles remain. Traversal keeps, per node, the subset
    of segments whose slab test passed and tests leaves exactly.
    """
    leaf_size = 8

    def __init__(self, triangles, owners):
        super().__init__(triangles, owners)
        self._build()

    def _build(self):
        n = len(self.triangles)
        self.order = np.arange(n)
        lo_all = self.triangles.min(axis=1) if n else np.zeros((0, 3))
        hi_all = self.triangles.max(axis=1) if n else np.zeros((0, 3))
        centroids = self.triangles.mean(axis=1) if n else np.zeros((0, 3))
        lo, hi, children, spans = [], [], [], []

        def build(begin, end):
            node = len(lo)
            idx = self.order[begin:end]
            lo.append(lo_all[idx].min(axis=0))
            hi.append(hi_all[idx].max(axis=0))
            children.append((-1, -1))
            spans.append((begin, end))
            if end - begin > self.leaf_size:
                c = centroids[idx]
                axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
                self.order[begin:end] = idx[np.argsort(c[:, axis], kind="stable")]
                mid = (begin + end) // 2
                left = build(begin, mid)
                right = build(mid, end)
                children[node] = (left, right)
            return node

        if n:
            build(0, n)
        self.node_lo = np.asarray(lo).reshape(-1, 3)
        self.node_hi = np.asarray(hi).reshape(-1, 3)
        self.node_children = np.asarray(children, dtype=np.int64).reshape(-1, 2)
        self.node_spans = np.asarray(spans, dtype=np.int64).reshape(-1, 2)
        log.debug("built BVH over %d triangles with %d nodes", n, len(lo))

    def _slab(self, node, origins, directions):
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / directions
            t0 = (self.node_lo[node] - origins) * inv
            t1 = (self.node_hi[node] - origins) * inv
        near = np.where(np.isnan(t0), -np.inf, np.minimum(t0, t1))
        far = np.where(np.isnan(t1), np.inf, np.maximum(t0, t1))
        # zero direction components: inside the slab or never
        flat = directions == 0
        inside = (origins >= self.node_lo[node]) & (origins <= self.node_hi[node])
        near = np.where(flat, np.where(inside, -np.inf, np.inf), near)
        far = np.where(flat, np.where(inside, np.inf, -np.inf), far)
        t_enter = np.maximum(near.max(axis=1), 0.0)
        t_exit = np.minimum(far.min(axis=1), 1.0)
        pad = 1e-9 * (1.0 + np.abs(t_exit))
        return t_enter <= t_exit + pad

    def _candidate_hits(self, origins, directions):
        rays_out, tris_out = [], []
        stack = [(0, np.arange(len(origins)))]
        while stack:
            node, rays = stack.pop()
            rays = rays[self._slab(node, origins[rays], directions[rays])]
            if not len(rays):
                continue
            left, right = self.node_children[node]
            if left >= 0:
                stack.append((right, rays))
                stack.append((left, rays))
                continue
            begin, end = self.node_spans[node]
            leaf = self.order[begin:end]
            r = np.repeat(rays, len(leaf))
            tris = np.tile(leaf, len(rays))
            tri = self.triangles[tris]
            hit, t = ray_triangle(origins[r], directions[r], tri[:, 0], tri[:, 1], tri[:, 2])
            keep = _segment_filter(hit, t)
            rays_out.append(r[keep])
            tris_out.append(tris[keep])
        if not rays_out:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        return np.concatenate(rays_out), np.concatenate(tris_out)


def get_ray_tracer_class():
    return surfacing_settings.RAY_TRACER_CLASS


def get_ray_tracer(items):
    """
    Build the configured tracer over ``(owner_id, mesh)`` pairs.
    """
    return get_ray_tracer_class().from_meshes(items)
