"""
Vectorized triangle predicates shared by lofting, ray tracing and evaluation.
"""
import numpy as np


def ray_triangle(origins, directions, a, b, c):
    """
    Watertight ray/triangle intersection for paired rows; returns ``(hit, t)``.

    Each ray is turned into the +z axis by a permutation and a shear, and the
    triangle is tested with 2D edge functions. A shared edge gets exactly
    opposite edge functions in its two triangles, so a ray through it hits at
    least one of them; hits on edges and vertices count. Rays parallel to
    the triangle plane never hit.
    """
    origins = np.asarray(origins, dtype=float)
    d = np.asarray(directions, dtype=float)
    rows = np.arange(len(d))
    kz = np.argmax(np.abs(d), axis=1)
    kx = (kz + 1) % 3
    ky = (kx + 1) % 3
    # keep the winding when the dominant axis points backwards
    flip = d[rows, kz] < 0
    kx, ky = np.where(flip, ky, kx), np.where(flip, kx, ky)
    dz = d[rows, kz]
    valid = dz != 0
    dz = np.where(valid, dz, 1.0)
    sx, sy, sz = d[rows, kx] / dz, d[rows, ky] / dz, 1.0 / dz

    def sheared(p):
        rel = np.asarray(p, dtype=float) - origins
        z = rel[rows, kz]
        return rel[rows, kx] - sx * z, rel[rows, ky] - sy * z, sz * z

    ax, ay, az = sheared(a)
    bx, by, bz = sheared(b)
    cx, cy, cz = sheared(c)
    U = cx * by - cy * bx
    V = ax * cy - ay * cx
    W = bx * ay - by * ax
    inside = ((U >= 0) & (V >= 0) & (W >= 0)) | ((U <= 0) & (V <= 0) & (W <= 0))
    det = U + V + W
    hit = valid & inside & (det != 0)
    T = U * az + V * bz + W * cz
    t = np.where(hit, T / np.where(hit, det, 1.0), 0.0)
    return hit, t


def segment_hits_triangle(p0, p1, a, b, c, strict=True):
    """
    Whether each segment ``p0 -> p1`` crosses the paired triangle.

    Used by the self-intersection scan, so contacts exactly on a
    triangle border do not count when ``strict``.
    """
    tol = -1e-12 if not strict else 1e-12
    e1 = b - a
    e2 = c - a
    d = p1 - p0
    p = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, p)
    scale = np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1) * np.linalg.norm(d, axis=1)
    ok = np.abs(det) > 1e-10 * np.maximum(scale, 1e-300)
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    s = p0 - a
    u = np.einsum("ij,ij->i", s, p) * inv
    q = np.cross(s, e1)
    v = np.einsum("ij,ij->i", d, q) * inv
    t = np.einsum("ij,ij->i", e2, q) * inv
    return ok & (u > tol) & (v > tol) & (u + v < 1.0 - tol) & (t > tol) & (t < 1.0 - tol)


def _orient2d(a, b, c):
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def _coplanar_overlap(T, U, normals):
    """
    Proper overlap test for coplanar triangle pairs, in the dominant projection plane.
    """
    axis = np.argmax(np.abs(normals), axis=1)
    keep = np.array([[1, 2], [0, 2], [0, 1]])[axis]
    rows = np.arange(len(T))[:, None]
    t2 = np.stack([T[:, k][rows, keep] for k in range(3)], axis=1)
    u2 = np.stack([U[:, k][rows, keep] for k in range(3)], axis=1)
    scale = np.maximum(np.abs(t2).max(axis=(1, 2)), np.abs(u2).max(axis=(1, 2))) + 1e-300
    eps = 1e-12 * scale ** 2

    overlap = np.zeros(len(T), dtype=bool)
    for i in range(3):
        a, b = t2[:, i], t2[:, (i + 1) % 3]
        for j in range(3):
            c, d = u2[:, j], u2[:, (j + 1) % 3]
            d1 = _orient2d(a, b, c)
            d2 = _orient2d(a, b, d)
            d3 = _orient2d(c, d, a)
            d4 = _orient2d(c, d, b)
            overlap |= (d1 * d2 < -eps) & (d3 * d4 < -eps)

    def inside(points, tri):
        s0 = _orient2d(tri[:, 0], tri[:, 1], points)
        s1 = _orient2d(tri[:, 1], tri[:, 2], points)
        s2 = _orient2d(tri[:, 2], tri[:, 0], points)
        return ((s0 > eps) & (s1 > eps) & (s2 > eps)) | ((s0 < -eps) & (s1 < -eps) & (s2 < -eps))

    for k in range(3):
        overlap |= inside(t2[:, k], u2) | inside(u2[:, k], t2)
    return overlap


def triangles_intersect(T, U):
    """
    Interior intersection test for paired triangles ``T[i]`` and ``U[i]`` of shape ``(n, 3, 3)``.
    """
    T = np.asarray(T, dtype=float)
    U = np.asarray(U, dtype=float)
    hit = np.zeros(len(T), dtype=bool)
    if not len(T):
        return hit
    normals = np.cross(T[:, 1] - T[:, 0], T[:, 2] - T[:, 0])
    n_norm = np.linalg.norm(normals, axis=1)
    size = np.maximum(np.abs(T).max(axis=(1, 2)), np.abs(U).max(axis=(1, 2))) + 1e-300
    dist = np.einsum("ij,ikj->ik", normals, U - T[:, :1]) / np.maximum(n_norm, 1e-300)[:, None]
    coplanar = np.all(np.abs(dist) < 1e-9 * size[:, None], axis=1)

    for source, target in ((T, U), (U, T)):
        for k in range(3):
            p0 = source[:, k]
            p1 = source[:, (k + 1) % 3]
            hit |= segment_hits_triangle(p0, p1, target[:, 0], target[:, 1], target[:, 2])
    if coplanar.any():
        idx = np.flatnonzero(coplanar)
        hit[idx] |= _coplanar_overlap(T[idx], U[idx], normals[idx])
    return hit


def closest_point_on_triangles(points, a, b, c):
    """
    Closest points for paired rows of points and triangles (Ericson's region test).
    """
    ab = b - a
    ac = c - a
    ap = points - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = points - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = points - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)

    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2
    denom = va + vb + vc
    denom = np.where(np.abs(denom) > 1e-300, denom, 1e-300)
    v = vb / denom
    w = vc / denom
    result = a + ab * v[:, None] + ac * w[:, None]

    def assign(mask, value):
        result[mask] = value[mask]

    def safe_div(x, y):
        return x / np.where(np.abs(y) > 1e-300, y, 1e-300)

    # edge BC
    mask = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
    wb = safe_div(d4 - d3, (d4 - d3) + (d5 - d6))
    assign(mask, b + (c - b) * wb[:, None])
    # edge AC
    mask = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    wa = safe_div(d2, d2 - d6)
    assign(mask, a + ac * wa[:, None])
    # edge AB
    mask = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    va_ = safe_div(d1, d1 - d3)
    assign(mask, a + ab * va_[:, None])
    # vertices
    assign((d6 >= 0) & (d5 <= d6), c)
    assign((d3 >= 0) & (d4 <= d3), b)
    assign((d1 <= 0) & (d2 <= 0), a)
    return result


def point_triangle_distance(points, a, b, c):
    return np.linalg.norm(points - closest_point_on_triangles(points, a, b, c), axis=1)


def sample_triangles(vertices, faces, count, rng):
    """
    ``count`` area-uniform random samples on a triangle mesh.
    """
    tri = np.asarray(vertices)[np.asarray(faces)]
    areas = 0.5 * np.linalg.norm(np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1)
    if not len(tri) or areas.sum() <= 0:
        return np.zeros((0, 3)), np.zeros(0, dtype=np.int64)
    which = rng.choice(len(tri), size=count, p=areas / areas.sum())
    r1 = np.sqrt(rng.random(count))
    r2 = rng.random(count)
    a, b, c = tri[which, 0], tri[which, 1], tri[which, 2]
    points = (1 - r1)[:, None] * a + (r1 * (1 - r2))[:, None] * b + (r1 * r2)[:, None] * c
    return points, which
