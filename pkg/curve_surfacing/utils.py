from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .settings import surfacing_settings


def parallel_map(func, items, threads=None):
    """
    Map ``func`` over ``items`` preserving order.

    numpy and scipy release the GIL in their kernels, so a thread pool is
    enough for the per-fragment and per-view stages.
    """
    items = list(items)
    threads = surfacing_settings.THREADS if threads is None else threads
    if not threads or threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def point_segment_distance(points, a, b):
    """
    Distance from every point to every segment ``a[j] -> b[j]``, shape ``(n, m)``.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 1, 3)
    a = np.asarray(a, dtype=float).reshape(1, -1, 3)
    b = np.asarray(b, dtype=float).reshape(1, -1, 3)
    ab = b - a
    denom = np.einsum("ijk,ijk->ij", ab, ab)
    t = np.einsum("ijk,ijk->ij", points - a, ab) / np.where(denom > 0, denom, 1.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.linalg.norm(points - closest, axis=2)


def point_polyline_distance(points, polyline, closed=False, chunk=4096):
    """
    Distance from each point to a 3D polyline.
    """
    polyline = np.asarray(polyline, dtype=float)
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(polyline) == 1:
        return np.linalg.norm(points - polyline[0], axis=1)
    ends = np.vstack([polyline, polyline[:1]]) if closed else polyline
    a, b = ends[:-1], ends[1:]
    out = np.empty(len(points))
    step = max(1, chunk // max(1, len(a)))
    for start in range(0, len(points), step):
        out[start:start + step] = point_segment_distance(points[start:start + step], a, b).min(axis=1)
    return out


def angle_between(u, v):
    """
    Angle in ``[0, pi]`` between two vectors, robust near 0 and pi.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(np.arctan2(np.linalg.norm(np.cross(u, v)), np.dot(u, v)))


def resample_polyline(points, count, closed=False):
    """
    ``count`` samples evenly spaced in arclength; open polylines keep both endpoints.
    """
    points = np.asarray(points, dtype=float)
    if closed:
        points = np.vstack([points, points[:1]])
        count += 1
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(points, axis=0), axis=1))])
    targets = np.linspace(0.0, s[-1], count)
    out = np.column_stack([np.interp(targets, s, points[:, k]) for k in range(points.shape[1])])
    out[0] = points[0]
    out[-1] = points[-1]
    return out[:-1] if closed else out
