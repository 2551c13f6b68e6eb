import numpy as np

from curve_surfacing.curve_graph import CameraView, CurveDrawing, CurveFragment, QuadMesh, TriMesh


def line_fragment(id, start, end, count=21):
    """
    An open fragment with ``count`` evenly spaced samples from ``start`` to ``end``.
    """
    t = np.linspace(0.0, 1.0, count)[:, None]
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    return CurveFragment(id, start + t * (end - start))


def arc_fragment(id, radius, start_angle, end_angle, count=41, center=(0.0, 0.0, 0.0)):
    a = np.linspace(start_angle, end_angle, count)
    points = np.column_stack([radius * np.cos(a), radius * np.sin(a), np.zeros(count)])
    return CurveFragment(id, points + np.asarray(center, dtype=float))


def circle_fragment(id, radius, count=48, center=(0.0, 0.0, 0.0)):
    a = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
    points = np.column_stack([radius * np.cos(a), radius * np.sin(a), np.zeros(count)])
    return CurveFragment(id, points + np.asarray(center, dtype=float), closed=True)


def square_fragment(id, size=1.0, per_side=10, z=0.0):
    corners = np.array([[0, 0, z], [size, 0, z], [size, size, z], [0, size, z]], dtype=float)
    points = []
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        t = np.linspace(0.0, 1.0, per_side, endpoint=False)[:, None]
        points.append(a + t * (b - a))
    return CurveFragment(id, np.vstack(points), closed=True)


def parallel_rails(separation=0.5, length=1.0, count=21, first_id=0):
    """
    Two straight open fragments along x, ``separation`` apart in y, same direction.
    """
    return (
        line_fragment(first_id, (0.0, 0.0, 0.0), (length, 0.0, 0.0), count),
        line_fragment(first_id + 1, (0.0, separation, 0.0), (length, separation, 0.0), count),
    )


def grid_quad_mesh(nx=4, ny=3, size=1.0, tag_border=True):
    """
    A flat ``nx`` by ``ny`` quad grid in the z=0 plane.
    """
    xs, ys = np.meshgrid(np.linspace(0.0, size, nx + 1), np.linspace(0.0, size, ny + 1), indexing="ij")
    vertices = np.column_stack([xs.ravel(), ys.ravel(), np.zeros(xs.size)])

    def index(i, j):
        return i * (ny + 1) + j

    faces = [
        [index(i, j), index(i + 1, j), index(i + 1, j + 1), index(i, j + 1)]
        for i in range(nx) for j in range(ny)
    ]
    tags = None
    if tag_border:
        tags = (np.isclose(xs, 0) | np.isclose(xs, size) | np.isclose(ys, 0) | np.isclose(ys, size)).ravel()
    return QuadMesh(vertices, faces, tags)


def square_tri_mesh(size=1.0, z=0.0, offset=(0.0, 0.0)):
    x0, y0 = offset
    vertices = [[x0, y0, z], [x0 + size, y0, z], [x0 + size, y0 + size, z], [x0, y0 + size, z]]
    return TriMesh(vertices, [[0, 1, 2], [0, 2, 3]])


def ring_views(center=(0.0, 0.0, 0.0), radius=4.0, count=6, height=1.5, focal=500.0,
               width=640, image_height=480):
    """
    Cameras on a horizontal ring looking at ``center``.
    """
    center = np.asarray(center, dtype=float)
    views = []
    for k in range(count):
        a = 2 * np.pi * k / count
        eye = center + np.array([radius * np.cos(a), radius * np.sin(a), height])
        views.append(CameraView.look_at(k, eye, center, focal, width, image_height))
    return views


def top_view(center=(0.5, 0.5, 0.0), distance=3.0, focal=400.0, id=0):
    center = np.asarray(center, dtype=float)
    eye = center + np.array([0.0, 0.0, distance])
    return CameraView.look_at(id, eye, center, focal, 640, 480, up=(0.0, 1.0, 0.0))


def drawing_of(*fragments):
    return CurveDrawing(tuple(fragments))


def icosphere(radius=1.0, levels=2):
    """
    A geodesic sphere: an icosahedron split ``levels`` times, vertices pushed onto the sphere.
    """
    g = (1.0 + np.sqrt(5.0)) / 2.0
    vertices = [
        [-1, g, 0], [1, g, 0], [-1, -g, 0], [1, -g, 0],
        [0, -1, g], [0, 1, g], [0, -1, -g], [0, 1, -g],
        [g, 0, -1], [g, 0, 1], [-g, 0, -1], [-g, 0, 1],
    ]
    faces = [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
    vertices = [list(np.asarray(v, dtype=float) / np.linalg.norm(v)) for v in vertices]
    for _ in range(levels):
        midpoint = {}

        def split(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint:
                m = np.asarray(vertices[i]) + np.asarray(vertices[j])
                vertices.append(list(m / np.linalg.norm(m)))
                midpoint[key] = len(vertices) - 1
            return midpoint[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = split(a, b), split(b, c), split(c, a)
            refined += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = refined
    return TriMesh(np.asarray(vertices) * radius, faces)
