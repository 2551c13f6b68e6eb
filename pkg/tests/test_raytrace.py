import numpy as np
import pytest
from django.test.utils import override_settings

from curve_surfacing.raytrace import BVHTracer, LinearScanTracer, get_ray_tracer, get_ray_tracer_class

from .utils import grid_quad_mesh, square_tri_mesh


TRACERS = [LinearScanTracer, BVHTracer]


def stacked_squares(cls):
    return cls.from_meshes([
        (1, square_tri_mesh(z=0.0)),
        (2, square_tri_mesh(z=1.0)),
    ])


@pytest.mark.parametrize("cls", TRACERS)
class TestTracers:

    def test_segment_through_both_squares(self, cls):
        tracer = stacked_squares(cls)
        pairs = tracer.blocking_owners([[0.5, 0.5, 2.0]], [[0.5, 0.5, -1.0]])
        assert pairs.tolist() == [[0, 1], [0, 2]]

    def test_target_on_a_surface_is_not_blocked_by_it(self, cls):
        tracer = stacked_squares(cls)
        pairs = tracer.blocking_owners([[0.5, 0.5, 2.0]], [[0.5, 0.5, 0.0]])
        assert pairs.tolist() == [[0, 2]]

    def test_exclude_and_only(self, cls):
        tracer = stacked_squares(cls)
        origins = [[0.5, 0.5, 2.0], [3.0, 3.0, 2.0]]
        targets = [[0.5, 0.5, -1.0], [3.0, 3.0, -1.0]]
        assert tracer.occluded(origins, targets).tolist() == [True, False]
        assert tracer.occluded(origins, targets, exclude={1, 2}).tolist() == [False, False]
        assert tracer.occluded(origins, targets, exclude={1}, only={1}).tolist() == [False, False]
        assert tracer.occluded(origins, targets, only={2}).tolist() == [True, False]

    def test_empty_tracer_blocks_nothing(self, cls):
        tracer = cls.from_meshes([])
        assert len(tracer) == 0
        assert not tracer.occluded([[0, 0, 1]], [[0, 0, -1]]).any()

    def test_quad_meshes_are_triangulated(self, cls):
        tracer = cls.from_meshes([(7, grid_quad_mesh(2, 2))])
        assert len(tracer) == 8
        assert tracer.occluded([[0.3, 0.6, 1.0]], [[0.3, 0.6, -1.0]])[0]


def test_owner_count_must_match():
    with pytest.raises(ValueError):
        LinearScanTracer(np.zeros((2, 3, 3)), [1])


def test_bvh_matches_linear_scan():
    rng = np.random.default_rng(11)
    centers = rng.random((300, 1, 3)) * 4.0
    triangles = centers + rng.normal(scale=0.15, size=(300, 3, 3))
    owners = rng.integers(0, 6, size=300)
    origins = rng.random((400, 3)) * 4.0
    targets = rng.random((400, 3)) * 4.0
    expected = LinearScanTracer(triangles, owners).blocking_owners(origins, targets)
    got = BVHTracer(triangles, owners).blocking_owners(origins, targets)
    assert len(expected) > 0
    np.testing.assert_array_equal(got, expected)


def test_default_tracer_is_bvh():
    assert get_ray_tracer_class() is BVHTracer


@override_settings(CURVE_SURFACING={"RAY_TRACER_CLASS": "curve_surfacing.raytrace.LinearScanTracer"})
def test_tracer_class_setting():
    tracer = get_ray_tracer([(0, square_tri_mesh())])
    assert isinstance(tracer, LinearScanTracer)
