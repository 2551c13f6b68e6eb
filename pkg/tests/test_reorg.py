import numpy as np
import pytest
from django.core.exceptions import ImproperlyConfigured

from curve_surfacing.curve_graph import CurveFragment, arclength
from curve_surfacing.reorg import (
    ReorgParams, break_at_corners, break_drawing_at_corners, bridge_gaps, cocircularity, corner_indices,
    dedup_overlaps, discrete_curvature, merge_at_junctions, prune_short, reorganize,
    reorganize_with_report, resample, smooth_fragment, smoothing_objective
)
from curve_surfacing.synth import SceneSpec, generate

from .utils import circle_fragment, drawing_of, line_fragment


def l_shape(id=0):
    first = line_fragment(id, (0, 0, 0), (1, 0, 0), 11).points
    second = line_fragment(id, (1, 0, 0), (1, 1, 0), 11).points
    return CurveFragment(id, np.vstack([first, second[1:]]))


class TestParams:

    def test_defaults_come_from_settings(self):
        params = ReorgParams.from_settings()
        assert params.tau_length == pytest.approx(0.03)
        assert params.rounds == 3

    def test_unknown_field_is_rejected(self):
        with pytest.raises(ImproperlyConfigured):
            ReorgParams.from_dict({"tau_lenght": 0.1})

    def test_rounds_out_of_range(self):
        with pytest.raises(ImproperlyConfigured):
            ReorgParams.from_dict({"rounds": 0})

    def test_scaled_keeps_kappa_break(self):
        params = ReorgParams.from_settings().scaled(0.5)
        assert params.tau_dist == pytest.approx(0.01)
        assert params.kappa_break == pytest.approx(100.0)


class TestSmoothing:

    def test_straight_line_is_a_fixed_point(self):
        fragment = line_fragment(0, (0, 0, 0), (1, 2, 3), 15)
        np.testing.assert_allclose(smooth_fragment(fragment, 5.0).points, fragment.points, atol=1e-9)

    def test_open_fragment_keeps_endpoints_and_lowers_energy(self):
        rng = np.random.default_rng(1)
        base = line_fragment(0, (0, 0, 0), (1, 0, 0), 30)
        noisy = base.with_points(base.points + rng.normal(scale=0.005, size=base.points.shape))
        smoothed = smooth_fragment(noisy, 5.0)
        np.testing.assert_array_equal(smoothed.points[[0, -1]], noisy.points[[0, -1]])
        before = smoothing_objective(noisy.points, noisy.points, 5.0)
        after = smoothing_objective(smoothed.points, noisy.points, 5.0)
        assert after < before
        assert len(smoothed) == len(noisy)

    def test_closed_fragment_stays_closed(self):
        circle = circle_fragment(0, 0.5, 40)
        smoothed = smooth_fragment(circle, 1.0)
        assert smoothed.closed
        assert len(smoothed) == 40

    def test_short_fragment_is_untouched(self):
        fragment = CurveFragment(0, [[0, 0, 0], [1, 0.2, 0], [2, 0, 0]])
        assert smooth_fragment(fragment, 5.0) is fragment


class TestCurvature:

    def test_circle_has_inverse_radius_curvature(self):
        kappa = discrete_curvature(circle_fragment(0, 0.25, 36))
        np.testing.assert_allclose(kappa, 4.0, rtol=1e-9)

    def test_open_fragment_yields_interior_values(self):
        assert len(discrete_curvature(line_fragment(0, (0, 0, 0), (1, 0, 0), 10))) == 8

    def test_corner_is_found(self):
        assert corner_indices(l_shape(), 5.0) == [10]

    def test_break_shares_the_corner_sample(self):
        first, second = break_at_corners(l_shape(), 5.0)
        np.testing.assert_array_equal(first.end, second.start)
        assert len(first) == len(second) == 11

    def test_breaking_twice_changes_nothing(self):
        once = break_drawing_at_corners(drawing_of(l_shape()), 5.0)
        twice = break_drawing_at_corners(once, 5.0)
        assert len(once) == len(twice) == 2
        assert sorted(f.id for f in once) == [0, 1]

    def test_closed_square_opens_at_corners(self):
        square = CurveFragment(0, [[0, 0, 0], [0.5, 0, 0], [1, 0, 0], [1, 0.5, 0], [1, 1, 0],
                                   [0.5, 1, 0], [0, 1, 0], [0, 0.5, 0]], closed=True)
        pieces = break_at_corners(square, 1.0)
        assert len(pieces) == 4
        assert not any(p.closed for p in pieces)
        assert sum(arclength(p) for p in pieces) == pytest.approx(4.0)


class TestCocircularity:

    def test_points_on_a_circle_cost_nothing(self):
        cost = cocircularity((1, 0, 0), (0, 1, 0), (0, 1, 0), (-1, 0, 0))
        assert cost == pytest.approx(0.0, abs=1e-12)

    def test_collinear_continuation_costs_nothing(self):
        assert cocircularity((0, 0, 0), (1, 0, 0), (1, 0, 0), (1, 0, 0)) == pytest.approx(0.0, abs=1e-12)

    def test_turning_back_is_expensive(self):
        assert cocircularity((0, 0, 0), (1, 0, 0), (1, 0, 0), (-1, 0, 0)) == pytest.approx(np.pi)

    def test_coincident_points_are_undefined(self):
        with pytest.raises(ValueError):
            cocircularity((0, 0, 0), (1, 0, 0), (0, 0, 0), (1, 0, 0))

    def test_nearly_straight_tangents_in_crossed_planes_pay_full_torsion(self):
        c, s = np.cos(0.05), np.sin(0.05)
        cost = cocircularity((0, 0, 0), (c, s, 0), (1, 0, 0), (c, 0, s))
        assert cost == pytest.approx(np.pi / 2)
        assert cost > 0.35


class TestGrouping:

    def test_collinear_fragments_merge_at_their_node(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (1, 0, 0), 21),
            line_fragment(1, (1, 0, 0), (2, 0, 0), 21),
        )
        merged = merge_at_junctions(drawing, 0.35)
        assert len(merged) == 1
        assert len(merged.fragments[0]) == 41
        assert merged.fragments[0].id == 0

    def test_right_angle_junction_is_not_merged(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (1, 0, 0), 21),
            line_fragment(1, (1, 0, 0), (1, 1, 0), 21),
        )
        assert len(merge_at_junctions(drawing, 0.35)) == 2

    def test_chain_around_a_loop_closes(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (1, 0, 0), 11),
            line_fragment(1, (1, 0, 0), (0, 1, 0), 11),
            line_fragment(2, (0, 1, 0), (0, 0, 0), 11),
        )
        merged = merge_at_junctions(drawing, 4.0)
        assert len(merged) == 1
        loop = merged.fragments[0]
        assert loop.closed
        assert len(loop) == 30
        loop.validate()

    def test_small_gap_is_bridged(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (0.5, 0, 0), 21),
            line_fragment(1, (0.51, 0, 0), (1, 0, 0), 21),
        )
        bridged = bridge_gaps(drawing, 0.02, 0.35)
        assert len(bridged) == 1
        assert len(bridged.fragments[0]) == 42
        assert arclength(bridged.fragments[0]) == pytest.approx(1.0)

    def test_large_gap_is_left_open(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (0.5, 0, 0), 21),
            line_fragment(1, (0.6, 0, 0), (1, 0, 0), 21),
        )
        assert len(bridge_gaps(drawing, 0.02, 0.35)) == 2


class TestCleanup:

    def test_prune_short(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (0.01, 0, 0), 3),
            line_fragment(1, (0, 1, 0), (0.5, 1, 0), 3),
        )
        assert [f.id for f in prune_short(drawing, 0.03)] == [1]

    def test_contained_duplicate_is_removed(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (1, 0, 0), 51),
            line_fragment(1, (0.2, 0.001, 0), (0.5, 0.001, 0), 16),
        )
        assert [f.id for f in dedup_overlaps(drawing, 0.005)] == [0]

    def test_partial_duplicate_is_trimmed(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (1, 0, 0), 51),
            line_fragment(1, (0.8, 0.001, 0), (1.5, 0.001, 0), 36),
        )
        result = dedup_overlaps(drawing, 0.005)
        assert len(result) == 2
        assert result.fragment(1).points[:, 0].min() > 1.0

    def test_resample_keeps_endpoints(self):
        fragment = CurveFragment(0, [[0, 0, 0], [0.3, 0, 0], [1, 0, 0]])
        out = resample(fragment, 0.1)
        assert len(out) == 11
        np.testing.assert_array_equal(out.points[[0, -1]], fragment.points[[0, -1]])
        np.testing.assert_allclose(np.diff(out.points[:, 0]), 0.1)

    def test_resample_closed_keeps_at_least_four_samples(self):
        assert len(resample(circle_fragment(0, 0.001, 12), 0.1)) == 4


class TestReorganize:

    def drawing(self):
        return drawing_of(
            line_fragment(0, (0, 0, 0), (0.5, 0, 0), 21),
            line_fragment(1, (0.51, 0, 0), (1, 0, 0), 21),
            line_fragment(2, (3, 3, 3), (3.01, 3, 3), 3),
        )

    def test_gap_is_bridged_and_stray_pruned(self):
        result, report = reorganize_with_report(self.drawing(), ReorgParams.from_settings())
        assert len(result) == 1
        assert arclength(result.fragments[0]) == pytest.approx(1.0)
        assert report.bridged == 1
        assert report.pruned >= 1
        assert report.rounds == 3

    def test_threads_do_not_change_the_result(self):
        params = ReorgParams.from_settings()
        single = reorganize(self.drawing(), params, threads=1)
        pooled = reorganize(self.drawing(), params, threads=4)
        assert [f.id for f in single] == [f.id for f in pooled]
        for a, b in zip(single, pooled):
            np.testing.assert_array_equal(a.points, b.points)

    def test_gapped_box_edges_are_restored(self):
        drawing, _, truth = generate(SceneSpec.from_settings(scene="box", gap_rate=1.0, n_views=2))
        assert sum(d["type"] == "gap" for d in truth.defects) == 12
        assert len(drawing) == 24

        result, report = reorganize_with_report(drawing, ReorgParams.from_settings(tau_dist=0.4))
        assert len(result) == 12
        assert report.bridged == 12
        assert report.merged == 0
        for fragment in result:
            centered = fragment.points - fragment.points.mean(axis=0)
            assert np.linalg.svd(centered, compute_uv=False)[1] < 1e-6
            assert arclength(fragment) == pytest.approx(1.0, abs=0.05)
