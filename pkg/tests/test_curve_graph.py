import json

import numpy as np
import pytest

from curve_surfacing.curve_graph import (
    END, START, CameraView, CurveDrawing, CurveFragment, EdgeMap, QuadMesh, TriMesh, arclength,
    build_nodes, load_cameras, load_drawing, load_edge_map, load_trimesh, project_curve,
    save_cameras, save_drawing, save_edge_map, write_obj
)
from curve_surfacing.exceptions import DrawingParseError, DrawingValidationError, EmptyProjectionError

from .utils import circle_fragment, line_fragment, ring_views, top_view


class TestCurveFragment:

    def test_points_are_read_only(self):
        fragment = line_fragment(0, (0, 0, 0), (1, 0, 0), 5)
        with pytest.raises(ValueError):
            fragment.points[0, 0] = 3.0

    def test_arclength_of_closed_fragment_includes_closing_segment(self):
        square = CurveFragment(0, [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], closed=True)
        assert arclength(square) == pytest.approx(4.0)
        assert arclength(square.with_points(square.points, closed=False)) == pytest.approx(3.0)

    def test_reversed_swaps_endpoints(self):
        fragment = line_fragment(3, (0, 0, 0), (1, 0, 0), 5)
        flipped = fragment.reversed()
        assert flipped.id == 3
        np.testing.assert_array_equal(flipped.start, fragment.end)

    def test_validate_rejects_single_point(self):
        with pytest.raises(DrawingValidationError):
            CurveFragment(1, [[0, 0, 0]]).validate()

    def test_validate_rejects_coincident_samples(self):
        with pytest.raises(DrawingValidationError) as ctx:
            CurveFragment(4, [[0, 0, 0], [0, 0, 0], [1, 0, 0]]).validate()
        assert ctx.value.fragment_id == 4

    def test_validate_rejects_repeated_first_point_on_closed(self):
        with pytest.raises(DrawingValidationError):
            CurveFragment(0, [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 0, 0]], closed=True).validate()

    def test_validate_rejects_nan(self):
        with pytest.raises(DrawingValidationError):
            CurveFragment(0, [[0, 0, 0], [np.nan, 0, 0]]).validate()


class TestNodes:

    def test_shared_endpoints_form_a_node(self):
        a = line_fragment(0, (0, 0, 0), (1, 0, 0))
        b = line_fragment(1, (1, 0, 0), (1, 1, 0))
        c = line_fragment(2, (5, 5, 5), (6, 5, 5))
        nodes = build_nodes([a, b, c])
        assert len(nodes) == 1
        assert nodes[0].incident == ((0, END), (1, START))
        assert nodes[0].degree == 2

    def test_closed_fragments_have_no_nodes(self):
        assert build_nodes([circle_fragment(0, 1.0)]) == ()

    def test_drawing_sorts_fragments_by_id(self):
        drawing = CurveDrawing((
            line_fragment(5, (0, 0, 0), (1, 0, 0)),
            line_fragment(2, (0, 1, 0), (1, 1, 0)),
        ))
        assert [f.id for f in drawing] == [2, 5]
        assert drawing.next_id() == 6

    def test_duplicated_ids_fail_validation(self):
        drawing = CurveDrawing((
            line_fragment(1, (0, 0, 0), (1, 0, 0)),
            line_fragment(1, (0, 1, 0), (1, 1, 0)),
        ))
        with pytest.raises(DrawingValidationError):
            drawing.validate()


class TestDrawingIO:

    def test_save_and_load_keeps_coordinates_exactly(self, tmp_path):
        fragment = CurveFragment(7, [[0.1, 0.2, 0.3], [1.0 / 3.0, 2.0 / 7.0, 0.5]])
        drawing = CurveDrawing((fragment, circle_fragment(8, 0.25)))
        path = save_drawing(drawing, tmp_path / "drawing.json")
        loaded = load_drawing(path)
        np.testing.assert_array_equal(loaded.fragment(7).points, fragment.points)
        assert loaded.fragment(8).closed

    def test_missing_field_names_the_field(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"fragments": [{"id": 0}]}))
        with pytest.raises(DrawingParseError) as ctx:
            load_drawing(path)
        assert ctx.value.field == "fragments[0].points"

    def test_malformed_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "fragments": [\n    {"id": 0,,}\n  ]\n}\n')
        with pytest.raises(DrawingParseError) as ctx:
            load_drawing(path)
        assert ctx.value.line == 3

    @pytest.mark.parametrize("fragment_id", ["a", 1.5, True, None])
    def test_non_integer_id_is_a_parse_error(self, tmp_path, fragment_id):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"fragments": [{"id": fragment_id, "points": [[0, 0, 0], [1, 0, 0]]}]}))
        with pytest.raises(DrawingParseError) as ctx:
            load_drawing(path)
        assert ctx.value.field == "fragments[0].id"

    def test_malformed_node_is_a_parse_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({
            "fragments": [{"id": 0, "points": [[0, 0, 0], [1, 0, 0]]}],
            "nodes": [{"point": [0, 0], "incident": [[0, "start"]]}],
        }))
        with pytest.raises(DrawingParseError) as ctx:
            load_drawing(path)
        assert ctx.value.field == "nodes[0]"

    def test_node_away_from_endpoint_fails(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({
            "fragments": [{"id": 0, "points": [[0, 0, 0], [1, 0, 0]]}],
            "nodes": [{"point": [0.5, 0, 0], "incident": [[0, "start"]]}],
        }))
        with pytest.raises(DrawingValidationError):
            load_drawing(path)


class TestEdgeMap:

    def test_orientations_are_folded_into_half_turn(self):
        edges = EdgeMap([[0, 0], [1, 1]], [np.pi, -np.pi / 4])
        assert edges.orientations[0] == pytest.approx(0.0)
        assert edges.orientations[1] == pytest.approx(3 * np.pi / 4)

    def test_negative_strength_is_rejected(self):
        with pytest.raises(ValueError):
            EdgeMap([[0, 0]], [0.0], [-1.0])

    def test_csv_roundtrip(self, tmp_path):
        edges = EdgeMap([[1.5, 2.5], [3.0, 4.0]], [0.25, 1.0], [1.0, 0.5])
        loaded = load_edge_map(save_edge_map(edges, tmp_path / "e.csv"))
        np.testing.assert_array_equal(loaded.positions, edges.positions)
        np.testing.assert_array_equal(loaded.strengths, edges.strengths)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(DrawingParseError):
            load_edge_map(path)

    def test_bad_row_reports_its_line(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("x,y,theta,strength\n1,2,0.5,1\n\n3,four,0.5,1\n")
        with pytest.raises(DrawingParseError) as ctx:
            load_edge_map(path)
        assert ctx.value.line == 4

    def test_elements_rebuild_the_map(self):
        edges = EdgeMap([[1.5, 2.5], [3.0, 4.0]], [0.25, np.pi + 1.0], [1.0, 0.5])
        elements = list(edges.elements())
        assert elements[1].position == (3.0, 4.0)
        assert elements[1].orientation == pytest.approx(1.0)
        rebuilt = EdgeMap.from_elements(elements)
        np.testing.assert_array_equal(rebuilt.positions, edges.positions)
        np.testing.assert_allclose(rebuilt.orientations, edges.orientations)
        assert len(EdgeMap.from_elements([])) == 0


class TestCameraView:

    def test_look_at_projects_target_to_principal_point(self):
        view = ring_views(count=1)[0]
        np.testing.assert_allclose(view.project([[0, 0, 0]])[0], [320.0, 240.0], atol=1e-9)

    def test_camera_center_is_the_eye(self):
        view = CameraView.look_at(0, (3.0, 1.0, 2.0), (0, 0, 0), 400.0, 640, 480)
        np.testing.assert_allclose(view.camera_center, [3.0, 1.0, 2.0], atol=1e-9)

    def test_points_behind_camera_project_to_nan(self):
        view = top_view()
        pixels = view.project([[0.5, 0.5, 0.0], [0.5, 0.5, 10.0]])
        assert np.all(np.isfinite(pixels[0]))
        assert np.all(np.isnan(pixels[1]))

    def test_depth_grows_away_from_camera(self):
        view = top_view()
        near, far = view.depth([[0.5, 0.5, 1.0], [0.5, 0.5, -1.0]])
        assert far > near > 0

    def test_cameras_roundtrip_with_edges(self, tmp_path):
        views = [v.with_edges(EdgeMap([[10, 20]], [0.5])) for v in ring_views(count=2)]
        path = save_cameras(views, tmp_path / "cameras.json")
        loaded = load_cameras(path)
        assert [v.id for v in loaded] == [0, 1]
        np.testing.assert_allclose(loaded[1].projection, views[1].projection)
        assert len(loaded[0].edges) == 1


class TestProjectCurve:

    def test_curve_fully_behind_camera_raises(self):
        view = top_view()
        fragment = line_fragment(0, (0, 0, 5), (1, 0, 5))
        with pytest.raises(EmptyProjectionError):
            project_curve(fragment, view)

    def test_partially_clipped_curve_keeps_front_samples(self):
        view = top_view(distance=3.0)
        fragment = line_fragment(0, (0.5, 0.5, 2.0), (0.5, 0.5, 4.0), 21)
        projected = project_curve(fragment, view)
        assert len(projected) + len(projected.clipped) == 21
        assert len(projected.clipped) > 0

    def test_arclength_is_measured_in_3d(self):
        fragment = line_fragment(0, (0, 0, 0), (1, 0, 0), 11)
        projected = project_curve(fragment, top_view())
        assert projected.s[-1] == pytest.approx(1.0)
        assert projected.pixel_length > 0


class TestMeshes:

    def test_triangulated_quad_keeps_area(self):
        quad = QuadMesh([[0, 0, 0], [2, 0, 0], [2, 1, 0], [0, 1, 0]], [[0, 1, 2, 3]])
        assert quad.triangulate().area() == pytest.approx(2.0)

    def test_quad_with_repeated_vertex_is_rejected(self):
        with pytest.raises(ValueError):
            QuadMesh([[0, 0, 0], [1, 0, 0], [1, 1, 0]], [[0, 1, 2, 2]])

    def test_concatenate_offsets_faces(self):
        a = TriMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
        both = TriMesh.concatenate([a, a.transformed(translation=(0, 0, 1))])
        assert both.faces.max() == 5
        assert both.area() == pytest.approx(1.0)

    def test_obj_quads_are_fan_triangulated(self, tmp_path):
        path = write_obj(tmp_path / "m.obj", [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], [[0, 1, 2, 3]])
        mesh = load_trimesh(path)
        assert mesh.faces.shape == (2, 3)
        assert mesh.area() == pytest.approx(1.0)
