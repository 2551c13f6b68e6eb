from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from curve_surfacing.curve_graph import arclength
from curve_surfacing.exceptions import DrawingParseError, StatusTransitionError
from curve_surfacing.hypothesis import (
    CLOSED, CONFIRMED, FORMED, REDUNDANT, REJECTED, UNVERIFIABLE, DrawingPairSource, HypothesisParams,
    _selected, curve_distance, form_hypotheses, load_hypotheses, save_hypotheses, view_topology_neighbors
)
from curve_surfacing.loft import ANTIPARALLEL, PARALLEL, LoftParams, loft_pair
from curve_surfacing.signals import hypothesis_status_changed

from .utils import circle_fragment, drawing_of, line_fragment, parallel_rails, square_fragment, top_view


def params(**overrides):
    return HypothesisParams.from_settings(**overrides)


@pytest.fixture(scope="module")
def square_hypothesis():
    drawing = drawing_of(square_fragment(0, 1.0, 10))
    hypotheses = form_hypotheses(drawing, [], params(), threads=1)
    assert len(hypotheses) == 1
    return hypotheses[0]


class TestStatus:

    def test_formed_hypothesis(self, square_hypothesis):
        assert square_hypothesis.id == 0
        assert square_hypothesis.status == FORMED
        assert square_hypothesis.pairing == CLOSED
        assert square_hypothesis.source_fragment_ids == (0,)
        assert square_hypothesis.area == pytest.approx(1.0, rel=0.02)

    def test_history_grows_forward(self, square_hypothesis):
        confirmed = square_hypothesis.with_status(CONFIRMED)
        redundant = confirmed.with_status(REDUNDANT)
        assert redundant.history == (FORMED, CONFIRMED, REDUNDANT)
        assert square_hypothesis.status == FORMED

    @pytest.mark.parametrize("first,second", [
        (CONFIRMED, REJECTED),
        (REJECTED, CONFIRMED),
        (REDUNDANT, CONFIRMED),
        (UNVERIFIABLE, CONFIRMED),
        (FORMED, REDUNDANT),
    ])
    def test_no_going_back(self, square_hypothesis, first, second):
        with pytest.raises(StatusTransitionError):
            square_hypothesis.with_status(first).with_status(second)

    @pytest.mark.parametrize("first", [CONFIRMED, UNVERIFIABLE, REJECTED])
    def test_any_decided_status_can_become_redundant(self, square_hypothesis, first):
        assert square_hypothesis.with_status(first).with_status(REDUNDANT).status == REDUNDANT

    def test_same_status_is_a_no_op(self, square_hypothesis):
        assert square_hypothesis.with_status(FORMED) is square_hypothesis

    def test_transition_sends_signal(self, square_hypothesis):
        seen = []

        def receiver(sender, hypothesis, old_status, new_status, **kwargs):
            seen.append((hypothesis.id, old_status, new_status))

        hypothesis_status_changed.connect(receiver)
        try:
            square_hypothesis.with_status(REJECTED)
        finally:
            hypothesis_status_changed.disconnect(receiver)
        assert seen == [(0, FORMED, REJECTED)]


class TestCurveDistance:

    def test_parallel_rails(self):
        c1, c2 = parallel_rails(separation=0.5)
        assert curve_distance(c1, c2) == pytest.approx(0.5)

    def test_symmetric(self):
        c1 = line_fragment(0, (0, 0, 0), (1, 0, 0), 11)
        c2 = line_fragment(1, (0, 0.2, 0), (2, 0.7, 0), 31)
        assert curve_distance(c1, c2) == pytest.approx(curve_distance(c2, c1))


class TestCandidatePairs:

    def pairs(self, drawing, views=(), **overrides):
        return DrawingPairSource().candidate_pairs(drawing, list(views), params(**overrides))

    def test_close_rails_pass_the_proximity_gate(self):
        drawing = drawing_of(*parallel_rails(separation=0.1))
        assert self.pairs(drawing, topology_mode="off") == [(0, 1)]

    def test_distant_rails_need_topology(self):
        drawing = drawing_of(*parallel_rails(separation=1.0))
        assert self.pairs(drawing, topology_mode="off") == []
        assert self.pairs(drawing, [top_view()], topology_mode="or") == [(0, 1)]

    def test_only_mode_ignores_proximity(self):
        drawing = drawing_of(*parallel_rails(separation=0.1))
        assert self.pairs(drawing, topology_mode="only") == []

    def test_view_topology_switch(self):
        drawing = drawing_of(*parallel_rails(separation=1.0))
        assert self.pairs(drawing, [top_view()], use_view_topology=False) == []

    def test_closed_and_short_fragments_are_not_rails(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (1, 0, 0)),
            line_fragment(1, (0, 0.05, 0), (0.01, 0.05, 0), 3),
            circle_fragment(2, 0.1, center=(0.5, 0.05, 0)),
        )
        assert self.pairs(drawing, topology_mode="off") == []

    def test_middle_rail_hides_the_outer_pair(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (1, 0, 0)),
            line_fragment(1, (0, 0.5, 0), (1, 0.5, 0)),
            line_fragment(2, (0, 1, 0), (1, 1, 0)),
        )
        assert view_topology_neighbors(drawing, [top_view()]) == {(0, 1), (1, 2)}

    def test_collinear_samples_fall_back_to_nearest(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0.5, 0), (0.4, 0.5, 0)),
            line_fragment(1, (0.6, 0.5, 0), (1, 0.5, 0)),
        )
        assert view_topology_neighbors(drawing, [top_view()]) == {(0, 1)}


class TestFormHypotheses:

    def test_planar_strip_between_rails(self):
        drawing = drawing_of(*parallel_rails(separation=0.1))
        hypotheses = form_hypotheses(drawing, [], params(topology_mode="off"), threads=1)
        assert len(hypotheses) == 1
        hypothesis = hypotheses[0]
        assert hypothesis.source_fragment_ids == (0, 1)
        assert hypothesis.area == pytest.approx(0.1, rel=0.05)
        assert not hypothesis.degenerate

    def test_curvature_threshold_is_strict(self):
        drawing = drawing_of(
            line_fragment(0, (0, 0, 0), (1, 0, 0)),
            line_fragment(1, (0, 0.5, 1), (1, 0.5, -1)),
        )
        loose = params(topology_mode="off", tau_alpha=1.0, tau_G=1e6)
        kept, = form_hypotheses(drawing, [], loose, threads=1)
        assert kept.mean_abs_K > 0
        strict = params(topology_mode="off", tau_alpha=1.0, tau_G=kept.mean_abs_K)
        assert form_hypotheses(drawing, [], strict, threads=1) == []

    def test_closed_fragments_come_first(self):
        drawing = drawing_of(
            *parallel_rails(separation=0.1, first_id=0),
            square_fragment(5, 0.5, 8, z=2.0),
        )
        hypotheses = form_hypotheses(drawing, [], params(topology_mode="off"), threads=1)
        assert [h.source_fragment_ids for h in hypotheses] == [(5,), (0, 1)]
        assert [h.id for h in hypotheses] == [0, 1]

    def test_short_closed_fragment_is_still_filled(self):
        tiny = square_fragment(0, 0.005, 10)
        assert arclength(tiny) < params().tau_length
        hypothesis, = form_hypotheses(drawing_of(tiny), [], params(), threads=1)
        assert hypothesis.source_fragment_ids == (0,)
        assert hypothesis.area == pytest.approx(0.005 ** 2, rel=0.02)

    def test_threads_do_not_change_the_result(self):
        drawing = drawing_of(*parallel_rails(separation=0.1), square_fragment(5, 0.5, 8, z=2.0))
        single = form_hypotheses(drawing, [], params(topology_mode="off"), threads=1)
        pooled = form_hypotheses(drawing, [], params(topology_mode="off"), threads=3)
        for a, b in zip(single, pooled):
            np.testing.assert_array_equal(a.mesh.vertices, b.mesh.vertices)

    def test_pairing_with_the_lower_curvature_wins(self):
        rails = (line_fragment(0, (0, 0, 0), (1, 0, 0)), line_fragment(1, (0, 0.5, 1), (1, 0.5, -1)))
        loose = params(topology_mode="off", tau_alpha=1.0, tau_G=1e6)
        kept, = form_hypotheses(drawing_of(*rails), [], loose, threads=1)
        loft_params = LoftParams.from_settings()
        lofts = {p: loft_pair(rails[0], rails[1], p, loft_params) for p in (PARALLEL, ANTIPARALLEL)}
        expected = min((PARALLEL, ANTIPARALLEL), key=lambda p: lofts[p].mean_abs_K)
        assert kept.pairing == expected
        assert kept.mean_abs_K == pytest.approx(lofts[expected].mean_abs_K)


class TestSelection:

    def result(self, K, degenerate=False):
        return SimpleNamespace(mean_abs_K=K, degenerate=degenerate)

    def test_lowest_curvature_wins_even_if_degenerate(self):
        bowtie = self.result(0.1, degenerate=True)
        assert _selected([bowtie, self.result(0.5)]) is bowtie

    def test_tie_goes_to_parallel(self):
        first, second = self.result(0.2), self.result(0.2)
        assert _selected([first, second]) is first

    def test_failed_and_undefined_pairings_lose(self):
        finite = self.result(3.0)
        assert _selected([None, finite]) is finite
        assert _selected([self.result(float("nan")), finite]) is finite
        assert _selected([None, None]) is None

    def test_degenerate_winner_is_dropped_not_replaced(self, monkeypatch):
        rails = parallel_rails(separation=0.1)
        flat = loft_pair(rails[0], rails[1], PARALLEL, LoftParams.from_settings())

        def loft_or_none(job, loft_params):
            kind, fragments = job
            if kind == PARALLEL:
                return replace(flat, degenerate=True)
            return replace(flat, pairing=ANTIPARALLEL, mean_abs_K=flat.mean_abs_K + 1.0)

        monkeypatch.setattr("curve_surfacing.hypothesis._loft_or_none", loft_or_none)
        assert form_hypotheses(drawing_of(*rails), [], params(topology_mode="off"), threads=1) == []


class TestStorage:

    def test_save_and_load(self, tmp_path, square_hypothesis):
        rejected = square_hypothesis.with_status(UNVERIFIABLE)
        save_hypotheses([rejected], tmp_path, extra={"stage": "verify"})
        loaded, = load_hypotheses(tmp_path)
        assert loaded.status == UNVERIFIABLE
        assert loaded.history == (FORMED, UNVERIFIABLE)
        assert loaded.pairing == CLOSED
        np.testing.assert_array_equal(loaded.mesh.boundary_tags, rejected.mesh.boundary_tags)
        np.testing.assert_allclose(loaded.mesh.vertices, rejected.mesh.vertices)
        assert (tmp_path / "hyp_0000.obj").exists()
        assert (tmp_path / "hyp_0000.json").exists()

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DrawingParseError):
            load_hypotheses(tmp_path)
