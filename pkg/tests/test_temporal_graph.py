import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hosgns.errors import EmptyGraphError, ParseError
from hosgns.temporal_graph import (
    Event,
    TimeVaryingGraph,
    graph_volume,
    parse_contact_lines,
    stats,
)

from _oracles import make_graph, random_graph


class TestEvent:
    def test_canonical_order_enforced(self):
        with pytest.raises(ValueError):
            Event(3, 1, 0, 1.0)

    def test_self_event_rejected(self):
        with pytest.raises(ValueError):
            Event(2, 2, 0, 1.0)

    @pytest.mark.parametrize("w", [0.0, -1.0])
    def test_nonpositive_weight_rejected(self, w):
        with pytest.raises(ValueError):
            Event(0, 1, 0, w)


class TestParsing:
    def test_window_binning_and_dense_remap(self):
        # contacts at t=0 and t=20 share window 0; t=900 falls in window 1;
        # raw ids 5,7,9 remap to dense 0,1,2
        lines = ["0 5 7", "20 5 7", "900 7 9"]
        g = parse_contact_lines(lines, window_seconds=600)
        assert g.num_nodes == 3
        assert g.num_times == 2
        assert g.events == [Event(0, 1, 0, 2.0), Event(1, 2, 1, 1.0)]
        assert g.id_map == {5: 0, 7: 1, 9: 2}

    def test_empty_windows_dropped_and_reindexed(self):
        g = parse_contact_lines(["0 1 2", "5000 1 2"], window_seconds=600)
        assert g.num_times == 2
        assert sorted(e.k for e in g.events) == [0, 1]
        assert g.time_map == {0: 0, 8: 1}

    def test_comments_and_blank_lines_skipped(self):
        g = parse_contact_lines(["# header", "", "0 1 2"], window_seconds=600)
        assert g.num_events == 1

    def test_empty_stream_raises(self):
        with pytest.raises(EmptyGraphError):
            parse_contact_lines(io.StringIO(""), window_seconds=600)

    def test_malformed_line_reports_line_number(self):
        with pytest.raises(ParseError) as err:
            parse_contact_lines(["0 1 2", "0 x 2"], window_seconds=600)
        assert err.value.line_number == 2

    def test_short_line_rejected(self):
        with pytest.raises(ParseError):
            parse_contact_lines(["0 1"], window_seconds=600)

    def test_self_contact_rejected(self):
        with pytest.raises(ParseError):
            parse_contact_lines(["0 4 4"], window_seconds=600)

    def test_zero_window_rejected(self):
        with pytest.raises(ValueError):
            parse_contact_lines(["0 1 2"], window_seconds=0)


class TestGraph:
    def test_active_pairs_exactly_event_endpoints(self, chain_graph):
        expected = {(0, 0), (1, 0), (0, 1), (1, 1), (1, 2), (2, 2)}
        assert chain_graph.active_pairs == frozenset(expected)

    def test_active_times_of(self, chain_graph):
        assert chain_graph.active_times_of(0) == [0, 1]
        assert chain_graph.active_times_of(1) == [0, 1, 2]
        assert chain_graph.active_times_of(2) == [2]

    def test_event_index_validation(self):
        with pytest.raises(ValueError):
            TimeVaryingGraph(num_nodes=2, num_times=1,
                             events=[Event(0, 5, 0, 1.0)])
        with pytest.raises(ValueError):
            TimeVaryingGraph(num_nodes=2, num_times=1,
                             events=[Event(0, 1, 3, 1.0)])

    def test_json_round_trip(self, medium_graph):
        restored = TimeVaryingGraph.from_json(medium_graph.to_json())
        assert restored.events == medium_graph.events
        assert restored.num_nodes == medium_graph.num_nodes
        assert restored.num_times == medium_graph.num_times
        assert restored.to_json() == medium_graph.to_json()


class TestStats:
    def test_single_event(self, tiny_graph):
        s = stats(tiny_graph)
        assert s.num_nodes == 2 and s.num_times == 1
        assert s.avg_weight == 1.0
        assert s.node_density == 1.0
        assert s.link_density == 1.0

    def test_avg_weight_is_total_over_count(self, medium_graph):
        s = stats(medium_graph)
        total = sum(e.weight for e in medium_graph.events)
        assert s.avg_weight == pytest.approx(total / medium_graph.num_events,
                                             rel=1e-9)

    def test_empty_graph_raises(self):
        g = make_graph([(0, 1, 0)])
        g.events = []
        with pytest.raises(EmptyGraphError):
            stats(g)


class TestVolume:
    def test_one_unit_event(self, tiny_graph):
        assert graph_volume(tiny_graph) == 2.0

    def test_two_weighted_events(self):
        g = make_graph([(0, 1, 0, 2.0), (1, 2, 0, 3.0)])
        assert graph_volume(g) == 10.0


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_random_graph_invariants(seed):
    g = random_graph(np.random.default_rng(seed))
    # endpoints of every event are active; times are contiguous
    for e in g.events:
        assert (e.i, e.k) in g.active_pairs
        assert (e.j, e.k) in g.active_pairs
    assert {e.k for e in g.events} == set(range(g.num_times))
    s = stats(g)
    assert 0 < s.node_density <= 1
    assert graph_volume(g) == pytest.approx(s.avg_weight * s.num_events * 2)
