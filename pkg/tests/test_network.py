import json

import pytest

from wclplan.errors import NetworkFormatError
from wclplan.network import (RURAL_SPEEDS, URBAN_SPEEDS, RoadSegment,
                             budget_from_fraction, filter_categories,
                             graph_from_records, load_network,
                             traversal_time, with_speeds)

from helpers import make_line_graph


def test_default_speeds_by_category():
    assert URBAN_SPEEDS[1] == 60
    assert URBAN_SPEEDS[3] == 30
    assert URBAN_SPEEDS[8] == 5
    assert RURAL_SPEEDS[1] == 70
    assert RURAL_SPEEDS[5] == 35
    urban = graph_from_records(
        [{"id": "a", "length_mi": 3.0, "category": 4,
          "start": "x", "end": "y"}], "urban")
    rural = graph_from_records(
        [{"id": "a", "length_mi": 3.0, "category": 4,
          "start": "x", "end": "y"}], "rural")
    assert urban.segment("a").speed == 20
    assert rural.segment("a").speed == 45


def test_explicit_speed_and_cost_defaults():
    g = graph_from_records(
        [{"id": "a", "length_mi": 3.0, "category": 4, "speed_mph": 33.0,
          "start": "x", "end": "y"},
         {"id": "b", "length_mi": 2.5, "category": 2, "cost": 9.0,
          "start": "y", "end": "z"}], "urban")
    assert g.segment("a").speed == 33.0
    assert g.segment("a").cost == 3.0      # defaults to the length
    assert g.segment("b").cost == 9.0


def test_traversal_time_is_length_over_speed():
    seg = RoadSegment(id="a", length=6.0, category=2, speed=45.0,
                      cost=6.0, start="x", end="y")
    assert traversal_time(seg) == pytest.approx(6.0 / 45.0)


def test_adjacency_end_to_start():
    g = graph_from_records(
        [{"id": "a", "length_mi": 1.0, "category": 2, "start": "p", "end": "q"},
         {"id": "b", "length_mi": 2.0, "category": 2, "start": "q", "end": "r"},
         {"id": "c", "length_mi": 3.0, "category": 2, "start": "q", "end": "s"},
         {"id": "d", "length_mi": 4.0, "category": 2, "start": "s", "end": "p"}],
        "urban")
    assert g.successors("a") == ("b", "c")
    assert g.predecessors("b") == ("a",)
    assert g.successors("d") == ("a",)
    # edge weight is the traversal time of the source segment
    assert g.edge_weight("a", "b") == pytest.approx(1.0 / 45.0)
    assert g.num_edges() == 4


@pytest.mark.parametrize("record", [
    {"id": "a", "length_mi": -1.0, "category": 2, "start": "x", "end": "y"},
    {"id": "a", "length_mi": 1.0, "category": 9, "start": "x", "end": "y"},
    {"id": "a", "length_mi": 1.0, "category": 0, "start": "x", "end": "y"},
    {"id": "a", "length_mi": 1.0, "category": 2, "speed_mph": 0.0,
     "start": "x", "end": "y"},
    {"id": "a", "length_mi": 1.0, "category": 2, "start": "", "end": "y"},
])
def test_invalid_segment_records(record):
    with pytest.raises(NetworkFormatError):
        graph_from_records([record], "urban")


def test_duplicate_ids_rejected():
    recs = [{"id": "a", "length_mi": 1.0, "category": 2,
             "start": "x", "end": "y"}] * 2
    with pytest.raises(NetworkFormatError):
        graph_from_records(recs, "urban")


def test_unknown_setting_rejected():
    with pytest.raises(NetworkFormatError):
        graph_from_records(
            [{"id": "a", "length_mi": 1.0, "category": 2,
              "start": "x", "end": "y"}], "suburban")


def test_load_network_json_roundtrip(tmp_path):
    path = tmp_path / "net.json"
    path.write_text(json.dumps({
        "setting": "urban",
        "segments": [
            {"id": "a", "length_mi": 2.0, "category": 3,
             "start": "x", "end": "y"},
            {"id": "b", "length_mi": 4.0, "category": 2,
             "start": "y", "end": "z"}]}), encoding="utf-8")
    g = load_network(path)
    assert len(g) == 2
    assert g.successors("a") == ("b",)
    assert g.total_length == pytest.approx(6.0)


def test_filter_categories():
    g = graph_from_records(
        [{"id": "a", "length_mi": 1.0, "category": 2, "start": "x", "end": "y"},
         {"id": "b", "length_mi": 1.0, "category": 6, "start": "y", "end": "z"}],
        "urban")
    f = filter_categories(g, 4)
    assert list(f.node_ids()) == ["a"]
    assert f.num_edges() == 0


def test_budget_from_fraction():
    g = make_line_graph(4, length=5.0)
    assert g.total_cost == pytest.approx(20.0)
    assert budget_from_fraction(g, 0.25) == pytest.approx(5.0)


def test_with_speeds_replaces_only_named_segments():
    g = make_line_graph(3)
    h = with_speeds(g, {"u2": 12.5})
    assert h.segment("u2").speed == 12.5
    assert h.segment("u1").speed == g.segment("u1").speed
    # original untouched
    assert g.segment("u2").speed != 12.5
