import math

import pytest

from pedgraph.directions import build_directions, compass_name
from pedgraph.router import CostProfile, shortest_path

from test_router import make_graph

FLAT = CostProfile(name="flat")


def steps_for(graph, origin, dest):
    route = shortest_path(graph, FLAT, origin, dest)
    return route, build_directions(route, graph)


class TestSteps:
    def test_single_straight_sidewalk(self):
        g = make_graph([(0, 0), (100, 0)], [(0, 1)])
        route, steps = steps_for(g, 0, 1)
        assert [s.maneuver for s in steps] == ["depart", "arrive"]
        assert steps[0].instruction == "Head east for 100 m"

    def test_crossing_opens_its_own_step(self):
        g = make_graph(
            [(0, 0), (100, 0), (110, 0), (210, 0)],
            [(0, 1), (1, 2, {"kind": "crossing"}), (2, 3)],
        )
        _, steps = steps_for(g, 0, 3)
        assert [s.maneuver for s in steps] == [
            "depart", "cross_street", "continue", "arrive",
        ]

    def test_right_angle_turn(self):
        g = make_graph([(0, 0), (100, 0), (100, -80)], [(0, 1), (1, 2)])
        _, steps = steps_for(g, 0, 2)
        assert [s.maneuver for s in steps] == ["depart", "turn_right", "arrive"]

    def test_left_turn(self):
        g = make_graph([(0, 0), (100, 0), (100, 80)], [(0, 1), (1, 2)])
        _, steps = steps_for(g, 0, 2)
        assert [s.maneuver for s in steps] == ["depart", "turn_left", "arrive"]

    def test_gentle_bend_merges_into_continue(self):
        # 20 degree bend stays below the 30 degree turn threshold.
        g = make_graph(
            [(0, 0), (100, 0), (100 + 100 * math.cos(math.radians(20)), 100 * math.sin(math.radians(20)))],
            [(0, 1), (1, 2)],
        )
        _, steps = steps_for(g, 0, 2)
        assert [s.maneuver for s in steps] == ["depart", "arrive"]
        assert steps[0].length == pytest.approx(200.0)

    def test_just_past_turn_threshold(self):
        rad = math.radians(31)
        g = make_graph(
            [(0, 0), (100, 0), (100 + 100 * math.cos(rad), -100 * math.sin(rad))],
            [(0, 1), (1, 2)],
        )
        _, steps = steps_for(g, 0, 2)
        assert [s.maneuver for s in steps] == ["depart", "turn_right", "arrive"]

    def test_just_under_turn_threshold(self):
        rad = math.radians(29)
        g = make_graph(
            [(0, 0), (100, 0), (100 + 100 * math.cos(rad), -100 * math.sin(rad))],
            [(0, 1), (1, 2)],
        )
        _, steps = steps_for(g, 0, 2)
        assert [s.maneuver for s in steps] == ["depart", "arrive"]

    def test_steps_partition_edges_and_lengths_sum(self):
        g = make_graph(
            [(0, 0), (50, 0), (50, 60), (60, 60), (120, 60)],
            [(0, 1), (1, 2), (2, 3, {"kind": "crossing"}), (3, 4)],
        )
        route, steps = steps_for(g, 0, 4)
        covered = [eid for s in steps for eid in s.edge_ids]
        assert covered == route.edge_ids
        assert sum(s.length for s in steps) == pytest.approx(route.total_length)

    def test_empty_route(self):
        g = make_graph([(0, 0), (100, 0)], [(0, 1)])
        route, steps = steps_for(g, 0, 0)
        assert [s.maneuver for s in steps] == ["arrive"]
        assert steps[0].length == 0.0

    def test_reverse_traversal_direction_narrated(self):
        g = make_graph([(0, 0), (100, 0)], [(0, 1)])
        _, steps = steps_for(g, 1, 0)
        assert steps[0].instruction == "Head west for 100 m"


class TestCompass:
    @pytest.mark.parametrize(
        "bearing,name",
        [
            (0, "north"), (44, "northeast"), (90, "east"), (135, "southeast"),
            (180, "south"), (225, "southwest"), (270, "west"), (315, "northwest"),
            (359, "north"),
        ],
    )
    def test_names(self, bearing, name):
        assert compass_name(bearing) == name
