import itertools
import math

import pytest

from pedgraph.data import Feature, SidewalkSet, StreetSet
from pedgraph.denoise import (
    build_street_topology,
    classify_corner_endpoints,
    connect_block_corners,
    detect_t_intersections,
    loose_endpoints,
    repair_t_gaps,
)
from pedgraph.errors import EmptyDatasetError
from pedgraph.geometry import GeoPoint, Polyline, distance

ORIGIN = GeoPoint(-122.3321, 47.6062)


def street_set(lines):
    return StreetSet(
        features=[Feature(f"street{i}", Polyline(pts)) for i, pts in enumerate(lines)],
        origin=ORIGIN,
    )


def sidewalk_set(lines, ids=None):
    feats = []
    for i, pts in enumerate(lines):
        fid = ids[i] if ids else f"sw{i}"
        feats.append(Feature(fid, Polyline(pts)))
    return SidewalkSet(features=feats, origin=ORIGIN)


class TestStreetTopology:
    def test_shared_endpoint_merges(self):
        nodes = build_street_topology(street_set([
            [(0, 0), (100, 0)], [(0, 0), (0, 100)],
        ]))
        shared = [n for n in nodes if n.degree == 2]
        assert len(shared) == 1
        assert shared[0].location == (0.0, 0.0)

    def test_four_way_plus(self):
        nodes = build_street_topology(street_set([
            [(0, 0), (0, 100)], [(0, 0), (100, 0)],
            [(0, 0), (0, -100)], [(0, 0), (-100, 0)],
        ]))
        center = [n for n in nodes if n.degree == 4]
        assert len(center) == 1
        assert sorted(round(b) for b in center[0].bearings()) == [0, 90, 180, 270]

    def test_snap_tolerance_inclusive_behavior(self):
        nodes = build_street_topology(street_set([
            [(0, 0), (100, 0)], [(0.4, 0), (0.4, 100)],
        ]), snap_tol=0.5)
        assert any(n.degree == 2 for n in nodes)
        nodes = build_street_topology(street_set([
            [(0, 0), (100, 0)], [(0.6, 0), (0.6, 100)],
        ]), snap_tol=0.5)
        assert not any(n.degree == 2 for n in nodes)

    def test_empty_streets_rejected(self):
        with pytest.raises(EmptyDatasetError):
            build_street_topology(StreetSet(features=[], origin=ORIGIN))

    def test_departure_bearing_uses_first_ten_meters(self):
        # Line that leaves north then veers east after 10 m.
        nodes = build_street_topology(street_set([
            [(0, 0), (0, 10), (50, 10)],
            [(0, 0), (0, -50)],
        ]))
        node = [n for n in nodes if n.degree == 2][0]
        bearings = sorted(node.bearings())
        assert bearings[0] == pytest.approx(0.0)  # not pulled east yet


class TestDetectT:
    def make_node(self, bearings):
        lines = []
        for i, b in enumerate(bearings):
            rad = math.radians(b)
            end = (100 * math.sin(rad), 100 * math.cos(rad))
            lines.append([(0, 0), end])
        return build_street_topology(street_set(lines))

    def test_right_angle_t_detected(self):
        nodes = self.make_node([0, 90, 180])
        ts = detect_t_intersections(nodes)
        assert len(ts) == 1
        assert sorted(ts[0].through_bearings) == [pytest.approx(0), pytest.approx(180)]
        assert ts[0].stem_bearing == pytest.approx(90)

    def test_symmetric_threeway_not_detected(self):
        nodes = self.make_node([0, 120, 240])
        assert detect_t_intersections(nodes) == []

    def test_interior_of_band_detected(self):
        nodes = self.make_node([0, 95, 175])
        assert len(detect_t_intersections(nodes)) == 1

    def test_just_below_band_not_detected(self):
        nodes = self.make_node([0, 95, 169.9])
        assert detect_t_intersections(nodes) == []

    def test_degree_four_ignored(self):
        nodes = self.make_node([0, 90, 180, 270])
        assert detect_t_intersections(nodes) == []

    def test_invariant_under_street_order(self):
        for perm in itertools.permutations([0, 95, 175]):
            nodes = self.make_node(list(perm))
            assert len(detect_t_intersections(nodes)) == 1


def t_fixture(gap, sidewalk_y=5.0):
    """Through street W-E along y=0, stem south; gap centered on the stem."""
    streets = street_set([
        [(0, 0), (200, 0)],
        [(0, 0), (-200, 0)],
        [(0, 0), (0, -200)],
    ])
    half = gap / 2.0
    sidewalks = sidewalk_set([
        [(-half, sidewalk_y), (-half - 80, sidewalk_y)],
        [(half, sidewalk_y), (half + 80, sidewalk_y)],
        # stem-side walks that must not be T-connected
        [(-half, -sidewalk_y), (-half - 80, -sidewalk_y)],
        [(half, -sidewalk_y), (half + 80, -sidewalk_y)],
    ], ids=["nw", "ne", "sw", "se"])
    nodes = build_street_topology(streets)
    t_nodes = detect_t_intersections(nodes)
    return sidewalks, t_nodes


class TestRepairTGaps:
    def test_ten_meter_gap_bridged(self):
        sidewalks, t_nodes = t_fixture(gap=10.0)
        repaired, actions, metrics = repair_t_gaps(sidewalks, t_nodes)
        assert len(actions) == 1
        assert actions[0].kind == "t_connector"
        assert actions[0].gap_m == pytest.approx(10.0)
        joined_features = {actions[0].joined[0][0], actions[0].joined[1][0]}
        assert joined_features == {"nw", "ne"}
        assert metrics == {
            "t_nodes": 1, "t_nodes_with_candidates": 1, "t_nodes_repaired": 1,
        }

    def test_hundred_foot_limit(self):
        sidewalks, t_nodes = t_fixture(gap=30.48)
        _, actions, _ = repair_t_gaps(sidewalks, t_nodes)
        assert len(actions) == 1

        sidewalks, t_nodes = t_fixture(gap=30.49)
        _, actions, metrics = repair_t_gaps(sidewalks, t_nodes)
        assert actions == []
        assert metrics["t_nodes_repaired"] == 0

    def test_no_sidewalks_near_node(self):
        streets = street_set([
            [(0, 0), (200, 0)], [(0, 0), (-200, 0)], [(0, 0), (0, -200)],
        ])
        sidewalks = sidewalk_set([[(500, 5), (600, 5)]])
        nodes = build_street_topology(streets)
        _, actions, metrics = repair_t_gaps(sidewalks, detect_t_intersections(nodes))
        assert actions == []
        assert metrics["t_nodes_with_candidates"] == 0

    def test_original_geometry_untouched(self):
        sidewalks, t_nodes = t_fixture(gap=10.0)
        before = {f.id: f.geometry.points for f in sidewalks}
        repaired, _, _ = repair_t_gaps(sidewalks, t_nodes)
        assert {f.id for f in repaired} >= set(before)
        for f in repaired:
            if f.id in before:
                assert f.geometry.points == before[f.id]

    def test_connector_endpoints_coincide_with_sidewalk_ends(self):
        sidewalks, t_nodes = t_fixture(gap=10.0)
        repaired, actions, _ = repair_t_gaps(sidewalks, t_nodes)
        lookup = {f.id: f for f in repaired}
        for action in actions:
            (fa, ea), (fb, eb) = action.joined
            pa = lookup[fa].endpoint(ea)
            pb = lookup[fb].endpoint(eb)
            ends = {action.geometry.start, action.geometry.end}
            assert any(distance(pa, e) < 1e-6 for e in ends)
            assert any(distance(pb, e) < 1e-6 for e in ends)


def four_way_fixture():
    streets = street_set([
        [(0, 0), (0, 200)], [(0, 0), (200, 0)],
        [(0, 0), (0, -200)], [(0, 0), (-200, 0)],
    ])
    nodes = build_street_topology(streets)
    return streets, nodes


class TestClassifyCorners:
    def test_wedge_membership(self):
        _, nodes = four_way_fixture()
        sidewalks = sidewalk_set([[(5, 5), (5, 80)]], ids=["ne_walk"])
        sectors = classify_corner_endpoints(sidewalks, nodes)
        assert len(sectors) == 4
        ne = [s for s in sectors if s.b_lo == pytest.approx(0.0)][0]
        assert [ref for ref, _ in ne.members] == [("ne_walk", 0)]

    def test_radius_threshold(self):
        _, nodes = four_way_fixture()
        sidewalks = sidewalk_set([[(0, 31), (0, 80)]])
        sectors = classify_corner_endpoints(sidewalks, nodes, corner_radius=30.0)
        assert all(("sw0", 0) not in [r for r, _ in s.members] for s in sectors)

    def test_on_street_bearing_goes_clockwise(self):
        _, nodes = four_way_fixture()
        # Endpoint due north of the node, exactly on the N street bearing.
        sidewalks = sidewalk_set([[(0, 10), (0, 80)]])
        sectors = classify_corner_endpoints(sidewalks, nodes)
        holder = [s for s in sectors if (("sw0", 0) in [r for r, _ in s.members])]
        assert len(holder) == 1
        assert holder[0].b_lo == pytest.approx(0.0)  # the [N, E) sector

    def test_each_endpoint_in_at_most_one_sector(self):
        _, nodes = four_way_fixture()
        sidewalks = sidewalk_set([
            [(5, 5), (5, 80)], [(5, -5), (80, -5)], [(-4, -6), (-80, -6)],
        ])
        sectors = classify_corner_endpoints(sidewalks, nodes)
        seen = []
        for s in sectors:
            seen.extend(ref for ref, _ in s.members)
        assert len(seen) == len(set(seen))

    def test_nearest_intersection_wins(self):
        streets = street_set([
            [(0, 0), (0, 200)], [(0, 0), (200, 0)], [(0, 0), (0, -200)],
            [(200, 0), (200, 200)], [(200, 0), (400, 0)], [(200, 0), (200, -200)],
        ])
        nodes = build_street_topology(streets)
        sidewalks = sidewalk_set([[(20, 5), (150, 5)]])  # start closer to node at x=0
        sectors = classify_corner_endpoints(sidewalks, nodes, corner_radius=100.0)
        for s in sectors:
            for ref, _ in s.members:
                if ref == ("sw0", 0):
                    assert s.node.location == (0.0, 0.0)


def exhaustive_best_matching(points, max_gap):
    """Max-cardinality matching minimizing total gap; endpoints (ref, point)."""
    best = (0, 0.0, [])

    def recurse(remaining, pairs, total):
        nonlocal best
        score = (len(pairs), -total)
        if score > (best[0], -best[1]):
            best = (len(pairs), total, list(pairs))
        if len(remaining) < 2:
            return
        first = remaining[0]
        rest = remaining[1:]
        recurse(rest, pairs, total)
        for i, other in enumerate(rest):
            if first[0][0] == other[0][0]:
                continue
            gap = distance(first[1], other[1])
            if gap > max_gap:
                continue
            recurse(
                rest[:i] + rest[i + 1:],
                pairs + [(first[0], other[0])],
                total + gap,
            )

    recurse(points, [], 0.0)
    return best


class TestConnectCorners:
    def run_sector(self, walk_lines, ids):
        _, nodes = four_way_fixture()
        sidewalks = sidewalk_set(walk_lines, ids=ids)
        sectors = classify_corner_endpoints(sidewalks, nodes)
        return connect_block_corners(sidewalks, sectors)

    def test_two_endpoints_one_connector(self):
        repaired, actions, metrics = self.run_sector(
            [[(5, 8), (5, 80)], [(8, 5), (80, 5)]], ids=["a", "b"]
        )
        assert len(actions) == 1
        assert actions[0].kind == "corner_connector"
        assert actions[0].gap_m == pytest.approx(math.hypot(3, 3))
        assert metrics["sectors_edited"] == 1

    def test_same_feature_never_self_loops(self):
        _, actions, _ = self.run_sector([[(5, 8), (8, 5)]], ids=["solo"])
        assert actions == []

    def test_two_pairs_match_exhaustive_oracle(self):
        # Two tight pairs in the NE sector, plus distractors far away.
        lines = [
            [(5, 10), (5, 80)], [(7, 12), (80, 12)],
            [(20, 5), (20, -80)], [(22, 7), (90, 7)],
        ]
        repaired, actions, _ = self.run_sector(lines, ids=["a", "b", "c", "d"])
        got = sorted(a.canonical_pair() for a in actions)

        _, nodes = four_way_fixture()
        sidewalks = sidewalk_set(lines, ids=["a", "b", "c", "d"])
        sectors = classify_corner_endpoints(sidewalks, nodes)
        ne = [s for s in sectors if s.b_lo == pytest.approx(0.0)][0]
        count, total, pairs = exhaustive_best_matching(sorted(ne.members), 30.48)
        want = sorted(tuple(sorted(p)) for p in pairs)
        assert got == want
        assert len(got) == 2

    def test_coincident_endpoints_not_reconnected(self):
        # Two features sharing a vertex are already joined; no connector.
        _, actions, _ = self.run_sector(
            [[(5, 5), (5, 80)], [(5, 5), (80, 5)]], ids=["a", "b"]
        )
        assert actions == []

    def test_gap_cap_respected(self):
        _, actions, _ = self.run_sector(
            [[(5, 40), (5, 80)], [(40, 5), (80, 5)]], ids=["a", "b"]
        )
        assert actions == []  # ~49.5 m apart > 30.48

    def test_repairs_additive_and_bounded(self):
        repaired, actions, _ = self.run_sector(
            [[(5, 8), (5, 80)], [(8, 5), (80, 5)]], ids=["a", "b"]
        )
        assert len(repaired) == 3
        for action in actions:
            assert action.gap_m <= 30.48


class TestLooseEndpoints:
    def test_shared_vertex_is_not_loose(self):
        sidewalks = sidewalk_set([[(0, 0), (10, 0)], [(10, 0), (20, 0)]])
        loose = {ref for ref, _ in loose_endpoints(sidewalks)}
        assert loose == {("sw0", 0), ("sw1", 1)}


class TestDeterminism:
    def test_identical_inputs_identical_repairs(self):
        from pedgraph.synth import CityParams, generate_city
        from pedgraph.pipeline import build_graph

        def run():
            city = generate_city(CityParams(blocks_x=3, blocks_y=3, noise_sigma=1.5, seed=9))
            result = build_graph(city.sidewalks, city.streets)
            return [
                (a.kind, a.joined, a.gap_m, a.geometry.points) for a in result.repairs
            ]

        assert run() == run()
