"""Preference-weighted routing over the assembled graph.

Edge traversal cost combines distance, directional uphill grade, curb-ramp
presence at crossings, and dated construction impacts. Hard constraints are
realized by excluding the edge (cost ``None``) rather than by a large finite
penalty, so a "least-bad" route can never silently violate them.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field, replace
from heapq import heappop, heappush
from typing import Optional, Union

from .errors import ExtentError, NoRouteError, SchemaError, UnroutableWaypointError
from .geometry import GeoPoint, project
from .graph import GraphEdge, RoutingGraph

HARD = "hard"
Penalty = Union[float, str]


@dataclass(frozen=True)
class CostProfile:
    """Named weight set defining the per-edge traversal cost.

    ``w_distance``, ``ramp_penalty`` and ``construction_penalty`` carry the
    cost scale: multiplying the three by k > 0 multiplies every finite path
    cost by exactly k, leaving best routes unchanged. ``w_grade`` shapes how
    steeply uphill grade inflates distance and is scale-free. Penalties may
    be the string "hard" to exclude the edge outright. Preset weights are
    provisional defaults, not calibrated against user studies.
    """

    name: str = "custom"
    w_distance: float = 1.0
    grade_ideal: float = 0.02
    grade_max: float = 0.0833
    w_grade: float = 1.0
    require_curb_ramps: bool = False
    ramp_penalty: Penalty = 0.0
    avoid_construction: bool = False
    construction_penalty: Penalty = 0.0
    query_date: Optional[dt.date] = None

    def __post_init__(self):
        if not (0.0 <= self.grade_ideal < self.grade_max):
            raise SchemaError(
                f"profile {self.name!r}: need 0 <= grade_ideal < grade_max, "
                f"got {self.grade_ideal} / {self.grade_max}"
            )
        for label, value in (
            ("w_distance", self.w_distance),
            ("w_grade", self.w_grade),
        ):
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                raise SchemaError(f"profile {self.name!r}: {label} must be finite and >= 0")
        for label, value in (
            ("ramp_penalty", self.ramp_penalty),
            ("construction_penalty", self.construction_penalty),
        ):
            if value == HARD:
                continue
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                raise SchemaError(
                    f"profile {self.name!r}: {label} must be finite >= 0 or 'hard'"
                )

    def scaled(self, k: float) -> "CostProfile":
        """Scale the cost-carrying weights by k; shape parameters untouched."""
        def scale(v: Penalty) -> Penalty:
            return v if v == HARD else v * k

        return replace(
            self,
            w_distance=self.w_distance * k,
            ramp_penalty=scale(self.ramp_penalty),
            construction_penalty=scale(self.construction_penalty),
        )

    def with_query_date(self, query_date: Optional[dt.date]) -> "CostProfile":
        return replace(self, query_date=query_date)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "w_distance": self.w_distance,
            "grade_ideal": self.grade_ideal,
            "grade_max": self.grade_max,
            "w_grade": self.w_grade,
            "require_curb_ramps": self.require_curb_ramps,
            "ramp_penalty": self.ramp_penalty,
            "avoid_construction": self.avoid_construction,
            "construction_penalty": self.construction_penalty,
            "query_date": self.query_date.isoformat() if self.query_date else None,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CostProfile":
        known = {
            "name", "w_distance", "grade_ideal", "grade_max", "w_grade",
            "require_curb_ramps", "ramp_penalty", "avoid_construction",
            "construction_penalty", "query_date",
        }
        unknown = set(doc) - known
        if unknown:
            raise SchemaError(f"unknown cost profile fields: {sorted(unknown)}")
        kwargs = dict(doc)
        if kwargs.get("query_date"):
            try:
                kwargs["query_date"] = dt.date.fromisoformat(str(kwargs["query_date"]))
            except ValueError as exc:
                raise SchemaError(f"malformed query_date: {exc}") from exc
        else:
            kwargs["query_date"] = None
        return cls(**kwargs)


PRESETS: dict[str, CostProfile] = {
    "default": CostProfile(
        name="default",
        w_grade=1.0,
        avoid_construction=True,
        construction_penalty=500.0,
    ),
    "powered_wheelchair": CostProfile(
        name="powered_wheelchair",
        w_grade=1.0,
        grade_ideal=0.01,
        grade_max=0.05,
        require_curb_ramps=True,
        ramp_penalty=500.0,
        avoid_construction=True,
        construction_penalty=HARD,
    ),
    "manual_assist": CostProfile(
        name="manual_assist",
        w_grade=2.0,
        grade_ideal=0.01,
        avoid_construction=True,
        construction_penalty=500.0,
    ),
}


def resolve_profile(spec: Union[str, dict, CostProfile]) -> CostProfile:
    if isinstance(spec, CostProfile):
        return spec
    if isinstance(spec, str):
        if spec not in PRESETS:
            raise SchemaError(
                f"unknown profile preset {spec!r}; available: {sorted(PRESETS)}"
            )
        return PRESETS[spec]
    if isinstance(spec, dict):
        return CostProfile.from_dict(spec)
    raise SchemaError(f"cannot interpret profile spec of type {type(spec).__name__}")


def edge_cost(edge: GraphEdge, forward: bool, profile: CostProfile) -> Optional[float]:
    """Traversal cost of one edge in one direction; None means excluded.

    Only uphill grade is penalized, but the hard grade cap applies in both
    directions (safety limits are symmetric).
    """
    if profile.w_grade > 0 and edge.grade > profile.grade_max:
        return None
    delta = edge.elev_delta if forward else -edge.elev_delta
    g = max(0.0, delta) / edge.length
    ramp = max(0.0, g - profile.grade_ideal) / (profile.grade_max - profile.grade_ideal)
    cost = profile.w_distance * edge.length * (1.0 + profile.w_grade * ramp)
    if (
        edge.kind == "crossing"
        and profile.require_curb_ramps
        and not (edge.curb_ramp_at_a and edge.curb_ramp_at_b)
    ):
        if profile.ramp_penalty == HARD:
            return None
        cost += profile.ramp_penalty
    if (
        profile.avoid_construction
        and profile.query_date is not None
        and edge.under_construction(profile.query_date)
    ):
        if profile.construction_penalty == HARD:
            return None
        cost += profile.construction_penalty
    return cost


def snap(graph: RoutingGraph, p: GeoPoint, radius: float = 100.0) -> int:
    """Nearest graph node within ``radius`` meters; ties go to the lowest id."""
    try:
        local = project(p, graph.origin)
    except ExtentError as exc:
        raise UnroutableWaypointError(
            f"waypoint ({p.lon}, {p.lat}) is outside the graph extent: {exc}",
            nearest_m=None,
        ) from exc
    hit = graph.nearest_node(local, max_radius=radius)
    if hit is not None:
        return hit[0]
    anywhere = graph.nearest_node(local)
    nearest = anywhere[1] if anywhere else math.inf
    raise UnroutableWaypointError(
        f"no graph node within {radius:.0f} m of ({p.lon}, {p.lat}); "
        f"nearest is {nearest:.1f} m away",
        nearest_m=nearest,
    )


@dataclass
class Route:
    node_ids: list[int]
    edge_ids: list[int]
    forward: list[bool]
    total_cost: float
    total_length: float
    max_grade: float
    # (cumulative distance, elevation) at every node along the route.
    elevation_profile: list[tuple[float, float]] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.edge_ids


def shortest_path(
    graph: RoutingGraph, profile: CostProfile, origin: int, dest: int
) -> Route:
    """Minimum-cost path via Dijkstra over cost-filtered edges.

    Deterministic: exact cost ties prefer the lexicographically smaller
    node-id sequence, then smaller edge ids.
    """
    n = len(graph.nodes)
    if not (0 <= origin < n and 0 <= dest < n):
        raise NoRouteError(f"node out of range: {origin} or {dest}")
    if origin == dest:
        node = graph.node(origin)
        return Route(
            node_ids=[origin], edge_ids=[], forward=[], total_cost=0.0,
            total_length=0.0, max_grade=0.0,
            elevation_profile=[(0.0, node.elevation)],
        )

    dist: dict[int, float] = {origin: 0.0}
    parent: dict[int, Optional[tuple[int, int]]] = {origin: None}
    done: set[int] = set()
    heap: list[tuple[float, int]] = [(0.0, origin)]

    def path_key(node_id: int, via: Optional[tuple[int, int]] = None) -> tuple:
        seq: list[int] = []
        eids: list[int] = []
        cur: Optional[int] = node_id
        if via is not None:
            seq.append(node_id)
            eids.append(via[1])
            cur = via[0]
        while cur is not None:
            seq.append(cur)
            link = parent[cur]
            if link is None:
                break
            eids.append(link[1])
            cur = link[0]
        return (tuple(reversed(seq)), tuple(reversed(eids)))

    while heap:
        d, v = heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v == dest:
            break
        for e in graph.incident_edges(v):
            u = e.other(v)
            if u in done:
                continue
            cost = edge_cost(e, forward=(v == e.a), profile=profile)
            if cost is None:
                continue
            nd = d + cost
            if u not in dist or nd < dist[u]:
                dist[u] = nd
                parent[u] = (v, e.id)
                heappush(heap, (nd, u))
            elif nd == dist[u] and path_key(u, (v, e.id)) < path_key(u):
                parent[u] = (v, e.id)
                heappush(heap, (nd, u))

    if dest not in done:
        raise _diagnose_no_route(graph, profile, origin, dest)

    edge_ids: list[int] = []
    forward: list[bool] = []
    node_ids = [dest]
    cur = dest
    while parent[cur] is not None:
        prev, eid = parent[cur]
        edge_ids.append(eid)
        forward.append(graph.edge(eid).a == prev)
        node_ids.append(prev)
        cur = prev
    edge_ids.reverse()
    forward.reverse()
    node_ids.reverse()

    total_length = math.fsum(graph.edge(eid).length for eid in edge_ids)
    max_grade = max((graph.edge(eid).grade for eid in edge_ids), default=0.0)
    profile_points = [(0.0, graph.node(node_ids[0]).elevation)]
    cum = 0.0
    for eid, nid in zip(edge_ids, node_ids[1:]):
        cum += graph.edge(eid).length
        profile_points.append((cum, graph.node(nid).elevation))
    return Route(
        node_ids=node_ids,
        edge_ids=edge_ids,
        forward=forward,
        total_cost=dist[dest],
        total_length=total_length,
        max_grade=max_grade,
        elevation_profile=profile_points,
    )


def _reachable(graph: RoutingGraph, profile: CostProfile, origin: int, dest: int) -> bool:
    seen = {origin}
    stack = [origin]
    while stack:
        v = stack.pop()
        if v == dest:
            return True
        for e in graph.incident_edges(v):
            u = e.other(v)
            if u in seen:
                continue
            if edge_cost(e, forward=(v == e.a), profile=profile) is None:
                continue
            seen.add(u)
            stack.append(u)
    return False


def _diagnose_no_route(
    graph: RoutingGraph, profile: CostProfile, origin: int, dest: int
) -> NoRouteError:
    """Name the constraint classes whose single relaxation restores a path."""
    relaxations = {
        "grade": replace(profile, w_grade=0.0),
        "curb_ramps": replace(profile, require_curb_ramps=False, ramp_penalty=0.0),
        "construction": replace(profile, avoid_construction=False),
    }
    restoring = [
        name for name, relaxed in relaxations.items()
        if _reachable(graph, relaxed, origin, dest)
    ]
    if restoring:
        msg = (
            f"no route from node {origin} to node {dest}; relaxing "
            f"{' or '.join(restoring)} would restore a path"
        )
    else:
        msg = f"no route from node {origin} to node {dest}; nodes are disconnected"
    return NoRouteError(msg, constraints=restoring)
