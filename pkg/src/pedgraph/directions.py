"""Turn-by-turn step generation from a routed path."""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import bearing, signed_bearing_delta
from .graph import GraphEdge, RoutingGraph
from .router import Route

TURN_THRESHOLD_DEG = 30.0

COMPASS = ("north", "northeast", "east", "southeast", "south", "southwest", "west", "northwest")


@dataclass
class Step:
    instruction: str
    maneuver: str  # depart | continue | turn_left | turn_right | cross_street | arrive
    length: float
    edge_ids: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "instruction": self.instruction,
            "maneuver": self.maneuver,
            "length_m": self.length,
            "edge_ids": self.edge_ids,
        }


def compass_name(b: float) -> str:
    return COMPASS[int(((b + 22.5) % 360.0) // 45.0)]


def _entry_bearing(edge: GraphEdge, forward: bool) -> float:
    pts = edge.geometry.points if forward else tuple(reversed(edge.geometry.points))
    return bearing(pts[0], pts[1])


def _exit_bearing(edge: GraphEdge, forward: bool) -> float:
    pts = edge.geometry.points if forward else tuple(reversed(edge.geometry.points))
    return bearing(pts[-2], pts[-1])


def build_directions(route: Route, graph: RoutingGraph) -> list[Step]:
    """Group route edges into human-readable steps.

    Crossing edges always open a ``cross_street`` step; a bearing change of
    at least 30 degrees opens a turn step; the first step is ``depart`` and a
    terminal zero-length ``arrive`` step closes the list. Step lengths sum to
    the route length.
    """
    if route.is_empty:
        return [Step(instruction="Arrive at destination", maneuver="arrive", length=0.0)]

    edges = [graph.edge(eid) for eid in route.edge_ids]
    steps: list[Step] = []
    current: Step | None = None

    for i, (edge, fwd) in enumerate(zip(edges, route.forward)):
        if i == 0:
            maneuver = "depart"
        elif edge.kind == "crossing":
            maneuver = "cross_street"
        else:
            prev = edges[i - 1]
            turn = signed_bearing_delta(
                _exit_bearing(prev, route.forward[i - 1]), _entry_bearing(edge, fwd)
            )
            if turn >= TURN_THRESHOLD_DEG:
                maneuver = "turn_right"
            elif turn <= -TURN_THRESHOLD_DEG:
                maneuver = "turn_left"
            elif prev.kind == "crossing":
                maneuver = "continue"  # a sidewalk never extends a crossing step
            else:
                maneuver = None  # extend the current step
        if maneuver is None and current is not None:
            current.length += edge.length
            current.edge_ids.append(edge.id)
            continue
        if current is not None:
            steps.append(current)
        current = Step(instruction="", maneuver=maneuver, length=edge.length, edge_ids=[edge.id])

    if current is not None:
        steps.append(current)
    steps.append(Step(instruction="Arrive at destination", maneuver="arrive", length=0.0))

    for step, first_edge_index in zip(steps, _step_starts(steps)):
        if step.maneuver == "arrive":
            continue
        step.instruction = _instruction_text(
            step, edges[first_edge_index], route.forward[first_edge_index]
        )
    return steps


def _step_starts(steps: list[Step]) -> list[int]:
    starts = []
    index = 0
    for step in steps:
        starts.append(index)
        index += len(step.edge_ids)
    return starts


def _instruction_text(step: Step, first_edge: GraphEdge, forward: bool) -> str:
    dist = f"{step.length:.0f} m"
    if step.maneuver == "depart":
        head = compass_name(_entry_bearing(first_edge, forward))
        if first_edge.kind == "crossing":
            return f"Head {head} and cross the street ({dist})"
        return f"Head {head} for {dist}"
    if step.maneuver == "cross_street":
        return "Cross the street"
    if step.maneuver == "turn_right":
        return f"Turn right and continue for {dist}"
    if step.maneuver == "turn_left":
        return f"Turn left and continue for {dist}"
    return f"Continue for {dist}"
