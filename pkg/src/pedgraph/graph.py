"""The routable graph: nodes, attributed edges, indices, persistence.

A built graph is immutable and safe to share across concurrent readers.
The JSON document format keeps WGS84 coordinates (lon, lat) plus the
projection origin so a graph file is self-contained.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import FormatError
from .geometry import GeoPoint, LocalPoint, Polyline, project, unproject
from .spatial import GridIndex

EDGE_KINDS = ("sidewalk", "t_connector", "corner_connector", "crossing")


@dataclass
class GraphNode:
    id: int
    location: LocalPoint
    elevation: float = 0.0


@dataclass
class GraphEdge:
    id: int
    a: int
    b: int
    geometry: Polyline
    kind: str
    length: float
    elev_delta: float = 0.0
    grade: float = 0.0
    curb_ramp_at_a: bool = False
    curb_ramp_at_b: bool = False
    crossed_street: Optional[str] = None
    construction_intervals: list[tuple[dt.date, dt.date]] = field(default_factory=list)
    source_feature: Optional[str] = None

    def other(self, node_id: int) -> int:
        return self.b if node_id == self.a else self.a

    def endpoints_key(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a <= self.b else (self.b, self.a)

    def under_construction(self, query_date: dt.date) -> bool:
        return any(s <= query_date <= e for s, e in self.construction_intervals)


class RoutingGraph:
    """Undirected graph with adjacency and a spatial index over nodes."""

    def __init__(self, nodes: list[GraphNode], edges: list[GraphEdge], origin: GeoPoint,
                 meta: Optional[dict] = None):
        self.nodes = nodes
        self.edges = edges
        self.origin = origin
        self.meta = meta or {}
        self.adjacency: list[list[int]] = [[] for _ in nodes]
        for e in edges:
            self.adjacency[e.a].append(e.id)
            self.adjacency[e.b].append(e.id)
        cell = 50.0
        self.node_index = GridIndex(cell_size=cell)
        for n in nodes:
            self.node_index.insert(n.id, n.location)

    # -- basic queries ------------------------------------------------------

    def __repr__(self) -> str:
        return f"RoutingGraph({len(self.nodes)} nodes, {len(self.edges)} edges)"

    def node(self, node_id: int) -> GraphNode:
        return self.nodes[node_id]

    def edge(self, edge_id: int) -> GraphEdge:
        return self.edges[edge_id]

    def incident_edges(self, node_id: int) -> Iterator[GraphEdge]:
        for eid in self.adjacency[node_id]:
            yield self.edges[eid]

    def nearest_node(self, p: LocalPoint, max_radius: Optional[float] = None
                     ) -> Optional[tuple[int, float]]:
        return self.node_index.nearest(p, max_radius=max_radius)

    def nodes_within(self, p: LocalPoint, radius: float) -> list[tuple[int, float]]:
        return self.node_index.within(p, radius)

    def component_count(self) -> int:
        seen = [False] * len(self.nodes)
        count = 0
        for start in range(len(self.nodes)):
            if seen[start]:
                continue
            count += 1
            stack = [start]
            seen[start] = True
            while stack:
                v = stack.pop()
                for e in self.incident_edges(v):
                    u = e.other(v)
                    if not seen[u]:
                        seen[u] = True
                        stack.append(u)
        return count

    # -- persistence ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        nodes = []
        for n in self.nodes:
            lon, lat = unproject(n.location, self.origin)
            nodes.append({"id": n.id, "lon": lon, "lat": lat, "elev": n.elevation})
        edges = []
        for e in self.edges:
            edges.append({
                "id": e.id,
                "a": e.a,
                "b": e.b,
                "kind": e.kind,
                "length_m": e.length,
                "elev_delta_m": e.elev_delta,
                "grade": e.grade,
                "curb_ramp_a": e.curb_ramp_at_a,
                "curb_ramp_b": e.curb_ramp_at_b,
                "crossed_street": e.crossed_street,
                "construction": [
                    {"start": s.isoformat(), "end": en.isoformat()}
                    for s, en in e.construction_intervals
                ],
                "geometry": [list(unproject(p, self.origin)) for p in e.geometry.points],
            })
        return {
            "origin": [self.origin.lon, self.origin.lat],
            "nodes": nodes,
            "edges": edges,
            "meta": self.meta,
        }

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh)
            fh.write("\n")

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RoutingGraph":
        try:
            origin = GeoPoint(doc["origin"][0], doc["origin"][1])
            nodes = [
                GraphNode(
                    id=int(n["id"]),
                    location=project(GeoPoint(n["lon"], n["lat"]), origin),
                    elevation=float(n.get("elev", 0.0)),
                )
                for n in doc["nodes"]
            ]
            nodes.sort(key=lambda n: n.id)
            edges = []
            for raw in doc["edges"]:
                geometry = Polyline(
                    project(GeoPoint(c[0], c[1]), origin) for c in raw["geometry"]
                )
                edges.append(
                    GraphEdge(
                        id=int(raw["id"]),
                        a=int(raw["a"]),
                        b=int(raw["b"]),
                        geometry=geometry,
                        kind=str(raw["kind"]),
                        length=float(raw["length_m"]),
                        elev_delta=float(raw.get("elev_delta_m", 0.0)),
                        grade=float(raw.get("grade", 0.0)),
                        curb_ramp_at_a=bool(raw.get("curb_ramp_a", False)),
                        curb_ramp_at_b=bool(raw.get("curb_ramp_b", False)),
                        crossed_street=raw.get("crossed_street"),
                        construction_intervals=[
                            (
                                dt.date.fromisoformat(iv["start"]),
                                dt.date.fromisoformat(iv["end"]),
                            )
                            for iv in raw.get("construction", [])
                        ],
                    )
                )
            edges.sort(key=lambda e: e.id)
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed graph document: {exc}") from exc
        if any(n.id != i for i, n in enumerate(nodes)) or any(
            e.id != i for i, e in enumerate(edges)
        ):
            raise FormatError("graph ids must be dense and start at 0")
        return cls(nodes=nodes, edges=edges, origin=origin, meta=doc.get("meta", {}))

    @classmethod
    def load(cls, path: str) -> "RoutingGraph":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise FormatError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path} is not valid JSON: {exc}") from exc
        return cls.from_json_dict(doc)

    # -- exports --------------------------------------------------------------

    def edge_geojson(self, e: GraphEdge) -> dict:
        return {
            "type": "Feature",
            "id": f"edge{e.id}",
            "geometry": {
                "type": "LineString",
                "coordinates": [list(unproject(p, self.origin)) for p in e.geometry.points],
            },
            "properties": {
                "edge_id": e.id,
                "kind": e.kind,
                "length_m": e.length,
                "elev_delta_m": e.elev_delta,
                "grade": e.grade,
                "curb_ramp_a": e.curb_ramp_at_a,
                "curb_ramp_b": e.curb_ramp_at_b,
                "crossed_street": e.crossed_street,
                "construction": [
                    {"start": s.isoformat(), "end": en.isoformat()}
                    for s, en in e.construction_intervals
                ],
            },
        }

    def to_geojson(self, edges: Optional[list[GraphEdge]] = None) -> dict:
        chosen = self.edges if edges is None else edges
        return {
            "type": "FeatureCollection",
            "features": [self.edge_geojson(e) for e in chosen],
        }
