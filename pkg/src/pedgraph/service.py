"""HTTP API over a built graph: routing, network export, profiles, health.

Coordinates in requests and responses are always WGS84 (lon, lat) order,
matching GeoJSON. The CLI ``route`` command builds its output through the
same response functions, so API and CLI results are byte-identical.
"""

from __future__ import annotations

import datetime as dt
import json
from typing import Optional, Union

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from .directions import Step, build_directions
from .errors import NoRouteError, SchemaError, UnroutableWaypointError
from .geometry import GeoPoint, LocalPoint, segment_intersection, unproject
from .graph import RoutingGraph
from .router import PRESETS, CostProfile, Route, resolve_profile, shortest_path, snap


def render_json(doc: dict) -> str:
    """The one serializer both the API and the CLI use."""
    return json.dumps(doc, allow_nan=False)


def route_response_dict(graph: RoutingGraph, route: Route, steps: list[Step]) -> dict:
    geometry: list[list[float]] = []
    if route.is_empty:
        node = graph.node(route.node_ids[0])
        geometry.append(list(unproject(node.location, graph.origin)))
    else:
        for eid, fwd in zip(route.edge_ids, route.forward):
            pts = graph.edge(eid).geometry.points
            if not fwd:
                pts = tuple(reversed(pts))
            for p in pts:
                lonlat = list(unproject(p, graph.origin))
                if geometry and geometry[-1] == lonlat:
                    continue
                geometry.append(lonlat)

    warnings = []
    missing_ramps = sum(
        1
        for eid in route.edge_ids
        if graph.edge(eid).kind == "crossing"
        and not (graph.edge(eid).curb_ramp_at_a and graph.edge(eid).curb_ramp_at_b)
    )
    if missing_ramps:
        warnings.append(f"route uses {missing_ramps} crossing(s) lacking curb ramps")

    return {
        "status": "ok",
        "geometry": geometry,
        "steps": [s.to_dict() for s in steps],
        "total_length_m": route.total_length,
        "total_cost": route.total_cost,
        "max_grade": route.max_grade,
        "elevation_profile": [[d, z] for d, z in route.elevation_profile],
        "warnings": warnings,
    }


def run_route_query(
    graph: RoutingGraph,
    origin: GeoPoint,
    destination: GeoPoint,
    profile_spec: Union[str, dict, CostProfile],
    query_date: Optional[dt.date] = None,
    snap_radius: float = 100.0,
) -> dict:
    """Shared core for the API endpoint and the CLI command."""
    profile = resolve_profile(profile_spec)
    profile = profile.with_query_date(query_date or profile.query_date or dt.date.today())
    src = snap(graph, origin, radius=snap_radius)
    dst = snap(graph, destination, radius=snap_radius)
    route = shortest_path(graph, profile, src, dst)
    steps = build_directions(route, graph)
    return route_response_dict(graph, route, steps)


class RouteRequest(BaseModel):
    origin: tuple[float, float] = Field(description="(lon, lat)")
    destination: tuple[float, float] = Field(description="(lon, lat)")
    profile: Union[str, dict] = "default"
    query_date: Optional[dt.date] = None


def _bbox_from_string(raw: str) -> tuple[float, float, float, float]:
    parts = raw.split(",")
    if len(parts) != 4:
        raise SchemaError("bbox must be 'minlon,minlat,maxlon,maxlat'")
    try:
        minlon, minlat, maxlon, maxlat = (float(p) for p in parts)
    except ValueError as exc:
        raise SchemaError(f"bbox values must be numbers: {exc}") from exc
    if minlon > maxlon or minlat > maxlat:
        raise SchemaError("bbox is inverted: min must not exceed max")
    return minlon, minlat, maxlon, maxlat


def _edge_in_bbox(edge_coords: list[list[float]], bbox: tuple[float, float, float, float]) -> bool:
    minlon, minlat, maxlon, maxlat = bbox
    for lon, lat in edge_coords:
        if minlon <= lon <= maxlon and minlat <= lat <= maxlat:
            return True
    corners = [
        LocalPoint(minlon, minlat), LocalPoint(maxlon, minlat),
        LocalPoint(maxlon, maxlat), LocalPoint(minlon, maxlat),
    ]
    rect_sides = list(zip(corners, corners[1:] + corners[:1]))
    for a, b in zip(edge_coords, edge_coords[1:]):
        pa, pb = LocalPoint(a[0], a[1]), LocalPoint(b[0], b[1])
        for q1, q2 in rect_sides:
            try:
                if segment_intersection(pa, pb, q1, q2) is not None:
                    return True
            except Exception:
                continue
    return False


def create_app(graph: RoutingGraph) -> FastAPI:
    app = FastAPI(title="pedgraph", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.graph = graph

    # Precompute WGS84 coordinates per edge for bbox queries.
    edge_coords: dict[int, list[list[float]]] = {
        e.id: [list(unproject(p, graph.origin)) for p in e.geometry.points]
        for e in graph.edges
    }

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "bad_request", "detail": exc.errors()},
        )

    @app.post("/route")
    def post_route(req: RouteRequest):
        try:
            doc = run_route_query(
                graph,
                GeoPoint(*req.origin),
                GeoPoint(*req.destination),
                req.profile,
                req.query_date,
            )
        except SchemaError as exc:
            return JSONResponse(
                status_code=400, content={"error": "bad_request", "detail": str(exc)}
            )
        except UnroutableWaypointError as exc:
            return JSONResponse(
                status_code=422,
                content={
                    "error": "unroutable_waypoint",
                    "detail": str(exc),
                    "nearest_m": exc.nearest_m,
                },
            )
        except NoRouteError as exc:
            return JSONResponse(
                status_code=404,
                content={
                    "error": "no_route",
                    "detail": str(exc),
                    "constraints": exc.constraints,
                },
            )
        return Response(content=render_json(doc), media_type="application/json")

    @app.get("/network")
    def get_network(bbox: str):
        try:
            box = _bbox_from_string(bbox)
        except SchemaError as exc:
            return JSONResponse(
                status_code=400, content={"error": "bad_request", "detail": str(exc)}
            )
        chosen = [e for e in graph.edges if _edge_in_bbox(edge_coords[e.id], box)]
        return JSONResponse(content=graph.to_geojson(chosen))

    @app.get("/profiles")
    def get_profiles():
        return JSONResponse(content=[p.to_dict() for p in PRESETS.values()])

    @app.get("/health")
    def get_health():
        return JSONResponse(
            content={
                "status": "ok",
                "nodes": len(graph.nodes),
                "edges": len(graph.edges),
            }
        )

    return app
