"""Street crossings, edge annotation, and graph assembly.

Crossings connect the block-corner sectors produced by the denoise stage
across their bounding streets; every candidate must geometrically cross the
street it claims to cross. Annotation then attaches elevation change, curb
ramp presence, and construction intervals to edges, and assembly merges
everything into the final routable graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .data import CurbRampSet, ElevationGrid, PermitSet, SidewalkSet, StreetSet
from .denoise import CornerSector
from .errors import EmptyDatasetError, ExtentError, NodataError, PedgraphError
from .geometry import (
    LocalPoint,
    Polyline,
    closest_point_on_polyline,
    distance,
    point_polyline_distance,
    polyline_min_distance,
    segment_intersection,
)
from .graph import GraphEdge, GraphNode, RoutingGraph
from .spatial import GridIndex


@dataclass
class CrossingProposal:
    """One accepted street crossing, prior to graph assembly."""

    start: LocalPoint
    end: LocalPoint
    crossed_street: str
    length: float
    sector_keys: list[tuple[int, int]] = field(default_factory=list)
    # When the far side had no corner endpoint, the crossing lands mid-edge
    # on a sidewalk, which must be split there during assembly.
    split: Optional[tuple[str, int, LocalPoint]] = None  # (feature id, seg index, point)

    def pair_key(self) -> tuple:
        a = (round(self.start[0], 6), round(self.start[1], 6))
        b = (round(self.end[0], 6), round(self.end[1], 6))
        return (a, b) if a <= b else (b, a)


def _street_crossed(street_line: Polyline, a: LocalPoint, b: LocalPoint) -> bool:
    return any(
        segment_intersection(a, b, s1, s2) is not None for s1, s2 in street_line.segments()
    )


def generate_crossings(
    sectors: list[CornerSector],
    streets: StreetSet,
    sidewalks: SidewalkSet,
    max_cross: float = 40.0,
) -> list[CrossingProposal]:
    """Propose one crossing per sector per bounding street.

    The target is the nearest endpoint of the sector across that street; when
    that sector is empty, the closest point on the nearest sidewalk across the
    street. A candidate is accepted only if its segment intersects the
    street's geometry and is no longer than ``max_cross``. Duplicate endpoint
    pairs are emitted once.
    """
    street_lines = {f.id: f.geometry for f in streets}
    by_node: dict[int, list[CornerSector]] = {}
    for s in sectors:
        by_node.setdefault(s.node.id, []).append(s)
    for node_sectors in by_node.values():
        node_sectors.sort(key=lambda s: s.index)

    # Index sample points along each sidewalk so long segments stay findable.
    sidewalk_index = GridIndex(cell_size=100.0)
    for f in sidewalks:
        for p in _sample_points(f.geometry, spacing=50.0):
            sidewalk_index.insert(f.id, p)

    accepted: dict[tuple, CrossingProposal] = {}
    for node_id in sorted(by_node):
        node_sectors = by_node[node_id]
        k = len(node_sectors)
        for sector in node_sectors:
            if not sector.members:
                continue
            # Opposite sectors share the bounding street: previous sector
            # across the low street, next sector across the high street.
            for street_id, opposite in (
                (sector.lo_street, node_sectors[(sector.index - 1) % k]),
                (sector.hi_street, node_sectors[(sector.index + 1) % k]),
            ):
                if opposite.index == sector.index:
                    continue
                street_line = street_lines[street_id]
                proposal = _propose(
                    sector, opposite, street_line, street_id, sidewalks,
                    sidewalk_index, max_cross,
                )
                if proposal is None:
                    continue
                key = proposal.pair_key()
                if key in accepted:
                    for sk in proposal.sector_keys:
                        if sk not in accepted[key].sector_keys:
                            accepted[key].sector_keys.append(sk)
                else:
                    accepted[key] = proposal
    return [accepted[k] for k in sorted(accepted)]


def _propose(
    sector: CornerSector,
    opposite: CornerSector,
    street_line: Polyline,
    street_id: str,
    sidewalks: SidewalkSet,
    sidewalk_index: GridIndex,
    max_cross: float,
) -> Optional[CrossingProposal]:
    best: Optional[CrossingProposal] = None
    if opposite.members:
        for _, p in sorted(sector.members):
            for _, q in sorted(opposite.members):
                d = distance(p, q)
                if d > max_cross or (best is not None and d >= best.length):
                    continue
                if d <= 1e-6 or not _street_crossed(street_line, p, q):
                    continue
                best = CrossingProposal(
                    start=p, end=q, crossed_street=street_id, length=d,
                    sector_keys=[sector.key, opposite.key],
                )
        return best
    # Far corner has nothing; aim for the closest point on a sidewalk across
    # the street instead.
    member_fids = {ref[0] for ref, _ in sector.members}
    for _, p in sorted(sector.members):
        candidate_fids = sorted({fid for fid, _ in sidewalk_index.within(p, max_cross + 55.0)})
        for fid in candidate_fids:
            if fid in member_fids:
                continue
            line = sidewalks.get(fid).geometry
            q, d, seg = closest_point_on_polyline(p, line)
            if d > max_cross or d <= 1e-6 or (best is not None and d >= best.length):
                continue
            if not _street_crossed(street_line, p, q):
                continue
            best = CrossingProposal(
                start=p, end=q, crossed_street=street_id, length=d,
                sector_keys=[sector.key], split=(fid, seg, q),
            )
    return best


def _sample_points(line: Polyline, spacing: float) -> list[LocalPoint]:
    out = list(line.points)
    for a, b in line.segments():
        seg_len = distance(a, b)
        n_extra = int(seg_len // spacing)
        for i in range(1, n_extra + 1):
            t = i * spacing / seg_len
            if t < 1.0:
                out.append(LocalPoint(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
    return out


def sample_elevation(grid: ElevationGrid, p: LocalPoint) -> float:
    """Bilinear elevation sample; exact at cell centers."""
    return grid.sample(p)


def assemble_graph(
    sidewalks: SidewalkSet,
    crossings: list[CrossingProposal],
    merge_tol: float = 0.01,
    meta: Optional[dict] = None,
) -> RoutingGraph:
    """Merge endpoints into nodes and build the routable graph.

    Endpoints within ``merge_tol`` collapse into one node whose location is
    the first endpoint seen; edge geometry is snapped onto node locations.
    Crossings that land mid-edge split the target sidewalk at that point.
    """
    if len(sidewalks) == 0 and not crossings:
        raise EmptyDatasetError("nothing to assemble: no sidewalk features or crossings")

    # Split sidewalks where fallback crossings land mid-edge.
    splits: dict[str, list[tuple[int, LocalPoint]]] = {}
    for c in crossings:
        if c.split is not None:
            fid, seg, q = c.split
            splits.setdefault(fid, []).append((seg, q))

    pieces: list[tuple[str, Polyline, str]] = []  # (source feature, geometry, kind)
    for f in sidewalks:
        kind = f.properties.get("kind") or "sidewalk"
        if kind not in ("sidewalk", "t_connector", "corner_connector"):
            kind = "sidewalk"
        geometry = f.geometry
        if f.id in splits:
            for part in _split_polyline(geometry, splits[f.id], merge_tol):
                pieces.append((f.id, part, kind))
        else:
            pieces.append((f.id, geometry, kind))

    nodes: list[GraphNode] = []
    node_index = GridIndex(cell_size=max(merge_tol * 100.0, 1.0))

    def node_at(p: LocalPoint) -> int:
        hit = node_index.nearest(p, max_radius=merge_tol)
        if hit is not None:
            return hit[0]
        node_id = len(nodes)
        nodes.append(GraphNode(id=node_id, location=p))
        node_index.insert(node_id, p)
        return node_id

    edges: list[GraphEdge] = []
    seen_pairs: set[tuple[int, int, str]] = set()

    def add_edge(geometry: Polyline, kind: str, source: Optional[str],
                 crossed_street: Optional[str] = None) -> Optional[GraphEdge]:
        na = node_at(geometry.start)
        nb = node_at(geometry.end)
        if na == nb and len(geometry.points) == 2:
            return None  # collapsed by merging
        pts = list(geometry.points)
        pts[0] = nodes[na].location
        pts[-1] = nodes[nb].location
        try:
            snapped = Polyline(pts)
        except PedgraphError:
            return None  # degenerate after snapping
        key = (min(na, nb), max(na, nb), kind)
        if key in seen_pairs:
            return None
        seen_pairs.add(key)
        edge = GraphEdge(
            id=len(edges), a=na, b=nb, geometry=snapped, kind=kind,
            length=snapped.length(), crossed_street=crossed_street, source_feature=source,
        )
        edges.append(edge)
        return edge

    for source, geometry, kind in pieces:
        add_edge(geometry, kind, source)
    for c in crossings:
        add_edge(Polyline([c.start, c.end]), "crossing", None, crossed_street=c.crossed_street)

    if not edges:
        raise EmptyDatasetError("assembly produced no edges")
    return RoutingGraph(nodes=nodes, edges=edges, origin=sidewalks.origin, meta=meta)


def _split_polyline(
    line: Polyline, cuts: list[tuple[int, LocalPoint]], merge_tol: float
) -> list[Polyline]:
    """Split a polyline at interior points, given (segment index, point) cuts."""
    pts = line.points
    seg_start_arc = [0.0]
    for a, b in line.segments():
        seg_start_arc.append(seg_start_arc[-1] + distance(a, b))
    total = seg_start_arc[-1]

    positioned = sorted(
        (seg_start_arc[seg] + distance(pts[seg], q), q) for seg, q in cuts
    )
    filtered: list[tuple[float, LocalPoint]] = []
    for arc, q in positioned:
        if arc <= merge_tol or arc >= total - merge_tol:
            continue  # at the line ends; node merging handles it
        if filtered and arc - filtered[-1][0] <= merge_tol:
            continue
        filtered.append((arc, q))
    if not filtered:
        return [line]

    parts: list[Optional[Polyline]] = []
    current: list[LocalPoint] = [pts[0]]
    ci = 0
    arc = 0.0
    for a, b in line.segments():
        seg_len = distance(a, b)
        while ci < len(filtered) and filtered[ci][0] <= arc + seg_len + 1e-12:
            q = filtered[ci][1]
            ci += 1
            if distance(current[-1], q) <= 1e-6:
                q = current[-1]  # cut coincides with a vertex; reuse it exactly
            else:
                current.append(q)
            parts.append(_safe_polyline(current))
            current = [q]
        if distance(current[-1], b) > 1e-6:
            current.append(b)
        arc += seg_len
    parts.append(_safe_polyline(current))
    return [p for p in parts if p is not None]


def _safe_polyline(points: list[LocalPoint]) -> Optional[Polyline]:
    cleaned: list[LocalPoint] = []
    for p in points:
        if cleaned and distance(cleaned[-1], p) <= 1e-6:
            continue
        cleaned.append(p)
    if len(cleaned) < 2:
        return None
    return Polyline(cleaned)


def annotate_elevation(graph: RoutingGraph, grid: ElevationGrid) -> RoutingGraph:
    """Sample node elevations and derive per-edge elevation change and grade."""
    for node in graph.nodes:
        try:
            node.elevation = grid.sample(node.location)
        except (ExtentError, NodataError) as exc:
            edge_ids = [e.id for e in graph.incident_edges(node.id)]
            raise type(exc)(
                f"elevation sample failed for node {node.id} "
                f"(edges {edge_ids}): {exc}"
            ) from exc
    for e in graph.edges:
        e.elev_delta = graph.node(e.b).elevation - graph.node(e.a).elevation
        e.grade = abs(e.elev_delta) / e.length
    return graph


def annotate_curb_ramps(
    graph: RoutingGraph, ramps: CurbRampSet, ramp_radius: float = 5.0
) -> RoutingGraph:
    """Mark crossing endpoints that have a curb ramp within ``ramp_radius`` (inclusive)."""
    index = GridIndex(cell_size=max(ramp_radius, 1.0))
    for f in ramps:
        index.insert(f.id, f.geometry)
    for e in graph.edges:
        if e.kind != "crossing":
            continue
        e.curb_ramp_at_a = bool(index.within(graph.node(e.a).location, ramp_radius))
        e.curb_ramp_at_b = bool(index.within(graph.node(e.b).location, ramp_radius))
    return graph


def annotate_construction(
    graph: RoutingGraph, permits: PermitSet, buffer: float = 10.0
) -> RoutingGraph:
    """Attach permit (start, end) intervals to edges within ``buffer`` meters.

    Intervals are stored unfiltered; the router applies the trip date.
    """
    from .data import permit_interval

    relevant = [f for f in permits if f.properties.get("sidewalk_impact", False)]
    for e in graph.edges:
        for f in relevant:
            if f.is_line:
                d = polyline_min_distance(e.geometry, f.geometry)
            else:
                d = point_polyline_distance(f.geometry, e.geometry)
            if d <= buffer:
                interval = permit_interval(f)
                if interval not in e.construction_intervals:
                    e.construction_intervals.append(interval)
    return graph


def coverage_report(
    graph: RoutingGraph,
    t_metrics: Optional[dict] = None,
    corner_metrics: Optional[dict] = None,
    crossings: Optional[list[CrossingProposal]] = None,
) -> dict:
    """Coverage rates for each pipeline stage plus the component census.

    Every rate is numerator/denominator over candidate locations; a zero
    denominator yields rate 0.0 and an entry in ``zero_denominators``.
    """
    t_metrics = t_metrics or {"t_nodes": 0, "t_nodes_with_candidates": 0, "t_nodes_repaired": 0}
    corner_metrics = corner_metrics or {
        "sectors": 0, "sectors_with_endpoints": 0, "sectors_with_candidates": 0,
        "sectors_edited": 0, "blocks": 0, "blocks_connected": 0,
    }
    crossings = crossings or []

    crossed_sectors: set[tuple[int, int]] = set()
    for c in crossings:
        crossed_sectors.update(c.sector_keys)

    zero = []

    def rate(num: int, den: int, name: str) -> float:
        if den == 0:
            zero.append(name)
            return 0.0
        return num / den

    report = {
        "t_repair_rate": rate(
            t_metrics["t_nodes_repaired"], t_metrics["t_nodes_with_candidates"], "t_repair_rate"
        ),
        "corner_edit_rate": rate(
            corner_metrics["sectors_edited"], corner_metrics["sectors_with_candidates"],
            "corner_edit_rate",
        ),
        "block_connectivity_rate": rate(
            corner_metrics["blocks_connected"], corner_metrics["blocks"],
            "block_connectivity_rate",
        ),
        "crossing_corner_rate": rate(
            len(crossed_sectors), corner_metrics["sectors_with_endpoints"],
            "crossing_corner_rate",
        ),
        "crossing_corner_rate_all_sectors": rate(
            len(crossed_sectors), corner_metrics["sectors"], "crossing_corner_rate_all_sectors"
        ),
        "component_count": graph.component_count(),
        "node_count": len(graph.nodes),
        "edge_count": len(graph.edges),
        "crossing_count": sum(1 for e in graph.edges if e.kind == "crossing"),
        "zero_denominators": zero,
    }
    report.update({f"detail_{k}": v for k, v in t_metrics.items()})
    report.update({f"detail_{k}": v for k, v in corner_metrics.items()})
    return report
