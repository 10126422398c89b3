"""Topological repair of noisy sidewalk data.

Municipal sidewalk layers arrive as disconnected segments. Repairs here never
move or delete input geometry; they only append straight connector features:

* ``t_connector``: bridges the systematic gaps that asset-management exports
  leave in the sidewalk running past a 3-way intersection whose two major
  streets are nearly collinear.
* ``corner_connector``: joins loose sidewalk ends that belong to the same
  block corner, using street intersections to decide which ends go together
  (proximity alone would pair ends across streets when noise is large).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .data import Feature, SidewalkSet, StreetSet
from .errors import EmptyDatasetError
from .geometry import (
    LocalPoint,
    Polyline,
    angle_between_bearings,
    bearing,
    distance,
    point_along_bearing,
    side_of_line,
)
from .spatial import GridIndex

# (feature id, end index) where end index 0 is the first vertex, 1 the last.
EndpointRef = tuple[str, int]

BEARING_PROBE_M = 10.0
CONNECTOR_KINDS = ("t_connector", "corner_connector")


@dataclass
class StreetNode:
    """Merged street endpoint with the streets that depart from it."""

    id: int
    location: LocalPoint
    incident: list[tuple[str, float]] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return len(self.incident)

    def bearings(self) -> list[float]:
        return [b for _, b in self.incident]


@dataclass
class TIntersection:
    node: StreetNode
    through_bearings: tuple[float, float]
    stem_bearing: float
    stem_street: str


@dataclass
class CornerSector:
    """Angular wedge between two consecutive streets at an intersection."""

    node: StreetNode
    index: int
    b_lo: float
    b_hi: float
    lo_street: str
    hi_street: str
    members: list[tuple[EndpointRef, LocalPoint]] = field(default_factory=list)

    @property
    def key(self) -> tuple[int, int]:
        return (self.node.id, self.index)

    def contains_bearing(self, b: float) -> bool:
        span = (self.b_hi - self.b_lo) % 360.0
        if span == 0.0:  # two streets share a bearing; wedge is empty
            return False
        return (b - self.b_lo) % 360.0 < span


@dataclass
class RepairAction:
    kind: str  # t_connector | corner_connector
    geometry: Polyline
    joined: tuple[EndpointRef, EndpointRef]
    gap_m: float
    node_id: int

    def canonical_pair(self) -> tuple[EndpointRef, EndpointRef]:
        a, b = self.joined
        return (a, b) if a <= b else (b, a)


def _departure_bearing(line: Polyline, from_start: bool) -> float:
    """Bearing of the first ~10 m of the polyline leaving the given end."""
    pts = line.points if from_start else tuple(reversed(line.points))
    start = pts[0]
    walked = 0.0
    probe = pts[1]
    for a, b in zip(pts, pts[1:]):
        walked += distance(a, b)
        probe = b
        if walked >= BEARING_PROBE_M:
            break
    return bearing(start, probe)


def build_street_topology(streets: StreetSet, snap_tol: float = 0.5) -> list[StreetNode]:
    """Merge street endpoints within ``snap_tol`` into intersection nodes.

    Streets are assumed noded at intersections (standard for centerline
    layers). Node ids follow scan order (west-to-east, then south-to-north)
    so downstream tie-breaks are stable.
    """
    if len(streets) == 0:
        raise EmptyDatasetError("street dataset is empty")
    endpoints: list[tuple[LocalPoint, str, bool]] = []
    for f in streets:
        line = f.geometry
        endpoints.append((line.start, f.id, True))
        endpoints.append((line.end, f.id, False))

    index = GridIndex(cell_size=max(snap_tol * 4.0, 1.0))
    clusters: list[list[int]] = []
    assignment: dict[int, int] = {}
    for i, (p, _, _) in enumerate(endpoints):
        hit = index.within(p, snap_tol)
        if hit:
            cluster_id = assignment[hit[0][0]]
        else:
            cluster_id = len(clusters)
            clusters.append([])
        clusters[cluster_id].append(i)
        assignment[i] = cluster_id
        index.insert(i, p)

    centers = []
    for members in clusters:
        cx = sum(endpoints[i][0][0] for i in members) / len(members)
        cy = sum(endpoints[i][0][1] for i in members) / len(members)
        centers.append((LocalPoint(cx, cy), members))
    centers.sort(key=lambda c: (c[0][0], c[0][1]))

    nodes = []
    street_lines = {f.id: f.geometry for f in streets}
    for node_id, (center, members) in enumerate(centers):
        node = StreetNode(id=node_id, location=center)
        for i in sorted(members, key=lambda i: (endpoints[i][1], not endpoints[i][2])):
            _, fid, from_start = endpoints[i]
            node.incident.append((fid, _departure_bearing(street_lines[fid], from_start)))
        nodes.append(node)
    return nodes


def detect_t_intersections(
    nodes: list[StreetNode], min_separation: float = 170.0
) -> list[TIntersection]:
    """3-way nodes where two incident streets are nearly collinear.

    Angular separation folds at 180, so the test band is [min_separation, 180].
    """
    out = []
    for node in nodes:
        if node.degree != 3:
            continue
        best: Optional[tuple[float, int, int]] = None
        for i in range(3):
            for j in range(i + 1, 3):
                sep = angle_between_bearings(node.incident[i][1], node.incident[j][1])
                if sep >= min_separation and (best is None or sep > best[0]):
                    best = (sep, i, j)
        if best is None:
            continue
        _, i, j = best
        k = 3 - i - j
        out.append(
            TIntersection(
                node=node,
                through_bearings=(node.incident[i][1], node.incident[j][1]),
                stem_bearing=node.incident[k][1],
                stem_street=node.incident[k][0],
            )
        )
    return out


def _sidewalk_endpoints(sidewalks: SidewalkSet) -> list[tuple[EndpointRef, LocalPoint]]:
    out = []
    for f in sidewalks:
        a, b = f.endpoints()
        out.append(((f.id, 0), a))
        out.append(((f.id, 1), b))
    return out


def loose_endpoints(
    sidewalks: SidewalkSet, merge_tol: float = 0.01
) -> list[tuple[EndpointRef, LocalPoint]]:
    """Endpoints that do not coincide with any other feature endpoint.

    Coincident ends are already topologically joined once graph nodes merge,
    so connecting them again would create zero-length geometry.
    """
    eps = _sidewalk_endpoints(sidewalks)
    index = GridIndex(cell_size=max(merge_tol * 10.0, 1.0))
    for ref, p in eps:
        index.insert(ref, p)
    out = []
    for ref, p in eps:
        hits = index.within(p, merge_tol)
        if all(r == ref for r, _ in hits):
            out.append((ref, p))
    return out


def _greedy_pairs(
    candidates: list[tuple[EndpointRef, LocalPoint]],
    max_gap: float,
    min_gap: float = 0.0,
    used: Optional[set[EndpointRef]] = None,
) -> list[tuple[EndpointRef, EndpointRef, float]]:
    """Closest-pair-first matching; each endpoint used at most once.

    Pairs within the same feature are never formed (no self-loops).
    """
    pairs = []
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            (ra, pa), (rb, pb) = candidates[i], candidates[j]
            if ra[0] == rb[0]:
                continue
            gap = distance(pa, pb)
            if min_gap < gap <= max_gap:
                a, b = (ra, rb) if ra <= rb else (rb, ra)
                pairs.append((gap, a, b))
    pairs.sort()
    taken: set[EndpointRef] = set() if used is None else used
    out = []
    for gap, a, b in pairs:
        if a in taken or b in taken:
            continue
        taken.add(a)
        taken.add(b)
        out.append((a, b, gap))
    return out


def _has_candidate_pair(
    candidates: list[tuple[EndpointRef, LocalPoint]], max_gap: float, min_gap: float
) -> bool:
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            if candidates[i][0][0] == candidates[j][0][0]:
                continue
            gap = distance(candidates[i][1], candidates[j][1])
            if min_gap < gap <= max_gap:
                return True
    return False


def _connector_features(
    sidewalks: SidewalkSet,
    pairs: list[tuple[EndpointRef, EndpointRef, float]],
    kind: str,
    prefix: str,
    start_index: int,
    node_id: int,
) -> tuple[list[Feature], list[RepairAction]]:
    feats = []
    actions = []
    lines = {f.id: f for f in sidewalks}
    for offset, (a, b, gap) in enumerate(pairs):
        pa = lines[a[0]].endpoint(a[1])
        pb = lines[b[0]].endpoint(b[1])
        line = Polyline([pa, pb])
        feats.append(
            Feature(
                id=f"{prefix}{start_index + offset}",
                geometry=line,
                properties={"kind": kind, "gap_m": gap},
            )
        )
        actions.append(
            RepairAction(kind=kind, geometry=line, joined=(a, b), gap_m=gap, node_id=node_id)
        )
    return feats, actions


def repair_t_gaps(
    sidewalks: SidewalkSet,
    t_nodes: list[TIntersection],
    max_gap: float = 30.48,
    merge_tol: float = 0.01,
) -> tuple[SidewalkSet, list[RepairAction], dict]:
    """Bridge sidewalk gaps on the through side of each T-intersection.

    Candidate ends lie within ``max_gap`` of the node, on the side of the
    through street opposite the stem, and are loose. Matched pairs get a
    straight ``t_connector`` feature; originals are untouched.
    """
    loose = loose_endpoints(sidewalks, merge_tol)
    index = GridIndex(cell_size=max(max_gap, 1.0))
    for ref, p in loose:
        index.insert(ref, p)
    pos = dict(loose)

    new_features: list[Feature] = []
    actions: list[RepairAction] = []
    used: set[EndpointRef] = set()
    nodes_with_candidates = 0
    nodes_repaired = 0
    for t in sorted(t_nodes, key=lambda t: t.node.id):
        through_b = t.through_bearings[0]
        stem_probe = point_along_bearing(t.node.location, t.stem_bearing, 1.0)
        stem_side = side_of_line(t.node.location, through_b, stem_probe)
        candidates = []
        for ref, _ in index.within(t.node.location, max_gap):
            if ref in used:
                continue
            p = pos[ref]
            if side_of_line(t.node.location, through_b, p) * stem_side < 0:
                candidates.append((ref, p))
        if _has_candidate_pair(candidates, max_gap, merge_tol):
            nodes_with_candidates += 1
        pairs = _greedy_pairs(candidates, max_gap, min_gap=merge_tol, used=used)
        if pairs:
            nodes_repaired += 1
        feats, acts = _connector_features(
            sidewalks, pairs, "t_connector", "tconn_", len(new_features), t.node.id
        )
        new_features.extend(feats)
        actions.extend(acts)

    metrics = {
        "t_nodes": len(t_nodes),
        "t_nodes_with_candidates": nodes_with_candidates,
        "t_nodes_repaired": nodes_repaired,
    }
    return sidewalks.with_features(new_features), actions, metrics


def classify_corner_endpoints(
    sidewalks: SidewalkSet,
    nodes: list[StreetNode],
    corner_radius: float = 30.0,
    merge_tol: float = 0.01,
) -> list[CornerSector]:
    """Assign sidewalk endpoints to angular sectors of nearby intersections.

    Intersections are nodes of degree >= 3. Each endpoint within
    ``corner_radius`` goes to its nearest intersection (ties to the lowest
    node id) and, there, to the clockwise sector containing its bearing from
    the node; an endpoint exactly on a street bearing belongs to the sector
    that street opens clockwise.
    """
    intersections = [n for n in nodes if n.degree >= 3]
    sectors: list[CornerSector] = []
    by_node: dict[int, list[CornerSector]] = {}
    node_by_id: dict[int, StreetNode] = {}
    for node in intersections:
        incident = sorted(node.incident, key=lambda ib: (ib[1], ib[0]))
        k = len(incident)
        node_sectors = []
        for i in range(k):
            lo_street, b_lo = incident[i]
            hi_street, b_hi = incident[(i + 1) % k]
            node_sectors.append(
                CornerSector(
                    node=node,
                    index=i,
                    b_lo=b_lo,
                    b_hi=b_hi,
                    lo_street=lo_street,
                    hi_street=hi_street,
                )
            )
        by_node[node.id] = node_sectors
        node_by_id[node.id] = node
        sectors.extend(node_sectors)

    if not intersections:
        return sectors

    node_index = GridIndex(cell_size=max(corner_radius, 1.0))
    for n in intersections:
        node_index.insert(n.id, n.location)

    for ref, p in _sidewalk_endpoints(sidewalks):
        hit = node_index.nearest(p, max_radius=corner_radius)
        if hit is None:
            continue
        node = node_by_id[hit[0]]
        if distance(p, node.location) <= merge_tol:
            continue  # endpoint sits on the node itself; bearing undefined
        b = bearing(node.location, p)
        for sector in by_node[node.id]:
            if sector.contains_bearing(b):
                sector.members.append((ref, p))
                break
    return sectors


def connect_block_corners(
    sidewalks: SidewalkSet,
    sectors: list[CornerSector],
    max_connect: float = 30.48,
    merge_tol: float = 0.01,
) -> tuple[SidewalkSet, list[RepairAction], dict]:
    """Greedy nearest-pair connection of loose ends within each corner sector.

    Metrics cover the corner-edit rate (sectors with at least one connectable
    pair that received an edit) and block connectivity (sector co-membership
    plus endpoint coincidence groups features into per-block subgraphs; a
    block counts as connected when its features end in one component).
    """
    loose = {ref: p for ref, p in loose_endpoints(sidewalks, merge_tol)}
    new_features: list[Feature] = []
    actions: list[RepairAction] = []
    used: set[EndpointRef] = set()
    sectors_with_candidates = 0
    sectors_edited = 0
    for sector in sorted(sectors, key=lambda s: s.key):
        candidates = [
            (ref, p)
            for ref, p in sorted(sector.members)
            if ref in loose and ref not in used
        ]
        if _has_candidate_pair(candidates, max_connect, merge_tol):
            sectors_with_candidates += 1
        pairs = _greedy_pairs(candidates, max_connect, min_gap=merge_tol, used=used)
        if pairs:
            sectors_edited += 1
        feats, acts = _connector_features(
            sidewalks, pairs, "corner_connector", "cconn_", len(new_features), sector.node.id
        )
        new_features.extend(feats)
        actions.extend(acts)

    repaired = sidewalks.with_features(new_features)
    blocks_total, blocks_connected = _block_connectivity(repaired, sectors, merge_tol)
    metrics = {
        "sectors": len(sectors),
        "sectors_with_endpoints": sum(1 for s in sectors if s.members),
        "sectors_with_candidates": sectors_with_candidates,
        "sectors_edited": sectors_edited,
        "blocks": blocks_total,
        "blocks_connected": blocks_connected,
    }
    return repaired, actions, metrics


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _feature_components(sidewalks: SidewalkSet, merge_tol: float) -> _UnionFind:
    """Union features whose endpoints coincide within merge_tol."""
    uf = _UnionFind()
    index = GridIndex(cell_size=max(merge_tol * 10.0, 1.0))
    for ref, p in _sidewalk_endpoints(sidewalks):
        uf.find(ref[0])
        for other_ref, _ in index.within(p, merge_tol):
            uf.union(ref[0], other_ref[0])
        index.insert(ref, p)
    return uf


def feature_components(sidewalks: SidewalkSet, merge_tol: float = 0.01) -> dict[str, str]:
    """Map each feature id to its component root under endpoint coincidence.

    Connector features share endpoint coordinates with the ends they join, so
    coincidence grouping captures connector-made links too.
    """
    uf = _feature_components(sidewalks, merge_tol)
    return {fid: uf.find(fid) for fid in uf.parent}


def _block_connectivity(
    repaired: SidewalkSet, sectors: list[CornerSector], merge_tol: float
) -> tuple[int, int]:
    """Estimate per-block subgraphs and count how many are fully connected.

    A sector holds the sidewalk ends of exactly one block corner, so grouping
    features through shared sectors (plus endpoint coincidence in the raw
    data) approximates blocks without ground truth.
    """
    membership = _UnionFind()
    covered: set[str] = set()
    for sector in sectors:
        fids = sorted({ref[0] for ref, _ in sector.members})
        covered.update(fids)
        for other in fids[1:]:
            membership.union(fids[0], other)

    originals = SidewalkSet(
        features=[f for f in repaired if f.properties.get("kind") not in CONNECTOR_KINDS],
        origin=repaired.origin,
    )
    coincide = _feature_components(originals, merge_tol)
    roots: dict[str, list[str]] = {}
    for fid in sorted(coincide.parent):
        roots.setdefault(coincide.find(fid), []).append(fid)
    for group in roots.values():
        in_cover = [fid for fid in group if fid in covered]
        if not in_cover:
            continue
        covered.update(group)
        for other in group[1:]:
            membership.union(group[0], other)

    blocks: dict[str, list[str]] = {}
    for fid in sorted(covered):
        blocks.setdefault(membership.find(fid), []).append(fid)

    conn = _feature_components(repaired, merge_tol)
    connected = 0
    for fids in blocks.values():
        root0 = conn.find(fids[0])
        if all(conn.find(fid) == root0 for fid in fids):
            connected += 1
    return len(blocks), connected
