"""Planar geometry over a local equirectangular projection.

Everything downstream computes in meters in a single local tangent frame;
longitude/latitude appears only at I/O boundaries. The projection is
equirectangular around a city-scale origin, which keeps errors well below
the noise floor of municipal data and is trivially invertible.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

from .errors import DegenerateGeometryError, ExtentError

EARTH_RADIUS_M = 6371008.8
# Coincidence tolerance used for geometry tests throughout the engine.
EPS = 1e-6
# Inputs farther than this from the projection origin are rejected.
MAX_EXTENT_DEG = 2.0


class GeoPoint(NamedTuple):
    """WGS84 coordinate, longitude first (GeoJSON axis order)."""

    lon: float
    lat: float


class LocalPoint(NamedTuple):
    """Projected coordinate in meters east/north of the projection origin."""

    x: float
    y: float


def check_geopoint(p: GeoPoint) -> GeoPoint:
    if not (-180.0 <= p.lon <= 180.0 and -90.0 <= p.lat <= 90.0):
        raise ExtentError(f"invalid WGS84 coordinate: lon={p.lon}, lat={p.lat}")
    return p


class Polyline:
    """Ordered chain of at least two distinct local points."""

    __slots__ = ("points",)

    def __init__(self, points):
        pts = tuple(LocalPoint(float(p[0]), float(p[1])) for p in points)
        if len(pts) < 2:
            raise DegenerateGeometryError("polyline needs at least 2 points")
        for a, b in zip(pts, pts[1:]):
            if math.hypot(b.x - a.x, b.y - a.y) <= EPS:
                raise DegenerateGeometryError(
                    f"consecutive polyline points coincide near ({a.x}, {a.y})"
                )
            if not (math.isfinite(b.x) and math.isfinite(b.y)):
                raise DegenerateGeometryError("non-finite polyline coordinate")
        if not (math.isfinite(pts[0].x) and math.isfinite(pts[0].y)):
            raise DegenerateGeometryError("non-finite polyline coordinate")
        self.points = pts

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polyline) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self) -> str:
        return f"Polyline({len(self.points)} pts, {self.length():.2f} m)"

    @property
    def start(self) -> LocalPoint:
        return self.points[0]

    @property
    def end(self) -> LocalPoint:
        return self.points[-1]

    def segments(self):
        return zip(self.points, self.points[1:])

    def length(self) -> float:
        return polyline_length(self)

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [p.x for p in self.points]
        ys = [p.y for p in self.points]
        return min(xs), min(ys), max(xs), max(ys)

    def reversed(self) -> "Polyline":
        return Polyline(tuple(reversed(self.points)))


def project(p: GeoPoint, origin: GeoPoint) -> LocalPoint:
    """Project a WGS84 point to local meters around ``origin``.

    Equirectangular: x = R*cos(lat0)*dlon, y = R*dlat (radians). Valid for
    city-scale extents; points more than 2 degrees from the origin are
    rejected.
    """
    check_geopoint(p)
    check_geopoint(origin)
    dlon = p.lon - origin.lon
    dlat = p.lat - origin.lat
    if max(abs(dlon), abs(dlat)) > MAX_EXTENT_DEG:
        raise ExtentError(
            f"point ({p.lon}, {p.lat}) is more than {MAX_EXTENT_DEG} deg from "
            f"projection origin ({origin.lon}, {origin.lat})"
        )
    x = EARTH_RADIUS_M * math.cos(math.radians(origin.lat)) * math.radians(dlon)
    y = EARTH_RADIUS_M * math.radians(dlat)
    return LocalPoint(x, y)


def unproject(p: LocalPoint, origin: GeoPoint) -> GeoPoint:
    """Inverse of :func:`project`."""
    lat = origin.lat + math.degrees(p.y / EARTH_RADIUS_M)
    scale = EARTH_RADIUS_M * math.cos(math.radians(origin.lat))
    lon = origin.lon + math.degrees(p.x / scale)
    return GeoPoint(lon, lat)


def distance(a: LocalPoint, b: LocalPoint) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def bearing(a: LocalPoint, b: LocalPoint) -> float:
    """Clockwise-from-north bearing from ``a`` to ``b`` in [0, 360)."""
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    if math.hypot(dx, dy) <= EPS:
        raise DegenerateGeometryError("bearing of coincident points is undefined")
    return math.degrees(math.atan2(dx, dy)) % 360.0


def angle_between_bearings(b1: float, b2: float) -> float:
    """Unsigned angular separation of two bearings, folded into [0, 180].

    Separations fold at 180, so an interval like [170, 190] on raw bearing
    differences is equivalent to separation in [170, 180] here.
    """
    d = abs(b1 - b2) % 360.0
    return 360.0 - d if d > 180.0 else d


def signed_bearing_delta(b_from: float, b_to: float) -> float:
    """Signed turn from one bearing to another, in (-180, 180]; right turns positive."""
    d = (b_to - b_from) % 360.0
    return d - 360.0 if d > 180.0 else d


def closest_point_on_segment(p: LocalPoint, a: LocalPoint, b: LocalPoint) -> tuple[LocalPoint, float]:
    """Closest point to ``p`` on segment a-b and its distance."""
    ax, ay = a
    bx, by = b
    dx = bx - ax
    dy = by - ay
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        return LocalPoint(ax, ay), math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / d2
    t = max(0.0, min(1.0, t))
    q = LocalPoint(ax + t * dx, ay + t * dy)
    return q, math.hypot(p[0] - q.x, p[1] - q.y)


def closest_point_on_polyline(p: LocalPoint, line: Polyline) -> tuple[LocalPoint, float, int]:
    """Global nearest point on the polyline; ties go to the lowest segment index."""
    best_q = None
    best_d = math.inf
    best_i = -1
    for i, (a, b) in enumerate(line.segments()):
        q, d = closest_point_on_segment(p, a, b)
        if d < best_d:
            best_q, best_d, best_i = q, d, i
    return best_q, best_d, best_i


def segment_intersection(
    a1: LocalPoint, a2: LocalPoint, b1: LocalPoint, b2: LocalPoint
) -> Optional[LocalPoint]:
    """Intersection point of two segments, or None.

    Endpoint touching counts as intersection; collinear overlap reports the
    midpoint of the overlapping stretch.
    """
    r = (a2[0] - a1[0], a2[1] - a1[1])
    s = (b2[0] - b1[0], b2[1] - b1[1])
    qp = (b1[0] - a1[0], b1[1] - a1[1])
    denom = r[0] * s[1] - r[1] * s[0]
    qp_cross_r = qp[0] * r[1] - qp[1] * r[0]
    scale = max(math.hypot(*r), math.hypot(*s), 1.0)
    if abs(denom) <= EPS * scale * scale:
        # Parallel; only collinear segments can still intersect.
        if abs(qp_cross_r) > EPS * scale * scale:
            return None
        # Project b's endpoints onto a's parameter axis.
        rr = r[0] * r[0] + r[1] * r[1]
        t0 = (qp[0] * r[0] + qp[1] * r[1]) / rr
        t1 = t0 + (s[0] * r[0] + s[1] * r[1]) / rr
        lo = max(0.0, min(t0, t1))
        hi = min(1.0, max(t0, t1))
        if lo > hi:
            return None
        tm = 0.5 * (lo + hi)
        return LocalPoint(a1[0] + tm * r[0], a1[1] + tm * r[1])
    t = (qp[0] * s[1] - qp[1] * s[0]) / denom
    u = qp_cross_r / denom
    tol = EPS / scale
    if -tol <= t <= 1.0 + tol and -tol <= u <= 1.0 + tol:
        t = max(0.0, min(1.0, t))
        return LocalPoint(a1[0] + t * r[0], a1[1] + t * r[1])
    return None


def polyline_length(line: Polyline) -> float:
    return math.fsum(distance(a, b) for a, b in line.segments())


def polyline_min_distance(a: Polyline, b: Polyline) -> float:
    """Minimum distance between two polylines (0 if they intersect)."""
    best = math.inf
    for p1, p2 in a.segments():
        for q1, q2 in b.segments():
            if segment_intersection(p1, p2, q1, q2) is not None:
                return 0.0
            for p, s1, s2 in ((p1, q1, q2), (p2, q1, q2), (q1, p1, p2), (q2, p1, p2)):
                _, d = closest_point_on_segment(p, s1, s2)
                if d < best:
                    best = d
    return best


def point_polyline_distance(p: LocalPoint, line: Polyline) -> float:
    return closest_point_on_polyline(p, line)[1]


def side_of_line(anchor: LocalPoint, direction_bearing: float, p: LocalPoint) -> float:
    """Signed side of ``p`` relative to the ray from anchor along a bearing.

    Positive on the clockwise (right-hand) side, negative counter-clockwise,
    ~0 on the line.
    """
    rad = math.radians(direction_bearing)
    ux, uy = math.sin(rad), math.cos(rad)
    vx, vy = p[0] - anchor[0], p[1] - anchor[1]
    # cross(u, v) > 0 means v is counter-clockwise from u; flip for right-hand.
    return -(ux * vy - uy * vx)


def point_along_bearing(p: LocalPoint, bearing_deg: float, dist: float) -> LocalPoint:
    rad = math.radians(bearing_deg)
    return LocalPoint(p[0] + dist * math.sin(rad), p[1] + dist * math.cos(rad))
