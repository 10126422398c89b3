"""Typed feature datasets and their file formats.

Vector inputs are GeoJSON FeatureCollections (RFC 7946, lon/lat order);
elevation is an ESRI ASCII grid whose coordinates are already in the local
projected frame (meters, same origin as the vector data). Permit date
properties are ISO-8601 strings under ``start_date`` / ``end_date``;
sidewalk relevance is the boolean ``sidewalk_impact``.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .errors import (
    EmptyDatasetError,
    ExtentError,
    FormatError,
    NodataError,
    SchemaError,
)
from .geometry import GeoPoint, LocalPoint, Polyline, project, unproject
from .spatial import GridIndex

Geometry = Union[Polyline, LocalPoint]


@dataclass
class Feature:
    id: str
    geometry: Geometry
    properties: dict = field(default_factory=dict)

    @property
    def is_line(self) -> bool:
        return isinstance(self.geometry, Polyline)

    def endpoints(self) -> tuple[LocalPoint, LocalPoint]:
        if not self.is_line:
            raise SchemaError(f"feature {self.id} is not a line")
        return self.geometry.start, self.geometry.end

    def endpoint(self, end_index: int) -> LocalPoint:
        return self.endpoints()[end_index]


@dataclass
class FeatureSet:
    """Immutable-by-convention collection of features sharing one projection."""

    features: list[Feature]
    origin: GeoPoint

    def __len__(self) -> int:
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    def get(self, feature_id: str) -> Feature:
        for f in self.features:
            if f.id == feature_id:
                return f
        raise KeyError(feature_id)

    def with_features(self, extra: Iterable[Feature]) -> "FeatureSet":
        return type(self)(features=list(self.features) + list(extra), origin=self.origin)


class SidewalkSet(FeatureSet):
    pass


class StreetSet(FeatureSet):
    pass


class CurbRampSet(FeatureSet):
    pass


@dataclass
class PermitSet(FeatureSet):
    """Permit features; dates and impact flag are parsed into properties."""

    def active(self, query_date: dt.date) -> "PermitSet":
        return filter_permits(self, query_date)


def permit_interval(f: Feature) -> tuple[dt.date, dt.date]:
    try:
        start = dt.date.fromisoformat(str(f.properties["start_date"]))
        end = dt.date.fromisoformat(str(f.properties["end_date"]))
    except KeyError as exc:
        raise SchemaError(f"permit {f.id} missing date key {exc}") from exc
    except ValueError as exc:
        raise SchemaError(f"permit {f.id} has a malformed date: {exc}") from exc
    if start > end:
        raise SchemaError(f"permit {f.id} has start_date after end_date")
    return start, end


def filter_permits(permits: PermitSet, query_date: dt.date) -> PermitSet:
    """Keep permits with sidewalk impact whose active window contains the date."""
    kept = []
    for f in permits:
        if not f.properties.get("sidewalk_impact", False):
            continue
        start, end = permit_interval(f)
        if start <= query_date <= end:
            kept.append(f)
    return PermitSet(features=kept, origin=permits.origin)


# ---------------------------------------------------------------------------
# GeoJSON loading / saving
# ---------------------------------------------------------------------------

_KIND_GEOMETRY = {
    "sidewalks": ("LineString",),
    "streets": ("LineString",),
    "curbramps": ("Point",),
    "permits": ("LineString", "Point"),
}

_KIND_CLASS = {
    "sidewalks": SidewalkSet,
    "streets": StreetSet,
    "curbramps": CurbRampSet,
    "permits": PermitSet,
}


def _parse_feature_collection(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{path} is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise FormatError(f"{path} is not a GeoJSON FeatureCollection")
    return doc


def load_features(path: str, expected: str, origin: GeoPoint) -> FeatureSet:
    """Load a FeatureCollection of the expected kind, projecting into local meters.

    ``expected`` is one of sidewalks / streets / curbramps / permits. Features
    without an id get a synthesized "f<index>". Ids must be unique.
    """
    if expected not in _KIND_GEOMETRY:
        raise ValueError(f"unknown dataset kind {expected!r}")
    doc = _parse_feature_collection(path)
    allowed = _KIND_GEOMETRY[expected]
    features: list[Feature] = []
    seen_ids: set[str] = set()
    for index, raw in enumerate(doc.get("features", [])):
        fid = raw.get("id")
        if fid is None:
            fid = raw.get("properties", {}).get("id") if raw.get("properties") else None
        fid = f"f{index}" if fid is None else str(fid)
        if not fid:
            raise SchemaError(f"{path}: feature #{index} has an empty id")
        if fid in seen_ids:
            raise SchemaError(f"{path}: duplicate feature id {fid!r}")
        seen_ids.add(fid)
        geom = raw.get("geometry") or {}
        gtype = geom.get("type")
        if gtype not in allowed:
            raise SchemaError(
                f"{path}: feature {fid!r} has geometry {gtype!r}, expected "
                f"{' or '.join(allowed)} for {expected}"
            )
        coords = geom.get("coordinates")
        try:
            if gtype == "Point":
                geometry: Geometry = project(GeoPoint(coords[0], coords[1]), origin)
            else:
                geometry = Polyline(
                    project(GeoPoint(c[0], c[1]), origin) for c in coords
                )
        except (TypeError, IndexError) as exc:
            raise SchemaError(f"{path}: feature {fid!r} has malformed coordinates") from exc
        props = dict(raw.get("properties") or {})
        features.append(Feature(id=fid, geometry=geometry, properties=props))
    out = _KIND_CLASS[expected](features=features, origin=origin)
    if expected == "permits":
        for f in features:
            permit_interval(f)  # validate eagerly
    return out


def feature_to_geojson(f: Feature, origin: GeoPoint) -> dict:
    if f.is_line:
        geom = {
            "type": "LineString",
            "coordinates": [list(unproject(p, origin)) for p in f.geometry.points],
        }
    else:
        geom = {"type": "Point", "coordinates": list(unproject(f.geometry, origin))}
    return {"type": "Feature", "id": f.id, "geometry": geom, "properties": f.properties}


def dump_features(fs: FeatureSet, path: str) -> None:
    doc = {
        "type": "FeatureCollection",
        "features": [feature_to_geojson(f, fs.origin) for f in fs.features],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def dataset_origin(path: str) -> GeoPoint:
    """Centroid of the bounding box of all coordinates in a GeoJSON file."""
    doc = _parse_feature_collection(path)
    lons: list[float] = []
    lats: list[float] = []

    def eat(coords):
        if not coords:
            return
        if isinstance(coords[0], (int, float)):
            lons.append(float(coords[0]))
            lats.append(float(coords[1]))
        else:
            for c in coords:
                eat(c)

    for raw in doc.get("features", []):
        geom = raw.get("geometry") or {}
        eat(geom.get("coordinates"))
    if not lons:
        raise EmptyDatasetError(f"{path} contains no coordinates to derive an origin")
    return GeoPoint((min(lons) + max(lons)) / 2.0, (min(lats) + max(lats)) / 2.0)


# ---------------------------------------------------------------------------
# Elevation grid (ESRI ASCII, coordinates in local projected meters)
# ---------------------------------------------------------------------------


@dataclass
class ElevationGrid:
    """Regular raster of elevations with bilinear sampling at cell centers.

    ``values[0]`` is the top (northernmost) row, as in the file format.
    ``origin`` is the lower-left corner of the grid in local meters.
    """

    ncols: int
    nrows: int
    cellsize: float
    origin: LocalPoint
    values: np.ndarray
    nodata: float = -9999.0

    def __post_init__(self):
        if self.ncols < 2 or self.nrows < 2:
            raise FormatError("elevation grid needs at least 2x2 cells")
        if self.cellsize <= 0:
            raise FormatError("elevation grid cellsize must be positive")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.nrows, self.ncols):
            raise FormatError(
                f"elevation grid has {self.values.size} values, expected "
                f"{self.nrows * self.ncols}"
            )

    def _cell_value(self, col: int, row_from_bottom: int) -> float:
        return float(self.values[self.nrows - 1 - row_from_bottom, col])

    def sample(self, p: LocalPoint) -> float:
        """Bilinear interpolation of the four surrounding cell centers.

        Valid inside the hull of cell centers (half a cell in from the grid
        edge); exact at cell centers.
        """
        gx = (p[0] - self.origin[0]) / self.cellsize - 0.5
        gy = (p[1] - self.origin[1]) / self.cellsize - 0.5
        if gx < 0 or gy < 0 or gx > self.ncols - 1 or gy > self.nrows - 1:
            raise ExtentError(
                f"point ({p[0]:.2f}, {p[1]:.2f}) outside elevation grid sample extent"
            )
        c0 = min(int(math.floor(gx)), self.ncols - 2)
        r0 = min(int(math.floor(gy)), self.nrows - 2)
        fx = gx - c0
        fy = gy - r0
        z00 = self._cell_value(c0, r0)
        z10 = self._cell_value(c0 + 1, r0)
        z01 = self._cell_value(c0, r0 + 1)
        z11 = self._cell_value(c0 + 1, r0 + 1)
        for z in (z00, z10, z01, z11):
            if z == self.nodata or not math.isfinite(z):
                raise NodataError(
                    f"nodata cell adjacent to ({p[0]:.2f}, {p[1]:.2f})"
                )
        return (
            z00 * (1 - fx) * (1 - fy)
            + z10 * fx * (1 - fy)
            + z01 * (1 - fx) * fy
            + z11 * fx * fy
        )


def load_elevation_grid(path: str) -> ElevationGrid:
    """Parse an ESRI ASCII grid (.asc) file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            tokens = fh.read().split()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    header: dict[str, float] = {}
    pos = 0
    expected_keys = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"}
    while pos + 1 < len(tokens) and tokens[pos].lower() in expected_keys:
        key = tokens[pos].lower()
        try:
            header[key] = float(tokens[pos + 1])
        except ValueError as exc:
            raise FormatError(f"{path}: malformed header value for {key}") from exc
        pos += 2
    for key in ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize"):
        if key not in header:
            raise FormatError(f"{path}: missing header field {key}")
    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    body = tokens[pos:]
    if len(body) != ncols * nrows:
        raise FormatError(
            f"{path}: expected {ncols * nrows} grid values, found {len(body)}"
        )
    try:
        values = np.array([float(t) for t in body], dtype=float).reshape(nrows, ncols)
    except ValueError as exc:
        raise FormatError(f"{path}: non-numeric grid value: {exc}") from exc
    return ElevationGrid(
        ncols=ncols,
        nrows=nrows,
        cellsize=header["cellsize"],
        origin=LocalPoint(header["xllcorner"], header["yllcorner"]),
        values=values,
        nodata=header.get("nodata_value", -9999.0),
    )


def dump_elevation_grid(grid: ElevationGrid, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"ncols {grid.ncols}\n")
        fh.write(f"nrows {grid.nrows}\n")
        fh.write(f"xllcorner {grid.origin[0]!r}\n")
        fh.write(f"yllcorner {grid.origin[1]!r}\n")
        fh.write(f"cellsize {grid.cellsize!r}\n")
        fh.write(f"NODATA_value {grid.nodata!r}\n")
        for row in grid.values:
            fh.write(" ".join(repr(float(v)) for v in row))
            fh.write("\n")


# ---------------------------------------------------------------------------
# Input validation report
# ---------------------------------------------------------------------------


def validate_inputs(
    sidewalks: SidewalkSet,
    ramps: Optional[CurbRampSet] = None,
    orphan_radius: float = 50.0,
) -> dict:
    """Cross-dataset sanity report; orphan ramps are flagged, never rejected."""
    report: dict = {"sidewalk_count": len(sidewalks), "orphan_ramps": []}
    if ramps is not None:
        index = GridIndex(cell_size=max(orphan_radius, 1.0))
        for f in sidewalks:
            a, b = f.endpoints()
            index.insert((f.id, 0), a)
            index.insert((f.id, 1), b)
        for r in ramps:
            if not index.within(r.geometry, orphan_radius):
                report["orphan_ramps"].append(r.id)
        report["ramp_count"] = len(ramps)
    return report
