"""Synthetic city generator with ground truth, plus a pipeline evaluator.

The generator builds a brick-offset street grid: alternate horizontal strips
shift their vertical streets by half a block, so every interior intersection
is a genuine 3-way with two collinear arms, and the sidewalk running past it
on the far side carries the systematic gap the repair stage exists to fix.
Block corners are emitted as disconnected sidewalk ends (withheld with
``gap_probability``; otherwise the two sides share a corner vertex), Gaussian
noise jitters sidewalk endpoints, and ground truth records which endpoints
belong together so precision/recall can be scored exactly.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import PipelineConfig
from .data import (
    CurbRampSet,
    ElevationGrid,
    Feature,
    SidewalkSet,
    StreetSet,
    dump_elevation_grid,
    dump_features,
)
from .denoise import EndpointRef, feature_components
from .errors import ParameterError
from .geometry import GeoPoint, LocalPoint, Polyline, distance
from .pipeline import BuildResult, build_graph

DEFAULT_ORIGIN = GeoPoint(-122.3321, 47.6062)


@dataclass
class CityParams:
    blocks_x: int = 5
    blocks_y: int = 5
    block_size: float = 100.0
    sidewalk_offset: float = 5.0
    corner_gap: float = 6.0      # trim at withheld corners, per side
    t_gap: float = 6.0           # gap injected in the sidewalk passing a T
    t_offset: float = 0.5        # vertical-street shift in alternate strips, block fraction
    noise_sigma: float = 0.0
    gap_probability: float = 1.0  # chance a block corner is withheld (disconnected)
    ramp_probability: float = 1.0
    elevation_model: str = "flat"  # flat | plane | hill
    plane_slope: float = 0.03
    hill_amplitude: float = 5.0
    hill_wavelength: float = 400.0
    elevation_cellsize: float = 10.0
    seed: int = 0
    origin: GeoPoint = DEFAULT_ORIGIN

    def __post_init__(self):
        if self.blocks_x < 1 or self.blocks_y < 1:
            raise ParameterError("city needs at least 1x1 blocks")
        if self.block_size <= 0 or self.sidewalk_offset <= 0:
            raise ParameterError("block_size and sidewalk_offset must be positive")
        if self.noise_sigma < 0:
            raise ParameterError("noise_sigma must be >= 0")
        for name in ("gap_probability", "ramp_probability"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1]")
        if self.elevation_model not in ("flat", "plane", "hill"):
            raise ParameterError(f"unknown elevation_model {self.elevation_model!r}")
        if not 0.0 <= self.t_offset < 1.0:
            raise ParameterError("t_offset must be in [0, 1)")
        side = self.block_size * min(1.0, self.t_offset or 1.0)
        if side - 2 * self.sidewalk_offset - 2 * self.corner_gap <= 1.0:
            raise ParameterError("block_size too small for sidewalk_offset and corner_gap")
        if isinstance(self.origin, (list, tuple)):
            self.origin = GeoPoint(float(self.origin[0]), float(self.origin[1]))

    def to_dict(self) -> dict:
        doc = {
            k: getattr(self, k)
            for k in self.__dataclass_fields__
            if k != "origin"
        }
        doc["origin"] = [self.origin.lon, self.origin.lat]
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "CityParams":
        return cls(**doc)


@dataclass
class GroundTruth:
    """What the generator knows that the pipeline must rediscover.

    ``adjacency`` pairs carry the endpoint refs that belong together, their
    clean coordinates, whether the connection was withheld, and whether the
    corner sits at a street intersection (degree >= 3); pairs away from
    intersections are invisible to the corner logic by design.
    """

    adjacency: list[dict] = field(default_factory=list)
    block_membership: dict[str, int] = field(default_factory=dict)
    block_count: int = 0
    sectors_with_endpoints: int = 0
    intersection_count: int = 0
    clean_endpoints: dict[str, list[list[float]]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "adjacency": self.adjacency,
            "block_membership": self.block_membership,
            "block_count": self.block_count,
            "sectors_with_endpoints": self.sectors_with_endpoints,
            "intersection_count": self.intersection_count,
            "clean_endpoints": self.clean_endpoints,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GroundTruth":
        return cls(
            adjacency=list(doc.get("adjacency", [])),
            block_membership=dict(doc.get("block_membership", {})),
            block_count=int(doc.get("block_count", 0)),
            sectors_with_endpoints=int(doc.get("sectors_with_endpoints", 0)),
            intersection_count=int(doc.get("intersection_count", 0)),
            clean_endpoints=dict(doc.get("clean_endpoints", {})),
        )


@dataclass
class SynthCity:
    params: CityParams
    sidewalks: SidewalkSet
    streets: StreetSet
    curb_ramps: CurbRampSet
    elevation: ElevationGrid
    truth: GroundTruth


def _strip_verticals(params: CityParams, strip: int) -> list[float]:
    """X positions of the vertical streets bounding one strip's blocks."""
    width = params.blocks_x * params.block_size
    off = (strip % 2) * params.t_offset * params.block_size
    xs = {0.0, width}
    k = 0
    while True:
        x = off + k * params.block_size
        if x >= width - 1e-9:
            break
        if x > 1e-9:
            xs.add(x)
        k += 1
    return sorted(xs)


def _street_node_degrees(params: CityParams) -> dict[tuple[float, float], int]:
    """Street-graph degree at every node, keyed by rounded (x, y)."""
    bs = params.block_size
    width = params.blocks_x * bs
    degrees: dict[tuple[float, float], int] = {}
    for row in range(params.blocks_y + 1):
        y = row * bs
        xs_below = _strip_verticals(params, row - 1) if row >= 1 else []
        xs_above = _strip_verticals(params, row) if row <= params.blocks_y - 1 else []
        for x in sorted({round(v, 6) for v in xs_below} | {round(v, 6) for v in xs_above}):
            deg = (1 if x > 1e-6 else 0) + (1 if x < width - 1e-6 else 0)
            deg += 1 if any(abs(x - v) <= 1e-6 for v in xs_below) else 0
            deg += 1 if any(abs(x - v) <= 1e-6 for v in xs_above) else 0
            degrees[(x, round(y, 6))] = deg
    return degrees


def generate_city(params: CityParams) -> SynthCity:
    """Deterministic synthetic city; identical params give identical output."""
    rng = np.random.default_rng(params.seed)
    bs = params.block_size
    width = params.blocks_x * bs
    height = params.blocks_y * bs
    degrees = _street_node_degrees(params)

    streets: list[Feature] = []

    def add_street(a: LocalPoint, b: LocalPoint):
        streets.append(
            Feature(id=f"street{len(streets)}", geometry=Polyline([a, b]), properties={})
        )

    for row in range(params.blocks_y + 1):
        y = row * bs
        xs: set[float] = set()
        if row < params.blocks_y:
            xs.update(_strip_verticals(params, row))
        if row > 0:
            xs.update(_strip_verticals(params, row - 1))
        ordered = sorted(xs)
        for x0, x1 in zip(ordered, ordered[1:]):
            add_street(LocalPoint(x0, y), LocalPoint(x1, y))
    for strip in range(params.blocks_y):
        y0, y1 = strip * bs, (strip + 1) * bs
        for x in _strip_verticals(params, strip):
            add_street(LocalPoint(x, y0), LocalPoint(x, y1))

    sidewalks: list[Feature] = []
    truth = GroundTruth()
    ramp_points: list[LocalPoint] = []
    block_index = 0

    def new_sidewalk(points: list[LocalPoint], block: int) -> str:
        fid = f"sw{len(sidewalks)}"
        sidewalks.append(Feature(id=fid, geometry=Polyline(points), properties={}))
        truth.block_membership[fid] = block
        return fid

    for strip in range(params.blocks_y):
        verts = _strip_verticals(params, strip)
        y0, y1 = strip * bs, (strip + 1) * bs
        for x0, x1 in zip(verts, verts[1:]):
            _emit_block(
                params, rng, x0, x1, y0, y1, strip, block_index,
                new_sidewalk, truth, ramp_points, degrees,
            )
            block_index += 1
    truth.block_count = block_index
    truth.sectors_with_endpoints = sum(
        1 for pair in truth.adjacency if pair["at_intersection"]
    )
    truth.intersection_count = sum(1 for deg in degrees.values() if deg >= 3)

    center = LocalPoint(width / 2.0, height / 2.0)

    def recenter(p) -> LocalPoint:
        return LocalPoint(p[0] - center[0], p[1] - center[1])

    noisy_sidewalks = []
    for f in sidewalks:
        pts = []
        for p in f.geometry.points:
            q = recenter(p)
            if params.noise_sigma > 0:
                dx, dy = rng.normal(0.0, params.noise_sigma, size=2)
                q = LocalPoint(q[0] + dx, q[1] + dy)
            pts.append(q)
        noisy_sidewalks.append(Feature(id=f.id, geometry=Polyline(pts), properties={}))
        truth.clean_endpoints[f.id] = [
            list(recenter(f.geometry.start)),
            list(recenter(f.geometry.end)),
        ]
    clean_streets = [
        Feature(
            id=f.id,
            geometry=Polyline([recenter(p) for p in f.geometry.points]),
            properties={},
        )
        for f in streets
    ]
    ramps = [
        Feature(id=f"ramp{i}", geometry=recenter(p), properties={})
        for i, p in enumerate(ramp_points)
    ]
    for pair in truth.adjacency:
        pair["a_xy"] = list(recenter(pair["a_xy"]))
        pair["b_xy"] = list(recenter(pair["b_xy"]))
        pair["node_xy"] = list(recenter(pair["node_xy"]))

    margin = 3.0 * params.elevation_cellsize
    grid = _make_grid(params, width, height, margin)

    origin = params.origin
    return SynthCity(
        params=params,
        sidewalks=SidewalkSet(features=noisy_sidewalks, origin=origin),
        streets=StreetSet(features=clean_streets, origin=origin),
        curb_ramps=CurbRampSet(features=ramps, origin=origin),
        elevation=grid,
        truth=truth,
    )


def _emit_block(
    params: CityParams,
    rng: np.random.Generator,
    x0: float,
    x1: float,
    y0: float,
    y1: float,
    strip: int,
    block: int,
    new_sidewalk,
    truth: GroundTruth,
    ramp_points: list[LocalPoint],
    degrees: dict[tuple[float, float], int],
) -> None:
    """Emit the sidewalk ring of one block.

    North/south sides are split where a neighboring strip's vertical street
    dead-ends into them (the T situation); corners are withheld with
    ``gap_probability``.
    """
    d = params.sidewalk_offset
    g = params.corner_gap
    ix0, ix1 = x0 + d, x1 - d
    iy0, iy1 = y0 + d, y1 - d

    withheld = {
        name: bool(rng.random() < params.gap_probability)
        for name in ("nw", "ne", "sw", "se")
    }

    def t_positions(other_strip: int) -> list[float]:
        if other_strip < 0 or other_strip >= params.blocks_y:
            return []
        return [
            x for x in _strip_verticals(params, other_strip)
            if x0 + d + g < x < x1 - d - g
        ]

    north_ts = t_positions(strip + 1)
    south_ts = t_positions(strip - 1)

    def side_pieces(start: LocalPoint, end: LocalPoint, start_trim: bool, end_trim: bool,
                    ts: Optional[list[float]] = None, horiz_y: Optional[float] = None):
        sx, sy = start
        ex, ey = end
        length = math.hypot(ex - sx, ey - sy)
        ux, uy = (ex - sx) / length, (ey - sy) / length
        a = LocalPoint(sx + (g if start_trim else 0.0) * ux, sy + (g if start_trim else 0.0) * uy)
        b = LocalPoint(ex - (g if end_trim else 0.0) * ux, ey - (g if end_trim else 0.0) * uy)
        if not ts:
            return [(a, b)], []
        gap_half = params.t_gap / 2.0
        pieces = []
        joints = []
        cur = a
        ordered = sorted(ts, reverse=(ux < 0))
        for tx in ordered:
            if ux > 0:
                p_end = LocalPoint(tx - gap_half, horiz_y)
                p_next = LocalPoint(tx + gap_half, horiz_y)
            else:
                p_end = LocalPoint(tx + gap_half, horiz_y)
                p_next = LocalPoint(tx - gap_half, horiz_y)
            pieces.append((cur, p_end))
            joints.append((p_end, p_next, tx))
            cur = p_next
        pieces.append((cur, b))
        return pieces, joints

    north_pieces, north_joints = side_pieces(
        LocalPoint(ix0, iy1), LocalPoint(ix1, iy1),
        withheld["nw"], withheld["ne"], north_ts, iy1,
    )
    south_pieces, south_joints = side_pieces(
        LocalPoint(ix1, iy0), LocalPoint(ix0, iy0),
        withheld["se"], withheld["sw"], south_ts, iy0,
    )
    east_pieces, _ = side_pieces(
        LocalPoint(ix1, iy1), LocalPoint(ix1, iy0), withheld["ne"], withheld["se"]
    )
    west_pieces, _ = side_pieces(
        LocalPoint(ix0, iy0), LocalPoint(ix0, iy1), withheld["sw"], withheld["nw"]
    )

    side_ends: dict[str, tuple[EndpointRef, EndpointRef]] = {}
    t_boundary_y = {"north": y1, "south": y0}
    for side_name, pieces, joints in (
        ("north", north_pieces, north_joints),
        ("east", east_pieces, []),
        ("south", south_pieces, south_joints),
        ("west", west_pieces, []),
    ):
        fids = [new_sidewalk([a, b], block) for a, b in pieces]
        side_ends[side_name] = ((fids[0], 0), (fids[-1], 1))
        for j, (p_end, p_next, tx) in enumerate(joints):
            truth.adjacency.append({
                "kind": "t",
                "a": [fids[j], 1],
                "b": [fids[j + 1], 0],
                "a_xy": [p_end[0], p_end[1]],
                "b_xy": [p_next[0], p_next[1]],
                "node_xy": [tx, t_boundary_y[side_name]],
                "withheld": True,
                "at_intersection": True,
            })
            if rng.random() < params.ramp_probability:
                ramp_points.append(
                    LocalPoint((p_end[0] + p_next[0]) / 2.0, (p_end[1] + p_next[1]) / 2.0)
                )

    corner_info = {
        "nw": ("west", "north", LocalPoint(ix0, iy1), (x0, y1)),
        "ne": ("north", "east", LocalPoint(ix1, iy1), (x1, y1)),
        "se": ("east", "south", LocalPoint(ix1, iy0), (x1, y0)),
        "sw": ("south", "west", LocalPoint(ix0, iy0), (x0, y0)),
    }
    trim_back = {  # incoming side stops g short of the corner
        "west": (0.0, -g), "north": (-g, 0.0), "east": (0.0, g), "south": (g, 0.0),
    }
    trim_fwd = {  # outgoing side starts g past the corner
        "north": (g, 0.0), "east": (0.0, -g), "south": (-g, 0.0), "west": (0.0, g),
    }
    for name, (in_side, out_side, cp, node) in corner_info.items():
        if withheld[name]:
            bx, by = trim_back[in_side]
            fx, fy = trim_fwd[out_side]
            a_xy = [cp[0] + bx, cp[1] + by]
            b_xy = [cp[0] + fx, cp[1] + fy]
        else:
            a_xy = [cp[0], cp[1]]
            b_xy = [cp[0], cp[1]]
        node_key = (round(node[0], 6), round(node[1], 6))
        truth.adjacency.append({
            "kind": "corner",
            "a": list(side_ends[in_side][1]),
            "b": list(side_ends[out_side][0]),
            "a_xy": a_xy,
            "b_xy": b_xy,
            "node_xy": [node[0], node[1]],
            "withheld": withheld[name],
            "at_intersection": degrees.get(node_key, 0) >= 3,
        })
        if rng.random() < params.ramp_probability:
            ramp_points.append(
                LocalPoint((a_xy[0] + b_xy[0]) / 2.0, (a_xy[1] + b_xy[1]) / 2.0)
            )


def _make_grid(
    params: CityParams, width: float, height: float, margin: float
) -> ElevationGrid:
    cell = params.elevation_cellsize
    ncols = int(math.ceil((width + 2 * margin) / cell)) + 1
    nrows = int(math.ceil((height + 2 * margin) / cell)) + 1
    xll = -width / 2.0 - margin
    yll = -height / 2.0 - margin

    def z(x: float, y: float) -> float:
        if params.elevation_model == "flat":
            return 0.0
        if params.elevation_model == "plane":
            return params.plane_slope * x
        w = 2.0 * math.pi / params.hill_wavelength
        return params.hill_amplitude * math.sin(w * x) * math.sin(w * y)

    values = np.zeros((nrows, ncols))
    for r in range(nrows):
        for c in range(ncols):
            cx = xll + (c + 0.5) * cell
            cy = yll + (nrows - 1 - r + 0.5) * cell  # row 0 is the top row
            values[r, c] = z(cx, cy)
    return ElevationGrid(
        ncols=ncols, nrows=nrows, cellsize=cell,
        origin=LocalPoint(xll, yll), values=values, nodata=-9999.0,
    )


def write_city(city: SynthCity, out_dir: str) -> dict[str, str]:
    """Write the city datasets in the exact formats the loaders read."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "sidewalks": os.path.join(out_dir, "sidewalks.geojson"),
        "streets": os.path.join(out_dir, "streets.geojson"),
        "curbramps": os.path.join(out_dir, "curbramps.geojson"),
        "elevation": os.path.join(out_dir, "elevation.asc"),
        "truth": os.path.join(out_dir, "truth.json"),
        "config": os.path.join(out_dir, "config.json"),
        "params": os.path.join(out_dir, "params.json"),
    }
    dump_features(city.sidewalks, paths["sidewalks"])
    dump_features(city.streets, paths["streets"])
    dump_features(city.curb_ramps, paths["curbramps"])
    dump_elevation_grid(city.elevation, paths["elevation"])
    with open(paths["truth"], "w", encoding="utf-8") as fh:
        json.dump(city.truth.to_dict(), fh)
        fh.write("\n")
    with open(paths["params"], "w", encoding="utf-8") as fh:
        json.dump(city.params.to_dict(), fh, indent=2)
        fh.write("\n")
    cfg = PipelineConfig(origin=[city.params.origin.lon, city.params.origin.lat])
    cfg.save(paths["config"])
    return paths


def evaluate_pipeline(
    city: SynthCity, config: Optional[PipelineConfig] = None
) -> tuple[dict, BuildResult]:
    """Score the pipeline against ground truth; returns (scorecard, build).

    Positives are truth adjacency pairs at street intersections whose
    endpoints do not already coincide in the (noisy) input; a pipeline
    connector scores as a true positive when it joins exactly such a pair.
    """
    result = build_graph(
        sidewalks=city.sidewalks,
        streets=city.streets,
        curb_ramps=city.curb_ramps,
        elevation=city.elevation,
        config=config,
    )
    merge_tol = (config or PipelineConfig()).merge_tol

    positions = {f.id: f for f in city.sidewalks}

    def ref_point(ref: list) -> LocalPoint:
        return positions[ref[0]].endpoint(int(ref[1]))

    positives: set[tuple[EndpointRef, EndpointRef]] = set()
    for pair in city.truth.adjacency:
        if not pair["at_intersection"]:
            continue
        if distance(ref_point(pair["a"]), ref_point(pair["b"])) <= merge_tol:
            continue  # already joined in the data
        a = (pair["a"][0], int(pair["a"][1]))
        b = (pair["b"][0], int(pair["b"][1]))
        positives.add((a, b) if a <= b else (b, a))

    predicted = {action.canonical_pair() for action in result.repairs}
    tp = len(predicted & positives)
    precision = tp / len(predicted) if predicted else 1.0
    recall = tp / len(positives) if positives else 1.0

    components = feature_components(result.repaired_sidewalks, merge_tol)
    blocks: dict[int, list[str]] = {}
    for fid, block in city.truth.block_membership.items():
        blocks.setdefault(block, []).append(fid)
    connected = 0
    for fids in blocks.values():
        if len({components.get(fid) for fid in fids}) == 1:
            connected += 1
    block_rate = connected / len(blocks) if blocks else 1.0

    crossed: set[tuple[int, int]] = set()
    for c in result.crossings:
        crossed.update(c.sector_keys)
    expected = city.truth.sectors_with_endpoints
    crossing_rate = min(1.0, len(crossed) / expected) if expected else 1.0

    scorecard = {
        "params": {
            "blocks_x": city.params.blocks_x,
            "blocks_y": city.params.blocks_y,
            "noise_sigma": city.params.noise_sigma,
            "gap_probability": city.params.gap_probability,
            "ramp_probability": city.params.ramp_probability,
            "seed": city.params.seed,
        },
        "connection_precision": precision,
        "connection_recall": recall,
        "true_pairs": len(positives),
        "predicted_pairs": len(predicted),
        "true_positive_pairs": tp,
        "block_connectivity_rate": block_rate,
        "crossing_coverage_rate": crossing_rate,
        "coverage_report": result.report,
    }
    return scorecard, result
