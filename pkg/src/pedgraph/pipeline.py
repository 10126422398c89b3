"""End-to-end graph construction: repair, classify, connect, cross, annotate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .config import PipelineConfig
from .data import CurbRampSet, ElevationGrid, PermitSet, SidewalkSet, StreetSet
from .denoise import (
    CornerSector,
    RepairAction,
    StreetNode,
    build_street_topology,
    classify_corner_endpoints,
    connect_block_corners,
    detect_t_intersections,
    repair_t_gaps,
)
from .graph import RoutingGraph
from .network import (
    CrossingProposal,
    annotate_construction,
    annotate_curb_ramps,
    annotate_elevation,
    assemble_graph,
    coverage_report,
    generate_crossings,
)


@dataclass
class BuildResult:
    graph: RoutingGraph
    repairs: list[RepairAction]
    sectors: list[CornerSector]
    street_nodes: list[StreetNode]
    crossings: list[CrossingProposal]
    report: dict
    repaired_sidewalks: Optional[SidewalkSet] = None


def build_graph(
    sidewalks: SidewalkSet,
    streets: StreetSet,
    curb_ramps: Optional[CurbRampSet] = None,
    elevation: Optional[ElevationGrid] = None,
    permits: Optional[PermitSet] = None,
    config: Optional[PipelineConfig] = None,
) -> BuildResult:
    """Run the full construction pipeline and return the annotated graph.

    Stages: street topology, T-gap repair, corner classification, block-corner
    connection, crossing generation, assembly, then elevation / curb ramp /
    construction annotation.
    """
    cfg = config or PipelineConfig()

    nodes = build_street_topology(streets, snap_tol=cfg.snap_tol)
    t_nodes = detect_t_intersections(nodes, min_separation=cfg.t_min_separation)
    repaired, t_actions, t_metrics = repair_t_gaps(
        sidewalks, t_nodes, max_gap=cfg.max_t_gap, merge_tol=cfg.merge_tol
    )
    sectors = classify_corner_endpoints(
        repaired, nodes, corner_radius=cfg.corner_radius, merge_tol=cfg.merge_tol
    )
    repaired, corner_actions, corner_metrics = connect_block_corners(
        repaired, sectors, max_connect=cfg.max_connect, merge_tol=cfg.merge_tol
    )
    crossings = generate_crossings(sectors, streets, repaired, max_cross=cfg.max_cross)
    graph = assemble_graph(repaired, crossings, merge_tol=cfg.merge_tol)

    if elevation is not None:
        annotate_elevation(graph, elevation)
    if curb_ramps is not None:
        annotate_curb_ramps(graph, curb_ramps, ramp_radius=cfg.ramp_radius)
    if permits is not None:
        annotate_construction(graph, permits, buffer=cfg.construction_buffer)

    report = coverage_report(graph, t_metrics, corner_metrics, crossings)
    graph.meta["coverage_report"] = report
    graph.meta["config"] = cfg.to_dict()
    return BuildResult(
        graph=graph,
        repairs=t_actions + corner_actions,
        sectors=sectors,
        street_nodes=nodes,
        crossings=crossings,
        report=report,
        repaired_sidewalks=repaired,
    )


def repairs_to_geojson(repairs: list[RepairAction], sidewalks: SidewalkSet) -> dict:
    """Audit export: every connector with its kind and bridged gap."""
    from .data import Feature, feature_to_geojson

    features = []
    for i, action in enumerate(repairs):
        features.append(
            feature_to_geojson(
                Feature(
                    id=f"repair{i}",
                    geometry=action.geometry,
                    properties={
                        "kind": action.kind,
                        "gap_m": action.gap_m,
                        "node_id": action.node_id,
                        "joined": [list(action.joined[0]), list(action.joined[1])],
                    },
                ),
                sidewalks.origin,
            )
        )
    return {"type": "FeatureCollection", "features": features}
