"""pedgraph: routable, accessibility-annotated pedestrian graphs.

Turns noisy municipal sidewalk data (disconnected segments, curb ramps,
elevation rasters, construction permits) into a connected multi-attribute
graph and answers preference-weighted routing queries over it.
"""

from .config import PipelineConfig
from .data import (
    CurbRampSet,
    ElevationGrid,
    Feature,
    PermitSet,
    SidewalkSet,
    StreetSet,
    load_elevation_grid,
    load_features,
)
from .estimators import AccessRouter, SidewalkGraphBuilder
from .geometry import GeoPoint, LocalPoint, Polyline
from .graph import GraphEdge, GraphNode, RoutingGraph
from .pipeline import BuildResult, build_graph
from .router import PRESETS, CostProfile, Route, shortest_path, snap
from .synth import CityParams, SynthCity, evaluate_pipeline, generate_city

__version__ = "0.1.0"

__all__ = [
    "AccessRouter",
    "BuildResult",
    "CityParams",
    "CostProfile",
    "CurbRampSet",
    "ElevationGrid",
    "Feature",
    "GeoPoint",
    "GraphEdge",
    "GraphNode",
    "LocalPoint",
    "PRESETS",
    "PermitSet",
    "PipelineConfig",
    "Polyline",
    "Route",
    "RoutingGraph",
    "SidewalkGraphBuilder",
    "SidewalkSet",
    "StreetSet",
    "SynthCity",
    "build_graph",
    "evaluate_pipeline",
    "generate_city",
    "load_elevation_grid",
    "load_features",
    "shortest_path",
    "snap",
    "__version__",
]
