"""Estimator-style API over the pipeline and router.

``SidewalkGraphBuilder`` is fit/transform shaped: ``fit`` consumes the raw
datasets and learns the repaired, annotated graph; ``transform`` returns it.
``AccessRouter`` is fit/predict shaped: ``fit`` binds a graph, ``predict``
maps (origin, destination) coordinate rows to routes. Both expose their
thresholds and weights through scikit-learn's ``get_params``/``set_params``
so they drop into grid searches, cloning, and pipelines.
"""

from __future__ import annotations

import datetime as dt
from typing import Optional, Sequence, Union

from sklearn.base import BaseEstimator

from .config import PipelineConfig
from .data import CurbRampSet, ElevationGrid, PermitSet, SidewalkSet, StreetSet
from .errors import SchemaError
from .geometry import GeoPoint
from .graph import RoutingGraph
from .pipeline import BuildResult, build_graph
from .router import CostProfile, Route, shortest_path, snap


def check_is_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise RuntimeError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first"
        )


def _as_dataset_bundle(X) -> dict:
    """Accept a dict of datasets or an object with matching attributes."""
    if isinstance(X, dict):
        bundle = dict(X)
    else:
        bundle = {
            key: getattr(X, key)
            for key in ("sidewalks", "streets", "curb_ramps", "elevation", "permits")
            if getattr(X, key, None) is not None
        }
    expected = {
        "sidewalks": SidewalkSet,
        "streets": StreetSet,
        "curb_ramps": CurbRampSet,
        "elevation": ElevationGrid,
        "permits": PermitSet,
    }
    for key in ("sidewalks", "streets"):
        if not isinstance(bundle.get(key), expected[key]):
            raise SchemaError(
                f"dataset bundle needs a {expected[key].__name__} under {key!r}"
            )
    for key, kind in expected.items():
        value = bundle.get(key)
        if value is not None and not isinstance(value, kind):
            raise SchemaError(f"bundle[{key!r}] must be a {kind.__name__}")
    return bundle


class SidewalkGraphBuilder(BaseEstimator):
    """Builds a routable pedestrian graph from municipal datasets.

    Parameters mirror :class:`~pedgraph.config.PipelineConfig`; after ``fit``
    the result lives in ``graph_``, ``report_``, ``repairs_`` and friends.
    """

    def __init__(
        self,
        snap_tol: float = 0.5,
        t_min_separation: float = 170.0,
        max_t_gap: float = 30.48,
        corner_radius: float = 30.0,
        max_connect: float = 30.48,
        max_cross: float = 40.0,
        ramp_radius: float = 5.0,
        construction_buffer: float = 10.0,
        merge_tol: float = 0.01,
    ):
        self.snap_tol = snap_tol
        self.t_min_separation = t_min_separation
        self.max_t_gap = max_t_gap
        self.corner_radius = corner_radius
        self.max_connect = max_connect
        self.max_cross = max_cross
        self.ramp_radius = ramp_radius
        self.construction_buffer = construction_buffer
        self.merge_tol = merge_tol

    def _config(self) -> PipelineConfig:
        return PipelineConfig(
            snap_tol=self.snap_tol,
            t_min_separation=self.t_min_separation,
            max_t_gap=self.max_t_gap,
            corner_radius=self.corner_radius,
            max_connect=self.max_connect,
            max_cross=self.max_cross,
            ramp_radius=self.ramp_radius,
            construction_buffer=self.construction_buffer,
            merge_tol=self.merge_tol,
        )

    def fit(self, X, y=None) -> "SidewalkGraphBuilder":
        """Run the construction pipeline on a dataset bundle.

        ``X``: dict (or object) with ``sidewalks`` and ``streets`` plus
        optional ``curb_ramps``, ``elevation``, ``permits``.
        """
        bundle = _as_dataset_bundle(X)
        result: BuildResult = build_graph(
            sidewalks=bundle["sidewalks"],
            streets=bundle["streets"],
            curb_ramps=bundle.get("curb_ramps"),
            elevation=bundle.get("elevation"),
            permits=bundle.get("permits"),
            config=self._config(),
        )
        self.graph_ = result.graph
        self.report_ = result.report
        self.repairs_ = result.repairs
        self.sectors_ = result.sectors
        self.crossings_ = result.crossings
        self.street_nodes_ = result.street_nodes
        self.repaired_sidewalks_ = result.repaired_sidewalks
        return self

    def transform(self, X=None) -> RoutingGraph:
        """Return the built graph (input ignored once fitted)."""
        check_is_fitted(self, "graph_")
        return self.graph_

    def fit_transform(self, X, y=None) -> RoutingGraph:
        return self.fit(X, y).transform(X)


class AccessRouter(BaseEstimator):
    """Routes coordinate pairs over a built graph under one cost profile.

    Constructor parameters are exactly the cost profile fields, so
    ``get_params``/``set_params`` tune routing preferences directly.
    """

    def __init__(
        self,
        w_distance: float = 1.0,
        grade_ideal: float = 0.02,
        grade_max: float = 0.0833,
        w_grade: float = 1.0,
        require_curb_ramps: bool = False,
        ramp_penalty: Union[float, str] = 0.0,
        avoid_construction: bool = False,
        construction_penalty: Union[float, str] = 0.0,
        query_date: Optional[dt.date] = None,
        snap_radius: float = 100.0,
    ):
        self.w_distance = w_distance
        self.grade_ideal = grade_ideal
        self.grade_max = grade_max
        self.w_grade = w_grade
        self.require_curb_ramps = require_curb_ramps
        self.ramp_penalty = ramp_penalty
        self.avoid_construction = avoid_construction
        self.construction_penalty = construction_penalty
        self.query_date = query_date
        self.snap_radius = snap_radius

    def profile(self) -> CostProfile:
        return CostProfile(
            name="router",
            w_distance=self.w_distance,
            grade_ideal=self.grade_ideal,
            grade_max=self.grade_max,
            w_grade=self.w_grade,
            require_curb_ramps=self.require_curb_ramps,
            ramp_penalty=self.ramp_penalty,
            avoid_construction=self.avoid_construction,
            construction_penalty=self.construction_penalty,
            query_date=self.query_date,
        )

    def fit(self, X: RoutingGraph, y=None) -> "AccessRouter":
        if not isinstance(X, RoutingGraph):
            raise SchemaError("AccessRouter.fit expects a RoutingGraph")
        self.graph_ = X
        return self

    def route(self, origin: GeoPoint, destination: GeoPoint) -> Route:
        check_is_fitted(self, "graph_")
        src = snap(self.graph_, origin, radius=self.snap_radius)
        dst = snap(self.graph_, destination, radius=self.snap_radius)
        return shortest_path(self.graph_, self.profile(), src, dst)

    def predict(self, X: Sequence[Sequence[float]]) -> list[Route]:
        """Rows of (origin_lon, origin_lat, dest_lon, dest_lat) to routes."""
        check_is_fitted(self, "graph_")
        routes = []
        for row in X:
            if len(row) != 4:
                raise SchemaError(
                    "predict rows must be (origin_lon, origin_lat, dest_lon, dest_lat)"
                )
            routes.append(
                self.route(GeoPoint(row[0], row[1]), GeoPoint(row[2], row[3]))
            )
        return routes
