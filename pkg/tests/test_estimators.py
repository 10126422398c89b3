import pytest
from sklearn.base import clone

from pedgraph.errors import SchemaError
from pedgraph.estimators import AccessRouter, SidewalkGraphBuilder
from pedgraph.geometry import unproject
from pedgraph.graph import RoutingGraph
from pedgraph.router import Route


@pytest.fixture(scope="module")
def bundle(noiseless_city):
    c = noiseless_city
    return {
        "sidewalks": c.sidewalks,
        "streets": c.streets,
        "curb_ramps": c.curb_ramps,
        "elevation": c.elevation,
    }


class TestSidewalkGraphBuilder:
    def test_get_set_params(self):
        builder = SidewalkGraphBuilder()
        params = builder.get_params()
        assert params["max_t_gap"] == 30.48
        assert params["corner_radius"] == 30.0
        builder.set_params(max_cross=25.0)
        assert builder.max_cross == 25.0

    def test_clone_preserves_params(self):
        builder = SidewalkGraphBuilder(corner_radius=22.0)
        twin = clone(builder)
        assert twin.corner_radius == 22.0

    def test_fit_transform(self, bundle):
        builder = SidewalkGraphBuilder()
        graph = builder.fit_transform(bundle)
        assert isinstance(graph, RoutingGraph)
        assert builder.report_["component_count"] == 1
        assert builder.report_["corner_edit_rate"] == 1.0
        assert len(builder.repairs_) > 0

    def test_transform_before_fit_raises(self):
        with pytest.raises(RuntimeError):
            SidewalkGraphBuilder().transform(None)

    def test_bundle_validation(self):
        with pytest.raises(SchemaError):
            SidewalkGraphBuilder().fit({"sidewalks": None, "streets": None})
        with pytest.raises(SchemaError):
            SidewalkGraphBuilder().fit({"streets": "not a set"})

    def test_threshold_params_flow_through(self, bundle):
        strict = SidewalkGraphBuilder(max_connect=0.5).fit(bundle)
        normal = SidewalkGraphBuilder().fit(bundle)
        assert len(strict.repairs_) < len(normal.repairs_)


class TestAccessRouter:
    def test_fit_predict(self, bundle):
        graph = SidewalkGraphBuilder().fit_transform(bundle)
        router = AccessRouter().fit(graph)
        a = unproject(graph.node(0).location, graph.origin)
        b = unproject(graph.node(len(graph.nodes) - 1).location, graph.origin)
        routes = router.predict([[a.lon, a.lat, b.lon, b.lat]])
        assert len(routes) == 1
        assert isinstance(routes[0], Route)
        assert routes[0].total_length > 0

    def test_params_are_profile_fields(self):
        router = AccessRouter(require_curb_ramps=True, ramp_penalty=250.0)
        profile = router.profile()
        assert profile.require_curb_ramps is True
        assert profile.ramp_penalty == 250.0
        assert clone(router).ramp_penalty == 250.0

    def test_predict_requires_four_columns(self, bundle):
        graph = SidewalkGraphBuilder().fit_transform(bundle)
        router = AccessRouter().fit(graph)
        with pytest.raises(SchemaError):
            router.predict([[1.0, 2.0]])

    def test_fit_rejects_non_graph(self):
        with pytest.raises(SchemaError):
            AccessRouter().fit("nope")
