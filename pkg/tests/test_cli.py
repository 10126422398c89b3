import json

import pytest
from click.testing import CliRunner

from pedgraph.cli import main


@pytest.fixture(scope="module")
def city_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("city")
    runner = CliRunner()
    result = runner.invoke(main, [
        "synth", "--preset", "grid", "--out", str(out),
        "--blocks-x", "3", "--blocks-y", "3", "--elevation-model", "plane",
    ])
    assert result.exit_code == 0, result.output
    return out


@pytest.fixture(scope="module")
def graph_path(city_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("build") / "graph.json"
    runner = CliRunner()
    result = runner.invoke(main, [
        "build",
        "--sidewalks", str(city_dir / "sidewalks.geojson"),
        "--streets", str(city_dir / "streets.geojson"),
        "--curbramps", str(city_dir / "curbramps.geojson"),
        "--elevation", str(city_dir / "elevation.asc"),
        "--config", str(city_dir / "config.json"),
        "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    return out


class TestSynthCommand:
    def test_emits_all_dataset_files(self, city_dir):
        for name in ("sidewalks.geojson", "streets.geojson", "curbramps.geojson",
                     "elevation.asc", "truth.json", "config.json", "params.json"):
            assert (city_dir / name).exists(), name

    def test_evaluate_writes_scorecard(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(main, [
            "synth", "--out", str(tmp_path), "--blocks-x", "2", "--blocks-y", "2",
            "--evaluate",
        ])
        assert result.exit_code == 0, result.output
        scorecard = json.loads((tmp_path / "scorecard.json").read_text())
        assert scorecard["connection_recall"] == 1.0

    def test_bad_params_exit_one(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(main, [
            "synth", "--out", str(tmp_path), "--blocks-x", "0",
        ])
        assert result.exit_code == 1


class TestBuildCommand:
    def test_build_reports_perfect_rates(self, graph_path):
        runner = CliRunner()
        result = runner.invoke(main, ["report", "--graph", str(graph_path)])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["t_repair_rate"] == 1.0
        assert report["corner_edit_rate"] == 1.0
        assert report["block_connectivity_rate"] == 1.0
        assert report["crossing_corner_rate"] == 1.0
        assert report["component_count"] == 1

    def test_missing_file_exit_one(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(main, [
            "build", "--sidewalks", "/nope.geojson", "--streets", "/nope2.geojson",
            "--curbramps", "/nope3.geojson", "--out", str(tmp_path / "g.json"),
        ])
        assert result.exit_code == 1
        assert "error" in result.output or result.exception

    def test_repairs_audit_export(self, city_dir, tmp_path):
        runner = CliRunner()
        repairs = tmp_path / "repairs.geojson"
        result = runner.invoke(main, [
            "build",
            "--sidewalks", str(city_dir / "sidewalks.geojson"),
            "--streets", str(city_dir / "streets.geojson"),
            "--curbramps", str(city_dir / "curbramps.geojson"),
            "--config", str(city_dir / "config.json"),
            "--out", str(tmp_path / "g.json"),
            "--repairs-out", str(repairs),
        ])
        assert result.exit_code == 0, result.output
        doc = json.loads(repairs.read_text())
        assert doc["type"] == "FeatureCollection"
        assert doc["features"]
        kinds = {f["properties"]["kind"] for f in doc["features"]}
        assert kinds == {"t_connector", "corner_connector"}
        assert all("gap_m" in f["properties"] for f in doc["features"])


class TestRouteCommand:
    def node_lonlat(self, graph_path, node_id):
        doc = json.loads(graph_path.read_text())
        node = doc["nodes"][node_id]
        return f"{node['lon']},{node['lat']}"

    def test_route_outputs_json(self, graph_path):
        runner = CliRunner()
        result = runner.invoke(main, [
            "route", "--graph", str(graph_path),
            "--from", self.node_lonlat(graph_path, 0),
            "--to", self.node_lonlat(graph_path, 50),
            "--profile", "default",
        ])
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)
        assert doc["status"] == "ok"
        assert doc["steps"]

    def test_unroutable_origin_exit_two(self, graph_path):
        runner = CliRunner()
        result = runner.invoke(main, [
            "route", "--graph", str(graph_path),
            "--from", "-122.0,47.0",
            "--to", self.node_lonlat(graph_path, 0),
        ])
        assert result.exit_code == 2
        assert "error" in result.output

    def test_profile_file(self, graph_path, tmp_path):
        from pedgraph.router import PRESETS

        profile_path = tmp_path / "custom.json"
        doc = PRESETS["manual_assist"].to_dict()
        doc["name"] = "custom"
        profile_path.write_text(json.dumps(doc))
        runner = CliRunner()
        result = runner.invoke(main, [
            "route", "--graph", str(graph_path),
            "--from", self.node_lonlat(graph_path, 0),
            "--to", self.node_lonlat(graph_path, 50),
            "--profile", str(profile_path),
        ])
        assert result.exit_code == 0, result.output

    def test_cli_matches_api_byte_for_byte(self, graph_path):
        from fastapi.testclient import TestClient

        from pedgraph.graph import RoutingGraph
        from pedgraph.service import create_app

        origin = self.node_lonlat(graph_path, 0)
        dest = self.node_lonlat(graph_path, 50)
        runner = CliRunner()
        cli_out = runner.invoke(main, [
            "route", "--graph", str(graph_path), "--from", origin, "--to", dest,
            "--date", "2025-01-01",
        ])
        assert cli_out.exit_code == 0
        graph = RoutingGraph.load(str(graph_path))
        client = TestClient(create_app(graph))
        api = client.post("/route", json={
            "origin": [float(x) for x in origin.split(",")],
            "destination": [float(x) for x in dest.split(",")],
            "profile": "default",
            "query_date": "2025-01-01",
        })
        assert cli_out.output.strip() == api.content.decode("utf-8")
