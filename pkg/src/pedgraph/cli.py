"""Command-line interface: build, route, serve, report, synth."""

from __future__ import annotations

import datetime as dt
import json
import os
import sys

import click

from .config import PipelineConfig
from .data import dataset_origin, load_elevation_grid, load_features, validate_inputs
from .errors import NoRouteError, PedgraphError, UnroutableWaypointError
from .geometry import GeoPoint
from .graph import RoutingGraph
from .pipeline import build_graph, repairs_to_geojson
from .router import PRESETS
from .service import create_app, render_json, run_route_query
from .synth import CityParams, evaluate_pipeline, generate_city, write_city

EXIT_DATA_ERROR = 1
EXIT_NO_ROUTE = 2


def _fail(message: str, code: int = EXIT_DATA_ERROR):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_lonlat(raw: str) -> GeoPoint:
    parts = raw.split(",")
    if len(parts) != 2:
        raise PedgraphError(f"expected 'lon,lat', got {raw!r}")
    try:
        return GeoPoint(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise PedgraphError(f"bad coordinate {raw!r}: {exc}") from exc


@click.group()
def main():
    """Build and serve accessibility-aware pedestrian routing graphs."""


@main.command()
@click.option("--sidewalks", required=True, type=click.Path())
@click.option("--streets", required=True, type=click.Path())
@click.option("--curbramps", required=True, type=click.Path())
@click.option("--elevation", type=click.Path(), default=None)
@click.option("--permits", type=click.Path(), default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--repairs-out", type=click.Path(), default=None,
              help="Also write the repair connectors as GeoJSON for auditing.")
def build(sidewalks, streets, curbramps, elevation, permits, out, config_path, repairs_out):
    """Run ingest, repair, and assembly; write the graph JSON."""
    try:
        cfg = PipelineConfig.load(config_path) if config_path else PipelineConfig()
        if cfg.origin is not None:
            origin = GeoPoint(cfg.origin[0], cfg.origin[1])
        else:
            origin = dataset_origin(streets)
        sidewalk_set = load_features(sidewalks, "sidewalks", origin)
        street_set = load_features(streets, "streets", origin)
        ramp_set = load_features(curbramps, "curbramps", origin)
        grid = load_elevation_grid(elevation) if elevation else None
        permit_set = load_features(permits, "permits", origin) if permits else None

        checks = validate_inputs(sidewalk_set, ramp_set, cfg.orphan_ramp_radius)
        for ramp_id in checks["orphan_ramps"]:
            click.echo(f"warning: curb ramp {ramp_id} is far from any sidewalk", err=True)

        result = build_graph(
            sidewalks=sidewalk_set,
            streets=street_set,
            curb_ramps=ramp_set,
            elevation=grid,
            permits=permit_set,
            config=cfg,
        )
        result.graph.save(out)
        if repairs_out:
            with open(repairs_out, "w", encoding="utf-8") as fh:
                json.dump(repairs_to_geojson(result.repairs, sidewalk_set), fh)
                fh.write("\n")
        click.echo(json.dumps(result.report, indent=2))
    except PedgraphError as exc:
        _fail(str(exc))


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path())
@click.option("--from", "origin", required=True, help="lon,lat")
@click.option("--to", "destination", required=True, help="lon,lat")
@click.option("--profile", default="default",
              help="Preset name or path to a profile JSON file.")
@click.option("--date", "query_date", default=None, help="Trip date (YYYY-MM-DD).")
def route(graph_path, origin, destination, profile, query_date):
    """Print the route between two lon,lat waypoints as JSON."""
    try:
        graph = RoutingGraph.load(graph_path)
        profile_spec = profile
        if profile not in PRESETS and (os.path.exists(profile) or profile.endswith(".json")):
            with open(profile, "r", encoding="utf-8") as fh:
                profile_spec = json.load(fh)
        when = dt.date.fromisoformat(query_date) if query_date else None
        doc = run_route_query(
            graph, _parse_lonlat(origin), _parse_lonlat(destination), profile_spec, when
        )
    except (UnroutableWaypointError, NoRouteError) as exc:
        _fail(str(exc), EXIT_NO_ROUTE)
    except (PedgraphError, ValueError) as exc:
        _fail(str(exc))
    else:
        click.echo(render_json(doc))


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(graph_path, host, port):
    """Serve the HTTP API over a built graph."""
    import uvicorn

    try:
        graph = RoutingGraph.load(graph_path)
    except PedgraphError as exc:
        _fail(str(exc))
    click.echo(f"serving {graph!r} on http://{host}:{port}")
    uvicorn.run(create_app(graph), host=host, port=port, log_level="warning")


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path())
def report(graph_path):
    """Print the coverage report stored in a graph file."""
    try:
        graph = RoutingGraph.load(graph_path)
    except PedgraphError as exc:
        _fail(str(exc))
    else:
        click.echo(json.dumps(graph.meta.get("coverage_report", {}), indent=2))


@main.command()
@click.option("--preset", default="grid", type=click.Choice(["grid"]))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--blocks-x", default=5, type=int)
@click.option("--blocks-y", default=5, type=int)
@click.option("--block-size", default=100.0, type=float)
@click.option("--sigma", default=0.0, type=float, help="Endpoint noise sigma in meters.")
@click.option("--gap-probability", default=1.0, type=float)
@click.option("--ramp-probability", default=1.0, type=float)
@click.option("--elevation-model", default="flat",
              type=click.Choice(["flat", "plane", "hill"]))
@click.option("--seed", default=0, type=int)
@click.option("--evaluate/--no-evaluate", default=False,
              help="Also run the pipeline against ground truth; write scorecard.json.")
def synth(preset, out_dir, blocks_x, blocks_y, block_size, sigma, gap_probability,
          ramp_probability, elevation_model, seed, evaluate):
    """Generate a synthetic city dataset (with ground truth) for testing."""
    try:
        params = CityParams(
            blocks_x=blocks_x,
            blocks_y=blocks_y,
            block_size=block_size,
            noise_sigma=sigma,
            gap_probability=gap_probability,
            ramp_probability=ramp_probability,
            elevation_model=elevation_model,
            seed=seed,
        )
        city = generate_city(params)
        paths = write_city(city, out_dir)
        if evaluate:
            scorecard, _ = evaluate_pipeline(city)
            score_path = os.path.join(out_dir, "scorecard.json")
            with open(score_path, "w", encoding="utf-8") as fh:
                json.dump(scorecard, fh, indent=2)
                fh.write("\n")
            paths["scorecard"] = score_path
        click.echo(json.dumps(paths, indent=2))
    except PedgraphError as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
