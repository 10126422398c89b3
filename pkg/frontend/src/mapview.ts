// SVG plan-view of the network with zoom/pan, click picking, and route
// overlays. City extents are small, so a local equirectangular flattening
// (lon scaled by cos of the mid latitude) keeps shapes true; no tiles.

import * as d3 from "d3";

import type { Network, NetworkEdge, RouteResponse } from "./api";
import { gradeBand } from "./format";

export type LonLat = [number, number];

interface Fitted {
  toX: (lon: number) => number;
  toY: (lat: number) => number;
  fromX: (x: number) => number;
  fromY: (y: number) => number;
}

export class MapView {
  private svg: d3.Selection<SVGSVGElement, unknown, null, undefined>;
  private viewport: d3.Selection<SVGGElement, unknown, null, undefined>;
  private fitted: Fitted | null = null;
  private transform: d3.ZoomTransform = d3.zoomIdentity;
  private network: Network | null = null;

  constructor(
    svgEl: SVGSVGElement,
    private readonly onPick: (p: LonLat) => void,
    private readonly onViewport?: (bbox: [number, number, number, number]) => void,
  ) {
    this.svg = d3.select(svgEl);
    this.viewport = this.svg.append("g").attr("class", "viewport");
    for (const layer of ["edges", "ramps", "route-pinned", "route-current", "markers"]) {
      this.viewport.append("g").attr("class", layer);
    }
    const zoom = d3
      .zoom<SVGSVGElement, unknown>()
      .scaleExtent([0.2, 40])
      .on("zoom", (event) => {
        this.transform = event.transform;
        this.viewport.attr("transform", event.transform.toString());
      })
      .on("end", () => {
        if (this.onViewport && this.fitted) {
          this.onViewport(this.visibleBbox());
        }
      });
    this.svg.call(zoom);
    this.svg.on("click", (event: MouseEvent) => {
      if (event.defaultPrevented || !this.fitted) return; // drag, not click
      const [sx, sy] = d3.pointer(event, svgEl);
      const [x, y] = this.transform.invert([sx, sy]);
      this.onPick([this.fitted.fromX(x), this.fitted.fromY(y)]);
    });
  }

  private size(): [number, number] {
    const node = this.svg.node()!;
    const rect = node.getBoundingClientRect();
    return [rect.width || 800, rect.height || 600];
  }

  private fit(network: Network): Fitted {
    let minLon = Infinity, maxLon = -Infinity, minLat = Infinity, maxLat = -Infinity;
    for (const f of network.features) {
      for (const [lon, lat] of f.geometry.coordinates) {
        minLon = Math.min(minLon, lon);
        maxLon = Math.max(maxLon, lon);
        minLat = Math.min(minLat, lat);
        maxLat = Math.max(maxLat, lat);
      }
    }
    const midLat = (minLat + maxLat) / 2;
    const k = Math.cos((midLat * Math.PI) / 180);
    const [width, height] = this.size();
    const pad = 24;
    const spanX = Math.max((maxLon - minLon) * k, 1e-9);
    const spanY = Math.max(maxLat - minLat, 1e-9);
    const scale = Math.min((width - 2 * pad) / spanX, (height - 2 * pad) / spanY);
    const offX = pad + ((width - 2 * pad) - spanX * scale) / 2;
    const offY = pad + ((height - 2 * pad) - spanY * scale) / 2;
    return {
      toX: (lon) => offX + (lon - minLon) * k * scale,
      toY: (lat) => offY + (maxLat - lat) * scale,
      fromX: (x) => minLon + (x - offX) / (k * scale),
      fromY: (y) => maxLat - (y - offY) / scale,
    };
  }

  private visibleBbox(): [number, number, number, number] {
    const [width, height] = this.size();
    const f = this.fitted!;
    const [x0, y0] = this.transform.invert([0, 0]);
    const [x1, y1] = this.transform.invert([width, height]);
    const lons = [f.fromX(x0), f.fromX(x1)];
    const lats = [f.fromY(y0), f.fromY(y1)];
    return [
      Math.min(...lons), Math.min(...lats), Math.max(...lons), Math.max(...lats),
    ];
  }

  private pathFor(coords: ReadonlyArray<readonly [number, number]>): string {
    const f = this.fitted!;
    return coords
      .map(([lon, lat], i) => `${i === 0 ? "M" : "L"}${f.toX(lon)},${f.toY(lat)}`)
      .join("");
  }

  setNetwork(network: Network, refit = false): void {
    this.network = network;
    if (!this.fitted || refit) {
      this.fitted = this.fit(network);
    }
    const edges = this.viewport
      .select<SVGGElement>("g.edges")
      .selectAll<SVGPathElement, NetworkEdge>("path")
      .data(network.features, (d) => d.properties.edge_id);
    edges.exit().remove();
    edges
      .enter()
      .append("path")
      .merge(edges as never)
      .attr("d", (d) => this.pathFor(d.geometry.coordinates))
      .attr("class", (d) => `edge edge-${d.properties.kind}`)
      .attr("stroke", (d) => gradeBand(d.properties.grade).color);

    const rampMarks: { key: string; lonlat: LonLat; present: boolean }[] = [];
    for (const f of network.features) {
      if (f.properties.kind !== "crossing") continue;
      const coords = f.geometry.coordinates;
      const first = coords[0]!;
      const last = coords[coords.length - 1]!;
      rampMarks.push({
        key: `${f.properties.edge_id}a`,
        lonlat: [first[0], first[1]],
        present: f.properties.curb_ramp_a,
      });
      rampMarks.push({
        key: `${f.properties.edge_id}b`,
        lonlat: [last[0], last[1]],
        present: f.properties.curb_ramp_b,
      });
    }
    const ramps = this.viewport
      .select<SVGGElement>("g.ramps")
      .selectAll<SVGCircleElement, (typeof rampMarks)[number]>("circle")
      .data(rampMarks, (d) => d.key);
    ramps.exit().remove();
    ramps
      .enter()
      .append("circle")
      .merge(ramps as never)
      .attr("r", 1.6)
      .attr("cx", (d) => this.fitted!.toX(d.lonlat[0]))
      .attr("cy", (d) => this.fitted!.toY(d.lonlat[1]))
      .attr("class", (d) => (d.present ? "ramp ramp-present" : "ramp ramp-missing"));
  }

  setRoutes(current: RouteResponse | null, pinned: RouteResponse | null): void {
    if (!this.fitted) return;
    for (const [cls, route] of [
      ["route-pinned", pinned],
      ["route-current", current],
    ] as const) {
      const group = this.viewport.select<SVGGElement>(`g.${cls}`);
      group.selectAll("path").remove();
      if (route) {
        group
          .append("path")
          .attr("d", this.pathFor(route.geometry))
          .attr("class", cls);
      }
    }
  }

  setMarkers(origin: LonLat | null, destination: LonLat | null): void {
    if (!this.fitted) return;
    const group = this.viewport.select<SVGGElement>("g.markers");
    group.selectAll("*").remove();
    const f = this.fitted;
    const place = (p: LonLat, cls: string, label: string) => {
      group
        .append("circle")
        .attr("cx", f.toX(p[0]))
        .attr("cy", f.toY(p[1]))
        .attr("r", 5)
        .attr("class", `marker ${cls}`);
      group
        .append("text")
        .attr("x", f.toX(p[0]) + 7)
        .attr("y", f.toY(p[1]) + 4)
        .attr("class", "marker-label")
        .text(label);
    };
    if (origin) place(origin, "marker-origin", "A");
    if (destination) place(destination, "marker-dest", "B");
  }
}
