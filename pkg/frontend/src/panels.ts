// Step list, summary badges, and the elevation profile chart.

import type { Network, RouteResponse, Step } from "./api";
import { formatGrade, formatMeters } from "./format";

const MANEUVER_GLYPH: Record<Step["maneuver"], string> = {
  depart: "▸",
  continue: "↑",
  turn_left: "←",
  turn_right: "→",
  cross_street: "⇄",
  arrive: "●",
};

export interface EdgeInfo {
  kind: string;
  curbRampA: boolean;
  curbRampB: boolean;
}

export function edgeIndex(network: Network): Map<number, EdgeInfo> {
  const map = new Map<number, EdgeInfo>();
  for (const f of network.features) {
    map.set(f.properties.edge_id, {
      kind: f.properties.kind,
      curbRampA: f.properties.curb_ramp_a,
      curbRampB: f.properties.curb_ramp_b,
    });
  }
  return map;
}

/** Crossings on the route lacking a ramp at either end, from network data. */
export function crossingsLackingRamps(
  route: RouteResponse,
  edges: Map<number, EdgeInfo>,
): number {
  let count = 0;
  for (const step of route.steps) {
    for (const edgeId of step.edge_ids) {
      const info = edges.get(edgeId);
      if (info && info.kind === "crossing" && !(info.curbRampA && info.curbRampB)) {
        count += 1;
      }
    }
  }
  return count;
}

export function renderBadges(
  el: HTMLElement,
  route: RouteResponse,
  edges: Map<number, EdgeInfo>,
): void {
  const lacking = crossingsLackingRamps(route, edges);
  el.innerHTML = "";
  const badges: [string, string][] = [
    ["Length", formatMeters(route.total_length_m)],
    ["Max grade", formatGrade(route.max_grade)],
    ["Crossings w/o ramps", String(lacking)],
  ];
  for (const [label, value] of badges) {
    const badge = document.createElement("span");
    badge.className = "badge";
    badge.innerHTML = `<small>${label}</small><b>${value}</b>`;
    el.appendChild(badge);
  }
}

export function renderSteps(el: HTMLElement, route: RouteResponse): void {
  el.innerHTML = "";
  for (const step of route.steps) {
    const li = document.createElement("li");
    li.className = `step step-${step.maneuver}`;
    const glyph = MANEUVER_GLYPH[step.maneuver];
    li.innerHTML = `<span class="glyph">${glyph}</span>${step.instruction}`;
    el.appendChild(li);
  }
}

export function renderWarnings(el: HTMLElement, warnings: string[]): void {
  el.innerHTML = "";
  for (const text of warnings) {
    const li = document.createElement("li");
    li.textContent = text;
    el.appendChild(li);
  }
}

/** Elevation profile as a small inline SVG; pinned route drawn for contrast. */
export function renderElevation(
  svg: SVGSVGElement,
  current: RouteResponse | null,
  pinned: RouteResponse | null,
): void {
  svg.innerHTML = "";
  const routes = [
    { route: pinned, cls: "elev-pinned" },
    { route: current, cls: "elev-current" },
  ].filter((r) => r.route && r.route.elevation_profile.length > 1) as {
    route: RouteResponse;
    cls: string;
  }[];
  if (routes.length === 0) return;

  const width = svg.clientWidth || 320;
  const height = svg.clientHeight || 90;
  const pad = 6;
  let maxDist = 0;
  let minZ = Infinity;
  let maxZ = -Infinity;
  for (const { route } of routes) {
    for (const [d, z] of route.elevation_profile) {
      maxDist = Math.max(maxDist, d);
      minZ = Math.min(minZ, z);
      maxZ = Math.max(maxZ, z);
    }
  }
  if (maxZ - minZ < 0.5) {
    maxZ = minZ + 0.5; // keep a flat city from collapsing to a line on the edge
  }
  const toX = (d: number) => pad + (d / Math.max(maxDist, 1e-9)) * (width - 2 * pad);
  const toY = (z: number) => height - pad - ((z - minZ) / (maxZ - minZ)) * (height - 2 * pad);

  for (const { route, cls } of routes) {
    const d = route.elevation_profile
      .map(([dist, z], i) => `${i === 0 ? "M" : "L"}${toX(dist)},${toY(z)}`)
      .join("");
    const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
    path.setAttribute("d", d);
    path.setAttribute("class", `elev ${cls}`);
    svg.appendChild(path);
  }
  const label = document.createElementNS("http://www.w3.org/2000/svg", "text");
  label.setAttribute("x", String(pad));
  label.setAttribute("y", "12");
  label.setAttribute("class", "elev-label");
  label.textContent = `${minZ.toFixed(1)}–${maxZ.toFixed(1)} m elevation`;
  svg.appendChild(label);
}
