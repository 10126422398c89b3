// Live integration against the real routing service: generates a synthetic
// city (no curb ramps), builds its graph, serves it, then exercises the same
// client/controller stack the UI uses. Skipped when the backend CLI is not
// importable in this environment.

import { spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { RouteController } from "../src/controller";
import { defaultState } from "../src/profile";
import { crossingsLackingRamps, edgeIndex } from "../src/panels";

const PYTHON = process.env.PEDGRAPH_PYTHON ?? "python3";

function backendAvailable(): boolean {
  const probe = spawnSync(PYTHON, ["-c", "import pedgraph"], { timeout: 30_000 });
  return probe.status === 0;
}

const available = backendAvailable();

describe.skipIf(!available)("live service", () => {
  let workDir: string;
  let server: ReturnType<typeof spawn> | null = null;
  let base: string;
  let client: ApiClient;
  let cornerA: [number, number];
  let cornerB: [number, number];

  function runCli(args: string[]): void {
    const proc = spawnSync(PYTHON, ["-m", "pedgraph.cli", ...args], {
      timeout: 120_000,
      encoding: "utf-8",
    });
    if (proc.status !== 0) {
      throw new Error(`pedgraph ${args[0]} failed: ${proc.stderr}`);
    }
  }

  beforeAll(async () => {
    workDir = mkdtempSync(join(tmpdir(), "pedgraph-ui-"));
    const cityDir = join(workDir, "city");
    const graphPath = join(workDir, "graph.json");
    // ramp-free city so a hard curb-ramp requirement cuts every crossing
    runCli([
      "synth", "--out", cityDir, "--blocks-x", "3", "--blocks-y", "3",
      "--ramp-probability", "0", "--elevation-model", "plane", "--seed", "6",
    ]);
    runCli([
      "build",
      "--sidewalks", join(cityDir, "sidewalks.geojson"),
      "--streets", join(cityDir, "streets.geojson"),
      "--curbramps", join(cityDir, "curbramps.geojson"),
      "--elevation", join(cityDir, "elevation.asc"),
      "--config", join(cityDir, "config.json"),
      "--out", graphPath,
    ]);
    const graph = JSON.parse(readFileSync(graphPath, "utf-8"));
    const nodes = graph.nodes as { lon: number; lat: number }[];
    cornerA = [nodes[0]!.lon, nodes[0]!.lat];
    cornerB = [nodes[nodes.length - 1]!.lon, nodes[nodes.length - 1]!.lat];

    const port = 18000 + Math.floor(Math.random() * 10_000);
    base = `http://127.0.0.1:${port}`;
    server = spawn(PYTHON, [
      "-m", "pedgraph.cli", "serve", "--graph", graphPath, "--port", String(port),
    ]);
    client = new ApiClient(base);
    const deadline = Date.now() + 30_000;
    while (Date.now() < deadline) {
      if ((await client.health()) !== null) return;
      await new Promise((resolve) => setTimeout(resolve, 200));
    }
    throw new Error("service did not come up");
  });

  afterAll(() => {
    server?.kill();
    if (workDir) rmSync(workDir, { recursive: true, force: true });
  });

  it("serves the network layer for the whole extent", async () => {
    const network = await client.network([-180, -90, 180, 90]);
    expect(network).not.toBeNull();
    expect(network!.features.length).toBeGreaterThan(50);
    const kinds = new Set(network!.features.map((f) => f.properties.kind));
    expect(kinds.has("crossing")).toBe(true);
    expect(kinds.has("sidewalk")).toBe(true);
  });

  it("picking two corners renders a route", async () => {
    const controller = new RouteController(client, defaultState(), { onChange: () => {} }, 0);
    controller.pick(cornerA);
    controller.pick(cornerB);
    await controller.issue();
    expect(controller.banner).toBeNull();
    expect(controller.current).not.toBeNull();
    const route = controller.current!.route;
    expect(route.geometry.length).toBeGreaterThan(1);
    expect(route.steps[0]!.maneuver).toBe("depart");
    expect(route.steps[route.steps.length - 1]!.maneuver).toBe("arrive");
    expect(route.total_length_m).toBeGreaterThan(0);

    // overlay badge data comes from the network layer, not local computation
    const network = await client.network([-180, -90, 180, 90]);
    const edges = edgeIndex(network!);
    const lacking = crossingsLackingRamps(route, edges);
    const crossingsOnRoute = route.steps
      .flatMap((s) => s.edge_ids)
      .filter((id) => edges.get(id)?.kind === "crossing").length;
    expect(crossingsOnRoute).toBeGreaterThan(0);
    expect(lacking).toBe(crossingsOnRoute); // ramp-free city: every crossing lacks ramps
  });

  it("hard curb-ramp requirement yields the no-route banner naming curb ramps", async () => {
    const controller = new RouteController(client, defaultState(), { onChange: () => {} }, 0);
    controller.pick(cornerA);
    controller.pick(cornerB);
    controller.updateProfile({ require_curb_ramps: true, ramp_penalty_hard: true });
    await controller.issue();
    expect(controller.current).toBeNull();
    expect(controller.banner?.kind).toBe("no_route");
    expect(controller.banner?.message).toContain("curb ramps");
    expect(controller.banner?.relaxKeys).toContain("curb_ramps");

    // one-click relaxation restores the route
    controller.applyRelaxation("curb_ramps");
    await controller.issue();
    expect(controller.banner).toBeNull();
    expect(controller.current).not.toBeNull();
  });

  it("profile JSON round-trips through the service parser", async () => {
    const presets = await client.profiles();
    expect(presets.map((p) => p.name)).toEqual([
      "default", "powered_wheelchair", "manual_assist",
    ]);
    // posting an exact preset document back is accepted
    const result = await client.route({
      origin: cornerA,
      destination: cornerB,
      profile: presets[0]!,
    });
    expect(result.kind).toBe("ok");
  });

  it("unroutable pick returns the distance prompt", async () => {
    const controller = new RouteController(client, defaultState(), { onChange: () => {} }, 0);
    controller.pick([cornerA[0] + 0.01, cornerA[1]]);
    controller.pick(cornerB);
    await controller.issue();
    expect(controller.banner?.kind).toBe("unroutable");
    expect(controller.banner?.message).toMatch(/\d+ m away/);
  });
});

describe.skipIf(available)("live service (environment without backend)", () => {
  it("skipped: backend not importable", () => {
    expect(available).toBe(false);
  });
});
