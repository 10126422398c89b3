import { describe, expect, it } from "vitest";

import { ApiClient, RouteResponseSchema } from "../src/api";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient.route", () => {
  const request = {
    origin: [-122.33, 47.6] as [number, number],
    destination: [-122.32, 47.61] as [number, number],
    profile: "default" as const,
  };

  it("parses a 200 into an ok result", async () => {
    const body = {
      status: "ok",
      geometry: [
        [-122.33, 47.6],
        [-122.32, 47.61],
      ],
      steps: [
        { instruction: "Head north for 10 m", maneuver: "depart", length_m: 10, edge_ids: [1] },
      ],
      total_length_m: 10,
      total_cost: 10,
      max_grade: 0.01,
      elevation_profile: [
        [0, 5],
        [10, 5.1],
      ],
      warnings: [],
    };
    const client = new ApiClient("http://x", async () => jsonResponse(200, body));
    const result = await client.route(request);
    expect(result.kind).toBe("ok");
    if (result.kind === "ok") {
      expect(result.route.total_length_m).toBe(10);
    }
  });

  it("maps 404 to no_route with constraints", async () => {
    const client = new ApiClient("http://x", async () =>
      jsonResponse(404, { error: "no_route", detail: "blocked", constraints: ["grade"] }),
    );
    const result = await client.route(request);
    expect(result).toEqual({ kind: "no_route", detail: "blocked", constraints: ["grade"] });
  });

  it("maps 422 to unroutable with nearest distance", async () => {
    const client = new ApiClient("http://x", async () =>
      jsonResponse(422, { error: "unroutable_waypoint", detail: "far", nearest_m: 150.2 }),
    );
    const result = await client.route(request);
    expect(result).toEqual({ kind: "unroutable", detail: "far", nearestM: 150.2 });
  });

  it("maps 400 to bad_request", async () => {
    const client = new ApiClient("http://x", async () =>
      jsonResponse(400, { error: "bad_request", detail: "unknown preset" }),
    );
    const result = await client.route(request);
    expect(result).toEqual({ kind: "bad_request", detail: "unknown preset" });
  });

  it("maps network failure to unreachable", async () => {
    const client = new ApiClient("http://x", async () => {
      throw new Error("ECONNREFUSED");
    });
    const result = await client.route(request);
    expect(result.kind).toBe("unreachable");
  });

  it("rejects schema-invalid 200 bodies", async () => {
    const client = new ApiClient("http://x", async () =>
      jsonResponse(200, { status: "ok", geometry: [] }),
    );
    await expect(client.route(request)).rejects.toThrow();
  });
});

describe("schemas", () => {
  it("route schema requires nonempty geometry", () => {
    expect(() =>
      RouteResponseSchema.parse({
        status: "ok",
        geometry: [],
        steps: [],
        total_length_m: 0,
        total_cost: 0,
        max_grade: 0,
        elevation_profile: [],
        warnings: [],
      }),
    ).toThrow();
  });
});
