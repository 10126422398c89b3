// Typed client for the routing service. The UI never computes routes or
// geometry itself; everything rendered comes from these responses.

import { z } from "zod";

export const StepSchema = z.object({
  instruction: z.string(),
  maneuver: z.enum([
    "depart",
    "continue",
    "turn_left",
    "turn_right",
    "cross_street",
    "arrive",
  ]),
  length_m: z.number(),
  edge_ids: z.array(z.number()),
});

export const RouteResponseSchema = z.object({
  status: z.literal("ok"),
  geometry: z.array(z.tuple([z.number(), z.number()])).min(1),
  steps: z.array(StepSchema),
  total_length_m: z.number(),
  total_cost: z.number(),
  max_grade: z.number(),
  elevation_profile: z.array(z.tuple([z.number(), z.number()])),
  warnings: z.array(z.string()),
});
export type RouteResponse = z.infer<typeof RouteResponseSchema>;
export type Step = z.infer<typeof StepSchema>;

export const EdgePropertiesSchema = z.object({
  edge_id: z.number(),
  kind: z.enum(["sidewalk", "t_connector", "corner_connector", "crossing"]),
  length_m: z.number(),
  elev_delta_m: z.number(),
  grade: z.number(),
  curb_ramp_a: z.boolean(),
  curb_ramp_b: z.boolean(),
  crossed_street: z.string().nullable(),
  construction: z.array(z.object({ start: z.string(), end: z.string() })),
});

export const NetworkSchema = z.object({
  type: z.literal("FeatureCollection"),
  features: z.array(
    z.object({
      geometry: z.object({
        type: z.literal("LineString"),
        coordinates: z.array(z.tuple([z.number(), z.number()])),
      }),
      properties: EdgePropertiesSchema,
    }),
  ),
});
export type Network = z.infer<typeof NetworkSchema>;
export type NetworkEdge = Network["features"][number];

export const HealthSchema = z.object({
  status: z.string(),
  nodes: z.number(),
  edges: z.number(),
});
export type Health = z.infer<typeof HealthSchema>;

export const ProfileJsonSchema = z.object({
  name: z.string(),
  w_distance: z.number(),
  grade_ideal: z.number(),
  grade_max: z.number(),
  w_grade: z.number(),
  require_curb_ramps: z.boolean(),
  ramp_penalty: z.union([z.number(), z.literal("hard")]),
  avoid_construction: z.boolean(),
  construction_penalty: z.union([z.number(), z.literal("hard")]),
  query_date: z.string().nullable(),
});
export type ProfileJson = z.infer<typeof ProfileJsonSchema>;

export interface RouteRequest {
  origin: [number, number];
  destination: [number, number];
  profile: string | ProfileJson;
  query_date?: string;
}

export type RouteResult =
  | { kind: "ok"; route: RouteResponse }
  | { kind: "no_route"; detail: string; constraints: string[] }
  | { kind: "unroutable"; detail: string; nearestM: number | null }
  | { kind: "bad_request"; detail: string }
  | { kind: "unreachable"; detail: string };

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async health(): Promise<Health | null> {
    try {
      const resp = await this.fetchFn(`${this.baseUrl}/health`);
      if (!resp.ok) return null;
      return HealthSchema.parse(await resp.json());
    } catch {
      return null;
    }
  }

  async profiles(): Promise<ProfileJson[]> {
    const resp = await this.fetchFn(`${this.baseUrl}/profiles`);
    if (!resp.ok) throw new Error(`profiles failed: ${resp.status}`);
    return z.array(ProfileJsonSchema).parse(await resp.json());
  }

  async network(bbox: [number, number, number, number]): Promise<Network | null> {
    try {
      const resp = await this.fetchFn(
        `${this.baseUrl}/network?bbox=${bbox.join(",")}`,
      );
      if (!resp.ok) return null;
      return NetworkSchema.parse(await resp.json());
    } catch {
      return null;
    }
  }

  async route(req: RouteRequest): Promise<RouteResult> {
    let resp: Response;
    try {
      resp = await this.fetchFn(`${this.baseUrl}/route`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(req),
      });
    } catch (err) {
      return { kind: "unreachable", detail: String(err) };
    }
    if (resp.status === 200) {
      return { kind: "ok", route: RouteResponseSchema.parse(await resp.json()) };
    }
    const body = await resp.json().catch(() => ({}));
    const detail =
      typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail ?? body);
    if (resp.status === 404) {
      return {
        kind: "no_route",
        detail,
        constraints: Array.isArray(body.constraints) ? body.constraints : [],
      };
    }
    if (resp.status === 422) {
      return {
        kind: "unroutable",
        detail,
        nearestM: typeof body.nearest_m === "number" ? body.nearest_m : null,
      };
    }
    return { kind: "bad_request", detail };
  }
}
