// Route query orchestration: debounced re-query on any input change, stale
// responses dropped by sequence number, optional pinned route for comparison.

import type { ApiClient, RouteResponse, RouteResult } from "./api";
import {
  RELAXATIONS,
  type UiProfileState,
  noRouteMessage,
  toProfileJson,
} from "./profile";

export interface RouteOverlay {
  route: RouteResponse;
  profileName: string;
  issuedAt: number; // sequence number of the query that produced it
}

export interface Banner {
  kind: "no_route" | "unroutable" | "unreachable" | "bad_request";
  message: string;
  relaxKeys: string[]; // no-route only: one-click relaxation ids
}

export interface ControllerEvents {
  onChange: () => void;
}

export const DEBOUNCE_MS = 250;

export class RouteController {
  origin: [number, number] | null = null;
  destination: [number, number] | null = null;
  profile: UiProfileState;
  current: RouteOverlay | null = null;
  pinned: RouteOverlay | null = null;
  banner: Banner | null = null;
  inFlight = false;

  private seq = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly api: ApiClient,
    initialProfile: UiProfileState,
    private readonly events: ControllerEvents,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {
    this.profile = initialProfile;
  }

  /** Map clicks alternate: origin, destination, then start over. */
  pick(point: [number, number]): void {
    if (this.origin === null || (this.origin !== null && this.destination !== null)) {
      this.origin = point;
      this.destination = null;
      this.current = null;
      this.banner = null;
    } else {
      this.destination = point;
    }
    this.events.onChange();
    this.scheduleQuery();
  }

  updateProfile(patch: Partial<UiProfileState>, markCustom = true): void {
    this.profile = { ...this.profile, ...patch };
    if (markCustom) {
      this.profile.preset = "custom";
    }
    this.events.onChange();
    this.scheduleQuery();
  }

  setProfile(state: UiProfileState): void {
    this.profile = state;
    this.events.onChange();
    this.scheduleQuery();
  }

  applyRelaxation(key: string): void {
    const relax = RELAXATIONS[key];
    if (relax) {
      this.updateProfile(relax.patch);
    }
  }

  pinCurrent(): void {
    if (this.current) {
      this.pinned = this.current;
      this.events.onChange();
    }
  }

  clearPin(): void {
    this.pinned = null;
    this.events.onChange();
  }

  get ready(): boolean {
    return this.origin !== null && this.destination !== null;
  }

  /** Collapse rapid input changes into one request per quiet period. */
  private scheduleQuery(): void {
    if (!this.ready) return;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.issue();
    }, this.debounceMs);
  }

  async issue(): Promise<void> {
    if (!this.ready) return;
    if (this.timer !== null) {
      clearTimeout(this.timer); // an explicit query supersedes the scheduled one
      this.timer = null;
    }
    const mySeq = ++this.seq;
    this.inFlight = true;
    this.events.onChange();
    const result = await this.api.route({
      origin: this.origin as [number, number],
      destination: this.destination as [number, number],
      profile: toProfileJson(this.profile),
      ...(this.profile.query_date ? { query_date: this.profile.query_date } : {}),
    });
    if (mySeq !== this.seq) {
      return; // a newer request superseded this one
    }
    this.inFlight = false;
    this.apply(result, mySeq);
    this.events.onChange();
  }

  private apply(result: RouteResult, seq: number): void {
    switch (result.kind) {
      case "ok":
        this.current = {
          route: result.route,
          profileName: this.profile.preset,
          issuedAt: seq,
        };
        this.banner = null;
        return;
      case "no_route":
        this.current = null;
        this.banner = {
          kind: "no_route",
          message: noRouteMessage(result.constraints),
          relaxKeys: result.constraints.filter((c) => c in RELAXATIONS),
        };
        return;
      case "unroutable": {
        const hint =
          result.nearestM !== null
            ? ` Nearest network point is ${Math.round(result.nearestM)} m away.`
            : "";
        this.current = null;
        this.banner = {
          kind: "unroutable",
          message: `That point is too far from the network; pick closer to a sidewalk.${hint}`,
          relaxKeys: [],
        };
        return;
      }
      case "unreachable":
        this.banner = {
          kind: "unreachable",
          message: "Routing service unreachable. Is the server running?",
          relaxKeys: [],
        };
        return;
      case "bad_request":
        this.banner = { kind: "bad_request", message: result.detail, relaxKeys: [] };
        return;
    }
  }
}
