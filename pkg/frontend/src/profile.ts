// Slider-backed profile state. The emitted JSON uses exactly the service's
// cost-profile field names so it round-trips through the server-side parser.

import type { ProfileJson } from "./api";

export interface UiProfileState {
  preset: string; // last applied preset, "custom" once edited
  w_distance: number;
  grade_ideal: number;
  grade_max: number;
  w_grade: number;
  require_curb_ramps: boolean;
  ramp_penalty: number;
  ramp_penalty_hard: boolean;
  avoid_construction: boolean;
  construction_penalty: number;
  construction_penalty_hard: boolean;
  query_date: string | null;
}

export interface SliderSpec {
  field: "w_distance" | "w_grade" | "grade_max" | "ramp_penalty" | "construction_penalty";
  label: string;
  min: number;
  max: number;
  step: number;
}

export const SLIDERS: SliderSpec[] = [
  { field: "w_distance", label: "Distance weight", min: 0, max: 3, step: 0.1 },
  { field: "w_grade", label: "Uphill grade weight", min: 0, max: 5, step: 0.1 },
  { field: "grade_max", label: "Maximum grade", min: 0.03, max: 0.15, step: 0.005 },
  { field: "ramp_penalty", label: "Missing curb ramp penalty", min: 0, max: 1000, step: 25 },
  { field: "construction_penalty", label: "Construction penalty", min: 0, max: 1000, step: 25 },
];

export function defaultState(): UiProfileState {
  return {
    preset: "default",
    w_distance: 1.0,
    grade_ideal: 0.02,
    grade_max: 0.0833,
    w_grade: 1.0,
    require_curb_ramps: false,
    ramp_penalty: 0,
    ramp_penalty_hard: false,
    avoid_construction: true,
    construction_penalty: 500,
    construction_penalty_hard: false,
    query_date: null,
  };
}

export function applyPreset(profile: ProfileJson): UiProfileState {
  return {
    preset: profile.name,
    w_distance: profile.w_distance,
    grade_ideal: profile.grade_ideal,
    grade_max: profile.grade_max,
    w_grade: profile.w_grade,
    require_curb_ramps: profile.require_curb_ramps,
    ramp_penalty: profile.ramp_penalty === "hard" ? 0 : profile.ramp_penalty,
    ramp_penalty_hard: profile.ramp_penalty === "hard",
    avoid_construction: profile.avoid_construction,
    construction_penalty:
      profile.construction_penalty === "hard" ? 0 : profile.construction_penalty,
    construction_penalty_hard: profile.construction_penalty === "hard",
    query_date: profile.query_date,
  };
}

export function toProfileJson(state: UiProfileState): ProfileJson {
  return {
    name: state.preset,
    w_distance: state.w_distance,
    grade_ideal: state.grade_ideal,
    grade_max: state.grade_max,
    w_grade: state.w_grade,
    require_curb_ramps: state.require_curb_ramps,
    ramp_penalty: state.ramp_penalty_hard ? "hard" : state.ramp_penalty,
    avoid_construction: state.avoid_construction,
    construction_penalty: state.construction_penalty_hard
      ? "hard"
      : state.construction_penalty,
    query_date: state.query_date,
  };
}

// One-click relaxations for the constraint classes a no-route error names.
// Each mirrors exactly what the router relaxes when diagnosing.
export const RELAXATIONS: Record<string, { label: string; patch: Partial<UiProfileState> }> = {
  grade: {
    label: "Ignore grade limits",
    patch: { w_grade: 0 },
  },
  curb_ramps: {
    label: "Allow crossings without curb ramps",
    patch: { require_curb_ramps: false, ramp_penalty: 0, ramp_penalty_hard: false },
  },
  construction: {
    label: "Allow routes through construction",
    patch: { avoid_construction: false },
  },
};

export function constraintLabel(constraint: string): string {
  switch (constraint) {
    case "grade":
      return "maximum grade";
    case "curb_ramps":
      return "curb ramps";
    case "construction":
      return "construction";
    default:
      return constraint;
  }
}

export function noRouteMessage(constraints: string[]): string {
  if (constraints.length === 0) {
    return "No route: the points are on disconnected parts of the network.";
  }
  const names = constraints.map(constraintLabel).join(" or ");
  return `No route under the current settings: blocked by ${names}.`;
}
