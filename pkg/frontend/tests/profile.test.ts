import { describe, expect, it } from "vitest";

import { ProfileJsonSchema } from "../src/api";
import { GRADE_BANDS, formatGrade, formatMeters, gradeBand } from "../src/format";
import {
  RELAXATIONS,
  SLIDERS,
  applyPreset,
  defaultState,
  noRouteMessage,
  toProfileJson,
} from "../src/profile";

describe("profile serialization", () => {
  it("emits exactly the service's field names", () => {
    const doc = toProfileJson(defaultState());
    expect(Object.keys(doc).sort()).toEqual([
      "avoid_construction",
      "construction_penalty",
      "grade_ideal",
      "grade_max",
      "name",
      "query_date",
      "ramp_penalty",
      "require_curb_ramps",
      "w_distance",
      "w_grade",
    ]);
    expect(ProfileJsonSchema.parse(doc)).toEqual(doc);
  });

  it("hard penalties serialize as the string sentinel", () => {
    const state = { ...defaultState(), ramp_penalty_hard: true };
    expect(toProfileJson(state).ramp_penalty).toBe("hard");
  });

  it("preset application round-trips", () => {
    const preset = {
      name: "powered_wheelchair",
      w_distance: 1,
      grade_ideal: 0.01,
      grade_max: 0.05,
      w_grade: 1,
      require_curb_ramps: true,
      ramp_penalty: 500,
      avoid_construction: true,
      construction_penalty: "hard" as const,
      query_date: null,
    };
    const state = applyPreset(preset);
    expect(toProfileJson(state)).toEqual(preset);
  });

  it("sliders only touch numeric profile fields", () => {
    const state = defaultState();
    for (const spec of SLIDERS) {
      expect(typeof state[spec.field]).toBe("number");
      expect(spec.min).toBeLessThan(spec.max);
    }
  });
});

describe("no-route messaging", () => {
  it("names each constraint class", () => {
    expect(noRouteMessage(["curb_ramps"])).toContain("curb ramps");
    expect(noRouteMessage(["grade"])).toContain("grade");
    expect(noRouteMessage(["construction"])).toContain("construction");
    expect(noRouteMessage([])).toContain("disconnected");
  });

  it("every relaxation patch flips the matching constraint off", () => {
    expect(RELAXATIONS.grade!.patch.w_grade).toBe(0);
    expect(RELAXATIONS.curb_ramps!.patch.require_curb_ramps).toBe(false);
    expect(RELAXATIONS.construction!.patch.avoid_construction).toBe(false);
  });
});

describe("display formatting", () => {
  it("rounds for display only", () => {
    expect(formatMeters(123.456)).toBe("123 m");
    expect(formatMeters(1234.5)).toBe("1.23 km");
    expect(formatGrade(0.0525)).toBe("5.3%");
  });

  it("grade bands cover all grades and match the legend table", () => {
    expect(gradeBand(0.0).label).toBe(GRADE_BANDS[0]!.label);
    expect(gradeBand(0.03).label).toBe(GRADE_BANDS[1]!.label);
    expect(gradeBand(0.06).label).toBe(GRADE_BANDS[2]!.label);
    expect(gradeBand(0.2).label).toBe(GRADE_BANDS[3]!.label);
    // bands are sorted and exhaustive
    let prev = 0;
    for (const band of GRADE_BANDS) {
      expect(band.max).toBeGreaterThan(prev);
      prev = band.max;
    }
    expect(GRADE_BANDS[GRADE_BANDS.length - 1]!.max).toBe(Infinity);
  });
});
