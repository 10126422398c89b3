// Display rounding only; state and API payloads always keep full precision.

export function formatMeters(value: number): string {
  if (value >= 1000) {
    return `${(value / 1000).toFixed(2)} km`;
  }
  return `${Math.round(value)} m`;
}

export function formatGrade(value: number): string {
  return `${(value * 100).toFixed(1)}%`;
}

export function formatCost(value: number): string {
  return value.toFixed(1);
}

export interface GradeBand {
  max: number; // exclusive upper bound on grade
  color: string;
  label: string;
}

// Legend and edge styling share this table; tests assert they agree.
export const GRADE_BANDS: GradeBand[] = [
  { max: 0.02, color: "#2e8b57", label: "under 2%" },
  { max: 0.05, color: "#d8a516", label: "2% to 5%" },
  { max: 0.0833, color: "#e06f10", label: "5% to 8.33%" },
  { max: Infinity, color: "#c03030", label: "over 8.33%" },
];

export function gradeBand(grade: number): GradeBand {
  for (const band of GRADE_BANDS) {
    if (grade < band.max) {
      return band;
    }
  }
  return GRADE_BANDS[GRADE_BANDS.length - 1]!;
}
