import { ApiClient, type Network, type ProfileJson } from "./api";
import { DEBOUNCE_MS, RouteController } from "./controller";
import { GRADE_BANDS, formatCost, formatGrade, formatMeters } from "./format";
import { MapView } from "./mapview";
import {
  SLIDERS,
  applyPreset,
  defaultState,
  toProfileJson,
  type UiProfileState,
} from "./profile";
import {
  edgeIndex,
  renderBadges,
  renderElevation,
  renderSteps,
  renderWarnings,
} from "./panels";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "http://127.0.0.1:8000";
const api = new ApiClient(apiBase);

const el = <T extends HTMLElement>(id: string): T => {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
};

let network: Network | null = null;
let edges = new Map<number, { kind: string; curbRampA: boolean; curbRampB: boolean }>();
let presets: ProfileJson[] = [];

const controller = new RouteController(api, defaultState(), { onChange: render }, DEBOUNCE_MS);
const map = new MapView(
  el<HTMLElement>("map") as unknown as SVGSVGElement,
  (p) => controller.pick(p),
  (bbox) => void refreshNetwork(bbox),
);

function render(): void {
  el("status-line").textContent = controller.inFlight
    ? "routing…"
    : controller.ready
      ? ""
      : "Click the map to set origin (A), then destination (B).";

  const banner = el("banner");
  banner.innerHTML = "";
  banner.hidden = controller.banner === null;
  if (controller.banner) {
    banner.className = `banner banner-${controller.banner.kind}`;
    const text = document.createElement("span");
    text.textContent = controller.banner.message;
    banner.appendChild(text);
    for (const key of controller.banner.relaxKeys) {
      const button = document.createElement("button");
      button.textContent = relaxLabel(key);
      button.onclick = () => controller.applyRelaxation(key);
      banner.appendChild(button);
    }
    if (controller.banner.kind === "unreachable") {
      const retry = document.createElement("button");
      retry.textContent = "Retry";
      retry.onclick = () => void boot();
      banner.appendChild(retry);
    }
  }

  map.setMarkers(controller.origin, controller.destination);
  map.setRoutes(controller.current?.route ?? null, controller.pinned?.route ?? null);

  const summary = el("route-summary");
  if (controller.current) {
    summary.hidden = false;
    renderBadges(el("badges"), controller.current.route, edges);
    renderSteps(el("steps"), controller.current.route);
    renderWarnings(el("warnings"), controller.current.route.warnings);
    el("total-cost").textContent = `cost ${formatCost(controller.current.route.total_cost)}`;
  } else {
    summary.hidden = true;
  }
  renderElevation(
    el("elevation") as unknown as SVGSVGElement,
    controller.current?.route ?? null,
    controller.pinned?.route ?? null,
  );

  const compare = el("compare-line");
  if (controller.pinned) {
    const p = controller.pinned;
    compare.textContent =
      `Pinned (${p.profileName}): ${formatMeters(p.route.total_length_m)}, ` +
      `max grade ${formatGrade(p.route.max_grade)}`;
  } else {
    compare.textContent = "";
  }

  syncProfileInputs(controller.profile);
}

function relaxLabel(key: string): string {
  switch (key) {
    case "grade":
      return "Relax: ignore grade limits";
    case "curb_ramps":
      return "Relax: allow missing curb ramps";
    case "construction":
      return "Relax: allow construction";
    default:
      return `Relax ${key}`;
  }
}

function syncProfileInputs(state: UiProfileState): void {
  for (const spec of SLIDERS) {
    const input = el<HTMLInputElement>(`slider-${spec.field}`);
    if (document.activeElement !== input) {
      input.value = String(state[spec.field]);
    }
    el(`value-${spec.field}`).textContent = String(state[spec.field]);
  }
  el<HTMLInputElement>("toggle-ramps").checked = state.require_curb_ramps;
  el<HTMLInputElement>("toggle-ramps-hard").checked = state.ramp_penalty_hard;
  el<HTMLInputElement>("toggle-construction").checked = state.avoid_construction;
  el<HTMLSelectElement>("preset").value =
    presets.some((p) => p.name === state.preset) ? state.preset : "custom";
  el("profile-json").textContent = JSON.stringify(toProfileJson(state), null, 1);
}

function buildControls(): void {
  const slidersEl = el("sliders");
  for (const spec of SLIDERS) {
    const row = document.createElement("label");
    row.className = "slider-row";
    row.innerHTML =
      `<span>${spec.label}</span>` +
      `<input type="range" id="slider-${spec.field}" min="${spec.min}" ` +
      `max="${spec.max}" step="${spec.step}">` +
      `<output id="value-${spec.field}"></output>`;
    slidersEl.appendChild(row);
    const input = row.querySelector("input")!;
    input.addEventListener("input", () => {
      controller.updateProfile({ [spec.field]: Number(input.value) });
    });
  }
  el<HTMLInputElement>("toggle-ramps").addEventListener("change", (event) => {
    controller.updateProfile({
      require_curb_ramps: (event.target as HTMLInputElement).checked,
    });
  });
  el<HTMLInputElement>("toggle-ramps-hard").addEventListener("change", (event) => {
    controller.updateProfile({
      ramp_penalty_hard: (event.target as HTMLInputElement).checked,
    });
  });
  el<HTMLInputElement>("toggle-construction").addEventListener("change", (event) => {
    controller.updateProfile({
      avoid_construction: (event.target as HTMLInputElement).checked,
    });
  });
  el<HTMLInputElement>("trip-date").addEventListener("change", (event) => {
    const value = (event.target as HTMLInputElement).value;
    controller.updateProfile({ query_date: value || null }, false);
  });
  el<HTMLSelectElement>("preset").addEventListener("change", (event) => {
    const name = (event.target as HTMLSelectElement).value;
    const preset = presets.find((p) => p.name === name);
    if (preset) {
      controller.setProfile(applyPreset(preset));
    }
  });
  el<HTMLButtonElement>("pin").addEventListener("click", () => controller.pinCurrent());
  el<HTMLButtonElement>("unpin").addEventListener("click", () => controller.clearPin());

  const legend = el("legend");
  for (const band of GRADE_BANDS) {
    const item = document.createElement("span");
    item.className = "legend-item";
    item.innerHTML = `<i style="background:${band.color}"></i>${band.label}`;
    legend.appendChild(item);
  }
}

async function refreshNetwork(bbox: [number, number, number, number]): Promise<void> {
  const fetched = await api.network(bbox);
  if (fetched && fetched.features.length > 0) {
    network = fetched;
    edges = edgeIndex(network);
    map.setNetwork(network);
    render();
  }
}

async function boot(): Promise<void> {
  const health = await api.health();
  if (!health) {
    el("banner").hidden = false;
    el("banner").className = "banner banner-unreachable";
    el("banner").innerHTML = "";
    const text = document.createElement("span");
    text.textContent = `Cannot reach the routing service at ${apiBase}.`;
    const retry = document.createElement("button");
    retry.textContent = "Retry";
    retry.onclick = () => void boot();
    el("banner").append(text, retry);
    return;
  }
  el("health-line").textContent =
    `${apiBase} — ${health.nodes} nodes / ${health.edges} edges`;
  try {
    presets = await api.profiles();
    const select = el<HTMLSelectElement>("preset");
    select.innerHTML = "";
    for (const preset of presets) {
      const option = document.createElement("option");
      option.value = preset.name;
      option.textContent = preset.name;
      select.appendChild(option);
    }
    const custom = document.createElement("option");
    custom.value = "custom";
    custom.textContent = "custom";
    select.appendChild(custom);
    const initial = presets.find((p) => p.name === "default");
    if (initial) {
      controller.profile = applyPreset(initial);
    }
  } catch {
    presets = [];
  }
  const all = await api.network([-180, -90, 180, 90]);
  if (all) {
    network = all;
    edges = edgeIndex(network);
    map.setNetwork(all, true);
  }
  render();
}

buildControls();
void boot();
