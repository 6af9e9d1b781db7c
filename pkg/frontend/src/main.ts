// DOM glue: binds the config form to StudioState, debounces re-analysis on
// edits (250 ms), and keeps the three views rendered from cached payloads.
// The design sweep and the simulation stay behind explicit buttons.

import { AbortedRequest, ApiClient, ApiError, debounce } from "./api.js";
import { StudioState, emptyStageDraft } from "./state.js";
import type { AnalyzePayload, DesignPayload, ProjectConfig, SimulatePayload, StageConfig, StageKind } from "./types.js";
import { validateStage, stageIsValid } from "./validate.js";
import { buildBodeView, renderBode } from "./views/bode.js";
import { buildDesignView, renderDesign } from "./views/design.js";
import { buildIsoView, renderIsodamping } from "./views/isodamping.js";

const api = new ApiClient("");
const state = new StudioState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function parseNumberList(text: string): number[] {
  return text
    .split(",")
    .map((t) => t.trim())
    .filter((t) => t.length > 0)
    .map(Number);
}

function renderAll(): void {
  const bodeHost = el<HTMLDivElement>("view-bode");
  if (state.lastAnalyze) {
    bodeHost.innerHTML = renderBode(
      buildBodeView(state.lastAnalyze.payload, state.isStale(state.lastAnalyze)));
  }
  const designHost = el<HTMLDivElement>("view-design");
  if (state.lastDesign) {
    designHost.innerHTML = renderDesign(
      buildDesignView(state.lastDesign.payload, state.isStale(state.lastDesign)));
  }
  const isoHost = el<HTMLDivElement>("view-isodamping");
  if (state.lastSimulate) {
    isoHost.innerHTML = renderIsodamping(
      buildIsoView(state.lastSimulate.payload, state.isStale(state.lastSimulate)));
  }
}

function setStatus(text: string, isError = false): void {
  const node = el<HTMLDivElement>("status");
  node.textContent = text;
  node.className = isError ? "status error" : "status";
}

async function runAnalyze(): Promise<void> {
  const key = state.configKey();
  setStatus("analyzing…");
  try {
    const { payload } = await api.post<AnalyzePayload>("/analyze", state.config);
    state.storeAnalyze(payload, key);
    setStatus("");
  } catch (err) {
    if (err instanceof AbortedRequest) {
      return;
    }
    setStatus(describeError(err), true);
  }
  renderAll();
}

const debouncedAnalyze = debounce(() => {
  void runAnalyze();
}, 250);

async function runDesign(): Promise<void> {
  const key = state.configKey();
  setStatus("running design…");
  try {
    const { payload } = await api.post<DesignPayload>("/design", state.config);
    state.storeDesign(payload, key);
    setStatus("");
  } catch (err) {
    if (!(err instanceof AbortedRequest)) {
      setStatus(describeError(err), true);
    }
  }
  renderAll();
}

async function runSimulate(): Promise<void> {
  const key = state.configKey();
  setStatus("simulating…");
  try {
    const { payload, status } = await api.post<SimulatePayload>("/simulate", state.config);
    state.storeSimulate(payload, key);
    setStatus(status === 207 ? "partial results: some gains diverged" : "");
  } catch (err) {
    if (!(err instanceof AbortedRequest)) {
      setStatus(describeError(err), true);
    }
  }
  renderAll();
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    const body = err.body as { path?: string; message?: string } | null;
    if (body && body.message) {
      return body.path ? `${body.path}: ${body.message}` : body.message;
    }
    return `request failed (${err.status})`;
  }
  return String(err);
}

function onConfigEdited(): void {
  renderAll(); // stale banners appear immediately
  debouncedAnalyze();
}

function bindNumberInput(id: string, get: () => number, set: (v: number) => void): void {
  const input = el<HTMLInputElement>(id);
  input.value = String(get());
  input.addEventListener("input", () => {
    const v = Number(input.value);
    if (Number.isFinite(v)) {
      set(v);
      input.classList.remove("invalid");
      onConfigEdited();
    } else {
      input.classList.add("invalid");
    }
  });
}

function bindListInput(id: string, get: () => number[], set: (v: number[]) => void): void {
  const input = el<HTMLInputElement>(id);
  input.value = get().join(", ");
  input.addEventListener("input", () => {
    const values = parseNumberList(input.value);
    if (values.length && values.every((v) => Number.isFinite(v))) {
      set(values);
      input.classList.remove("invalid");
      onConfigEdited();
    } else {
      input.classList.add("invalid");
    }
  });
}

function refreshStageList(): void {
  const host = el<HTMLUListElement>("stage-list");
  host.innerHTML = "";
  state.config.stages.forEach((stage, index) => {
    const item = document.createElement("li");
    const desc = document.createElement("span");
    desc.textContent = `${stage.kind} q=${stage.q ?? "·"} alpha=${stage.alpha ?? "·"} a=${stage.a} K=${stage.gain_k}`;
    const remove = document.createElement("button");
    remove.textContent = "remove";
    remove.addEventListener("click", () => {
      state.config.stages.splice(index, 1);
      refreshStageList();
      onConfigEdited();
    });
    item.append(desc, remove);
    host.append(item);
  });
}

function refreshDraftErrors(): void {
  const errors = validateStage(state.stageDraft);
  for (const field of ["kind", "q", "alpha", "a", "gain_k"] as const) {
    const hint = el<HTMLSpanElement>(`draft-${field}-error`);
    hint.textContent = errors[field] ?? "";
  }
  el<HTMLButtonElement>("add-stage").disabled = !stageIsValid(state.stageDraft);
}

function bindDraft(): void {
  const kind = el<HTMLSelectElement>("draft-kind");
  kind.addEventListener("change", () => {
    state.stageDraft.kind = kind.value as StageKind;
    refreshDraftErrors();
  });
  const qSlider = el<HTMLInputElement>("draft-q");
  const qNumber = el<HTMLInputElement>("draft-q-value");
  const syncQ = (raw: string) => {
    const v = Number(raw);
    state.stageDraft.q = raw.trim() === "" || Number.isNaN(v) ? undefined : v;
    qSlider.value = String(state.stageDraft.q ?? 0);
    qNumber.value = state.stageDraft.q === undefined ? "" : String(state.stageDraft.q);
    refreshDraftErrors();
  };
  qSlider.addEventListener("input", () => syncQ(qSlider.value));
  qNumber.addEventListener("input", () => syncQ(qNumber.value));
  bindDraftNumber("draft-a", (v) => (state.stageDraft.a = v));
  bindDraftNumber("draft-gain", (v) => (state.stageDraft.gain_k = v));
  el<HTMLButtonElement>("add-stage").addEventListener("click", () => {
    if (!stageIsValid(state.stageDraft)) {
      return;
    }
    const stage: StageConfig = { ...state.stageDraft };
    state.config.stages.push(stage);
    state.stageDraft = emptyStageDraft();
    qSlider.value = "0";
    qNumber.value = "";
    refreshDraftErrors();
    refreshStageList();
    onConfigEdited();
  });
}

function bindDraftNumber(id: string, set: (v: number) => void): void {
  const input = el<HTMLInputElement>(id);
  input.addEventListener("input", () => {
    const v = Number(input.value);
    if (Number.isFinite(v)) {
      set(v);
    }
    refreshDraftErrors();
  });
}

async function init(): Promise<void> {
  const served = await api.getDefaultConfig<ProjectConfig>().catch(() => null);
  if (served) {
    state.config = served;
  }
  bindListInput("plant-num", () => state.config.plant.num, (v) => (state.config.plant.num = v));
  bindListInput("plant-den", () => state.config.plant.den, (v) => (state.config.plant.den = v));
  bindNumberInput("plant-delay", () => state.config.plant.delay, (v) => (state.config.plant.delay = v));
  bindNumberInput("ctl-kp", () => state.config.controller.kp, (v) => (state.config.controller.kp = v));
  bindNumberInput("ctl-ki", () => state.config.controller.ki, (v) => (state.config.controller.ki = v));
  bindNumberInput("ctl-kd", () => state.config.controller.kd, (v) => (state.config.controller.kd = v));
  bindDraft();
  refreshStageList();
  refreshDraftErrors();
  el<HTMLButtonElement>("run-design").addEventListener("click", () => void runDesign());
  el<HTMLButtonElement>("run-simulate").addEventListener("click", () => void runSimulate());
  void runAnalyze();
}

if (typeof document !== "undefined") {
  void init();
}
