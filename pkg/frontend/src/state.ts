// Studio state: the editable config plus per-endpoint response caches.
// A cached response is usable only while the current config still
// serializes to the key it was requested with; otherwise views must show
// the stale banner instead of silently rendering outdated numbers.

import { stableStringify } from "./canonical.js";
import type { AnalyzePayload, DesignPayload, ProjectConfig, SimulatePayload, StageConfig } from "./types.js";

export interface CachedResponse<T> {
  sentKey: string;
  payload: T;
}

export function defaultConfig(): ProjectConfig {
  return {
    plant: { num: [0.01], den: [0.005, 0.06, 0.1001], delay: 0 },
    controller: { kp: 1.64, ki: 2.64, kd: 0 },
    stages: [],
    design: {},
    sim: { t_final: 30, dt: 0.005, gain_multipliers: [0.8, 0.9, 1.0, 1.1, 1.2], iso_threshold: 2.0 },
    outputs: "out",
  };
}

export function emptyStageDraft(): StageConfig {
  return { kind: "differintegrator", q: undefined, alpha: undefined, a: 0, gain_k: 1 };
}

export class StudioState {
  config: ProjectConfig;
  stageDraft: StageConfig;
  lastAnalyze?: CachedResponse<AnalyzePayload>;
  lastDesign?: CachedResponse<DesignPayload>;
  lastSimulate?: CachedResponse<SimulatePayload>;

  constructor(config?: ProjectConfig) {
    this.config = config ?? defaultConfig();
    this.stageDraft = emptyStageDraft();
  }

  configKey(): string {
    return stableStringify(this.config);
  }

  isStale(cache?: CachedResponse<unknown>): boolean {
    return !cache || cache.sentKey !== this.configKey();
  }

  storeAnalyze(payload: AnalyzePayload, sentKey: string): void {
    this.lastAnalyze = { sentKey, payload };
  }

  storeDesign(payload: DesignPayload, sentKey: string): void {
    this.lastDesign = { sentKey, payload };
  }

  storeSimulate(payload: SimulatePayload, sentKey: string): void {
    this.lastSimulate = { sentKey, payload };
  }
}
