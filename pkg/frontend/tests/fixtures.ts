import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { AnalyzePayload, DesignPayload, ProjectConfig, SimulatePayload } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

function load<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", `${name}.json`), "utf-8")) as T;
}

export const analyzePayload = (): AnalyzePayload => load<AnalyzePayload>("analyze");
export const designPayload = (): DesignPayload => load<DesignPayload>("design");
export const simulatePayload = (): SimulatePayload => load<SimulatePayload>("simulate");
export const recordedConfig = (): ProjectConfig => load<ProjectConfig>("config");

/** Collect every finite number reachable in a JSON-ish value. */
export function collectNumbers(value: unknown, out: Set<number> = new Set()): Set<number> {
  if (typeof value === "number" && Number.isFinite(value)) {
    out.add(value);
  } else if (Array.isArray(value)) {
    for (const v of value) {
      collectNumbers(v, out);
    }
  } else if (value !== null && typeof value === "object") {
    for (const v of Object.values(value as Record<string, unknown>)) {
      collectNumbers(v, out);
    }
  }
  return out;
}
