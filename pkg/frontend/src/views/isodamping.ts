// Gain-sweep step overlay: traces colored by multiplier, a spread badge that
// goes green only at-or-under the configured threshold, and per-multiplier
// failure markers for diverged runs.

import { lineChart } from "../charts/svg.js";
import type { SimulatePayload } from "../types.js";

export interface IsoViewModel {
  hash: string;
  stale: boolean;
  thresholdPp: number;
  spreadPp: number | null;
  passed: boolean | null;
  divergedMultipliers: number[];
  traces: Array<{ multiplier: number; t: number[]; y: number[] }>;
  runs: SimulatePayload["isodamping"]["runs"];
  notes: string[];
}

export function buildIsoView(payload: SimulatePayload, stale: boolean): IsoViewModel {
  return {
    hash: payload.config_hash,
    stale,
    thresholdPp: payload.isodamping.threshold_pp,
    spreadPp: payload.isodamping.spread_pp,
    passed: payload.isodamping.passed,
    divergedMultipliers: payload.isodamping.diverged,
    traces: payload.series.map((s) => ({ multiplier: s.multiplier, t: s.t_s, y: s.y })),
    runs: payload.isodamping.runs,
    notes: payload.isodamping.notes,
  };
}

export function renderIsodamping(view: IsoViewModel): string {
  const banner = view.stale
    ? `<div class="banner stale">results are stale: config changed since this simulation (hash ${view.hash.slice(0, 12)}…)</div>`
    : "";
  const overlay = lineChart(
    view.traces.map((t) => ({ label: `x${t.multiplier}`, x: t.t, y: t.y })),
    { xLabel: "time [s]", yLabel: "output", title: "step responses across loop-gain multipliers" },
  );
  const badgeTone = view.passed === null ? "na" : view.passed ? "ok" : "bad";
  const badgeText = view.spreadPp === null
    ? "no surviving runs"
    : `spread ${view.spreadPp} pp (threshold ${view.thresholdPp} pp)`;
  const failures = view.divergedMultipliers.length
    ? `<div class="failures">diverged at gain x${view.divergedMultipliers.join(", x")}</div>`
    : "";
  const rows = view.runs
    .map((r) =>
      r.diverged
        ? `<tr class="diverged"><td>x${r.multiplier}</td><td colspan="3">diverged</td></tr>`
        : `<tr><td>x${r.multiplier}</td><td>${r.overshoot_pct}%</td><td>${r.peak_time_s} s</td>` +
          `<td>${r.settling_time_2pct_s === null ? "—" : `${r.settling_time_2pct_s} s`}</td></tr>`,
    )
    .join("");
  const table = `<table class="runs"><thead><tr><th>gain</th><th>overshoot</th><th>peak</th><th>2% settle</th></tr></thead><tbody>${rows}</tbody></table>`;
  return `${banner}<div class="readout"><span class="badge ${badgeTone}">${badgeText}</span>` +
    `<span class="hash">hash ${view.hash.slice(0, 12)}…</span></div>${failures}${overlay}${table}`;
}
