// Bode view: view-model construction is pure and copies every numeric
// verbatim from the analyze payload (traceability is tested), rendering
// turns the model into SVG + annotation strings.

import { lineChart } from "../charts/svg.js";
import type { AnalyzePayload } from "../types.js";

export interface BodeViewModel {
  hash: string;
  stale: boolean;
  band: number[];
  spreadDeg: number;
  targetDeg: number;
  withinTarget: boolean;
  curves: Array<{ label: string; omega: number[]; magDb: number[]; phaseDeg: number[] }>;
  margins: AnalyzePayload["margins"];
  notes: string[];
}

export function buildBodeView(payload: AnalyzePayload, stale: boolean): BodeViewModel {
  return {
    hash: payload.config_hash,
    stale,
    band: payload.flatness.band,
    spreadDeg: payload.flatness.spread_deg,
    targetDeg: payload.flatness.target_deg,
    withinTarget: payload.flatness.within_target,
    curves: payload.bode.curves.map((c) => ({
      label: c.label,
      omega: c.omega_rad_s,
      magDb: c.mag_db,
      phaseDeg: c.phase_deg,
    })),
    margins: payload.margins,
    notes: payload.notes,
  };
}

export function renderBode(view: BodeViewModel): string {
  const shade: [number, number] = [view.band[0] ?? 0, view.band[1] ?? 0];
  const mag = lineChart(
    view.curves.map((c) => ({ label: c.label, x: c.omega, y: c.magDb })),
    { xLog: true, xLabel: "frequency [rad/s]", yLabel: "magnitude [dB]", shadeX: shade },
  );
  const phase = lineChart(
    view.curves.map((c) => ({ label: c.label, x: c.omega, y: c.phaseDeg })),
    {
      xLog: true,
      xLabel: "frequency [rad/s]",
      yLabel: "phase [deg]",
      shadeX: shade,
      title: `phase spread over band: ${view.spreadDeg} deg (target ${view.targetDeg})`,
    },
  );
  const banner = view.stale
    ? `<div class="banner stale">results are stale: config changed since this analysis (hash ${view.hash.slice(0, 12)}…)</div>`
    : "";
  const marginBits: string[] = [];
  if (view.margins.gain_crossover_wgc !== null) {
    marginBits.push(`gain crossover ${view.margins.gain_crossover_wgc} rad/s`);
  }
  if (view.margins.phase_margin !== null) {
    marginBits.push(`phase margin ${view.margins.phase_margin} deg`);
  }
  if (view.margins.gain_margin !== null) {
    marginBits.push(`gain margin ${view.margins.gain_margin}`);
  }
  const flatBadge = view.withinTarget
    ? `<span class="badge ok">flat within target</span>`
    : `<span class="badge bad">spread above target</span>`;
  const notes = view.notes.length
    ? `<ul class="notes">${view.notes.map((n) => `<li>${escapeHtml(n)}</li>`).join("")}</ul>`
    : "";
  return `${banner}<div class="readout">${flatBadge} <span>${marginBits.map(escapeHtml).join(" | ")}</span>` +
    ` <span class="hash">hash ${view.hash.slice(0, 12)}…</span></div>${mag}${phase}${notes}`;
}

function escapeHtml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
