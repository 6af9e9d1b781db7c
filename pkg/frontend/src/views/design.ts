// Design report view: the per-alpha marginal-gain table for sweep mode, or
// the fitted-stage summary for fit_flat mode.  The alpha sweep is always an
// explicit user action, never triggered by edits.

import type { DesignPayload } from "../types.js";

export interface DesignViewModel {
  hash: string;
  stale: boolean;
  mode: "sweep" | "fit_flat";
  summary: Array<{ label: string; value: string }>;
  perAlpha: Array<{ alpha: number; kmText: string; constraints: boolean }>;
  stages: DesignPayload["stages"];
  notes: string[];
}

export function buildDesignView(payload: DesignPayload, stale: boolean): DesignViewModel {
  const d = payload.design;
  const summary: Array<{ label: string; value: string }> = [];
  if (d.mode === "sweep") {
    summary.push({ label: "alpha*", value: String(d.alpha_star) });
    summary.push({ label: "q*", value: String(d.q_star) });
    summary.push({
      label: "marginal gain at alpha*",
      value: d.margin_unbounded ? "unbounded in bracket" : String(d.k_m_at_star),
    });
    summary.push({ label: "flatness before", value: `${d.flatness_before_deg} deg` });
    summary.push({ label: "flatness after", value: `${d.flatness_after_deg} deg` });
  } else {
    summary.push({ label: "fit at gain crossover", value: `${d.w_gc} rad/s` });
    summary.push({ label: "fitted q", value: String(d.q) });
    summary.push({ label: "fitted shift a", value: String(d.a) });
    summary.push({ label: "slope reduction", value: `${d.slope_reduction_pct}%` });
  }
  return {
    hash: payload.config_hash,
    stale,
    mode: d.mode,
    summary,
    perAlpha: (d.per_alpha ?? []).map((r) => ({
      alpha: r.alpha,
      kmText: r.unbounded ? "unbounded" : r.k_m === null ? "unstable" : String(r.k_m),
      constraints: r.constraints_satisfied,
    })),
    stages: payload.stages,
    notes: d.notes,
  };
}

export function renderDesign(view: DesignViewModel): string {
  const banner = view.stale
    ? `<div class="banner stale">results are stale: config changed since this design run (hash ${view.hash.slice(0, 12)}…)</div>`
    : "";
  const summary = view.summary
    .map((s) => `<div><span class="label">${escapeHtml(s.label)}:</span> ${escapeHtml(s.value)}</div>`)
    .join("");
  const rows = view.perAlpha
    .map((r) => `<tr><td>${r.alpha}</td><td>${escapeHtml(r.kmText)}</td>` +
      `<td>${r.constraints ? "yes" : "no"}</td></tr>`)
    .join("");
  const table = view.perAlpha.length
    ? `<table class="per-alpha"><thead><tr><th>alpha</th><th>marginal gain</th><th>constraints</th></tr></thead><tbody>${rows}</tbody></table>`
    : "";
  const stages = view.stages
    .map((s) => `<li>${escapeHtml(s.kind)} q=${s.q} a=${s.a} gain=${s.gain_k}</li>`)
    .join("");
  const notes = view.notes.length
    ? `<ul class="notes">${view.notes.map((n) => `<li>${escapeHtml(n)}</li>`).join("")}</ul>`
    : "";
  return `${banner}<div class="summary">${summary}</div>${table}` +
    `<div class="stage-list"><span class="label">proposed stages:</span><ul>${stages}</ul></div>${notes}` +
    `<div class="readout"><span class="hash">hash ${view.hash.slice(0, 12)}…</span></div>`;
}

function escapeHtml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
