// Mirrors of the server-side config schema and response payloads.
// The client never derives numbers from these; it only displays them.

export type StageKind = "differintegrator" | "shifted_sum" | "shifted_pow";

export const STAGE_KINDS: StageKind[] = ["differintegrator", "shifted_sum", "shifted_pow"];

export interface StageConfig {
  kind: StageKind;
  q?: number;
  alpha?: number;
  a: number;
  gain_k: number;
}

export interface ProjectConfig {
  plant: { num: number[]; den: number[]; delay: number };
  controller: { kp: number; ki: number; kd: number };
  stages: StageConfig[];
  design: Record<string, unknown>;
  sim: {
    t_final: number;
    dt: number | null;
    gain_multipliers: number[];
    iso_threshold: number;
  };
  outputs: string;
}

export interface BodeCurve {
  label: string;
  omega_rad_s: number[];
  mag_db: number[];
  phase_deg: number[];
}

export interface AnalyzePayload {
  config_hash: string;
  bode: { curves: BodeCurve[] };
  margins: {
    gain_crossover_wgc: number | null;
    phase_crossover_wpc: number | null;
    gain_margin: number | null;
    phase_margin: number | null;
  };
  flatness: {
    band: number[];
    points: number;
    spread_deg: number;
    target_deg: number;
    within_target: boolean;
  };
  notes: string[];
}

export interface PerAlphaRow {
  alpha: number;
  k_m: number | null;
  unbounded: boolean;
  stable: boolean;
  constraints_satisfied: boolean;
}

export interface DesignPayload {
  config_hash: string;
  design: {
    mode: "sweep" | "fit_flat";
    alpha_star?: number;
    q_star?: number;
    k_m_at_star?: number | null;
    margin_unbounded?: boolean;
    per_alpha?: PerAlphaRow[];
    flatness_before_deg?: number;
    flatness_after_deg?: number;
    w_gc?: number;
    q?: number;
    a?: number;
    alpha?: number;
    slope_reduction_pct?: number;
    notes: string[];
  };
  stages: Array<{ kind: StageKind; q: number; a: number; gain_k: number; alpha: number }>;
}

export interface SimRun {
  multiplier: number;
  diverged: boolean;
  overshoot_pct?: number;
  peak_time_s?: number;
  settling_time_2pct_s?: number | null;
  final_value?: number;
  settled?: boolean;
}

export interface SimulatePayload {
  config_hash: string;
  isodamping: {
    threshold_pp: number;
    spread_pp: number | null;
    passed: boolean | null;
    diverged: number[];
    runs: SimRun[];
    notes: string[];
  };
  series: Array<{ multiplier: number; t_s: number[]; y: number[] }>;
  dt: number;
}
