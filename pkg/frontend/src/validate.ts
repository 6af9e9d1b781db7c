// Client-side mirror of the stage invariants so obviously-invalid edits are
// rejected inline without a round trip.  The server remains authoritative.

import { STAGE_KINDS, type StageConfig } from "./types.js";

export type StageErrors = Partial<Record<"kind" | "q" | "alpha" | "a" | "gain_k", string>>;

function orderToAlpha(q: number): number {
  return q > 0 ? (1 - q) / (1 + q) : (1 + Math.abs(q)) / (1 - Math.abs(q));
}

export function validateStage(draft: StageConfig): StageErrors {
  const errors: StageErrors = {};
  if (!STAGE_KINDS.includes(draft.kind)) {
    errors.kind = "unknown stage kind";
  }
  const hasQ = draft.q !== undefined && !Number.isNaN(draft.q);
  const hasAlpha = draft.alpha !== undefined && !Number.isNaN(draft.alpha);
  if (!hasQ && !hasAlpha) {
    errors.q = "set the order q or the realization alpha";
  }
  if (hasQ && Math.abs(draft.q as number) >= 1) {
    errors.q = "order must satisfy |q| < 1";
  }
  if (hasAlpha && (draft.alpha as number) <= 0) {
    errors.alpha = "alpha must be > 0";
  }
  if (hasQ && hasAlpha && !errors.q && !errors.alpha) {
    const expected = (draft.q as number) === 0 ? 1 : orderToAlpha(draft.q as number);
    const rel = Math.abs((draft.alpha as number) - expected) / expected;
    if (rel > 1e-6) {
      errors.alpha = "alpha is inconsistent with q";
    }
  }
  if (!(draft.a >= 0)) {
    errors.a = "shift a must be >= 0";
  }
  if (!(draft.gain_k > 0)) {
    errors.gain_k = "gain must be > 0";
  }
  return errors;
}

export function stageIsValid(draft: StageConfig): boolean {
  return Object.keys(validateStage(draft)).length === 0;
}
