/** Client-side mirror of the service's 422 rules: no interaction path may
 * issue a request with out-of-range values. */

import type { Preferences, StudyRunRequest } from "./types.js";

export function clamp01(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.min(1, Math.max(0, value));
}

export function validPreferences(p: Preferences): boolean {
  return [p.pressure, p.frequency, p.area].every((v) => v >= 0 && v <= 1 && !Number.isNaN(v));
}

export function validAlpha(alpha: number): boolean {
  return alpha > 0 && alpha < 1;
}

export function validBeta(beta: number): boolean {
  return beta >= 0 && !Number.isNaN(beta);
}

export function studyRequestProblems(req: StudyRunRequest): string[] {
  const problems: string[] = [];
  if (req.trials_per_config < 1) problems.push("trials_per_config must be at least 1");
  if (req.tasks.length === 0) problems.push("at least one task is required");
  if (typeof req.profiles === "number" && req.profiles < 1) {
    problems.push("profile count must be at least 1");
  }
  if (req.decode_mode !== "map" && req.decode_mode !== "sample") {
    problems.push("decode_mode must be map or sample");
  }
  return problems;
}
