// Detector config drafts, client-side validation mirroring the server's
// 422 rules, and the round trip between a draft and a job's echoed config.

import type { ConfigEcho } from "./api.js";

export const MODEL_KINDS = [
  "Meanf",
  "Naive",
  "Drift",
  "SES",
  "Holt",
  "Theta",
  "ArimaLite",
  "NeuralMultivariate",
] as const;

export type ModelKind = (typeof MODEL_KINDS)[number];

export const MODEL_LABELS: Record<ModelKind, string> = {
  Meanf: "Window mean",
  Naive: "Random walk",
  Drift: "Random walk with drift",
  SES: "Simple exponential smoothing",
  Holt: "Holt linear trend",
  Theta: "Theta",
  ArimaLite: "Autoregression (AIC order)",
  NeuralMultivariate: "Multivariate neural net",
};

export interface ConfigDraft {
  model: ModelKind;
  windowSize: number;
  nIterationsRefit: number;
  nStandardDeviations: number;
  eventThreshold: number;
  bedWindowSize: number;
  trialSuccessProb: number;
  robustTraining: boolean;
}

export const DEFAULT_DRAFT: ConfigDraft = {
  model: "ArimaLite",
  windowSize: 200,
  nIterationsRefit: 5,
  nStandardDeviations: 2,
  eventThreshold: 0.7,
  bedWindowSize: 10,
  trialSuccessProb: 0.5,
  robustTraining: true,
};

export interface DraftIssue {
  field: string;
  message: string;
  severity: "error" | "warning";
}

function intIssue(field: string, value: number, minimum: number): DraftIssue | null {
  if (!Number.isInteger(value) || value < minimum) {
    return { field, message: `${field} must be an integer >= ${minimum}`, severity: "error" };
  }
  return null;
}

// Mirrors the server's semantic checks so a draft that passes here is not
// rejected with 422 for a value reason (data-dependent checks, such as the
// window exceeding the model minimum, still belong to the server).
export function validateDraft(draft: ConfigDraft): DraftIssue[] {
  const issues: DraftIssue[] = [];
  const push = (issue: DraftIssue | null) => {
    if (issue) issues.push(issue);
  };

  push(intIssue("windowSize", draft.windowSize, 1));
  push(intIssue("nIterationsRefit", draft.nIterationsRefit, 1));
  push(intIssue("bedWindowSize", draft.bedWindowSize, 1));

  if (!Number.isFinite(draft.nStandardDeviations) || draft.nStandardDeviations < 0) {
    issues.push({ field: "nStandardDeviations", message: "nStandardDeviations must be >= 0", severity: "error" });
  }
  if (!Number.isFinite(draft.eventThreshold) || draft.eventThreshold < 0 || draft.eventThreshold > 1) {
    issues.push({ field: "eventThreshold", message: "eventThreshold must lie in [0, 1]", severity: "error" });
  }
  if (!Number.isFinite(draft.trialSuccessProb) || draft.trialSuccessProb <= 0 || draft.trialSuccessProb >= 1) {
    issues.push({ field: "trialSuccessProb", message: "trialSuccessProb must lie in (0, 1)", severity: "error" });
  }
  if (!(MODEL_KINDS as readonly string[]).includes(draft.model)) {
    issues.push({ field: "model", message: `unknown model ${draft.model}`, severity: "error" });
  }

  // the server accepts this but degrades the discriminator to full-window
  // counting and logs a warning; surface the same caution before submit
  if (
    Number.isInteger(draft.bedWindowSize) &&
    Number.isInteger(draft.windowSize) &&
    draft.bedWindowSize > draft.windowSize
  ) {
    issues.push({
      field: "bedWindowSize",
      message: `bedWindowSize ${draft.bedWindowSize} exceeds windowSize ${draft.windowSize}; the event test will use the whole window`,
      severity: "warning",
    });
  }
  return issues;
}

export function hasErrors(issues: DraftIssue[]): boolean {
  return issues.some((i) => i.severity === "error");
}

// Body for POST /api/jobs. Bare model kinds are valid server model names.
export function submitPayload(draft: ConfigDraft): Record<string, unknown> {
  return {
    model: draft.model,
    windowSize: draft.windowSize,
    nIterationsRefit: draft.nIterationsRefit,
    nStandardDeviations: draft.nStandardDeviations,
    eventThreshold: draft.eventThreshold,
    bedWindowSize: draft.bedWindowSize,
    trialSuccessProb: draft.trialSuccessProb,
    robustTraining: draft.robustTraining,
  };
}

// Rebuild a draft from a job's echoed config. For any draft d,
// draftFromEcho(echo of submitPayload(d)) must equal d.
export function draftFromEcho(echo: ConfigEcho): ConfigDraft {
  return {
    model: echo.modelSpec.kind as ModelKind,
    windowSize: echo.windowSize,
    nIterationsRefit: echo.nIterationsRefit,
    nStandardDeviations: echo.nStandardDeviations,
    eventThreshold: echo.eventThreshold,
    bedWindowSize: echo.bedWindowSize,
    trialSuccessProb: echo.trialSuccessProb,
    robustTraining: echo.robustTraining,
  };
}
