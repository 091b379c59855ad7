// Browser wiring: reads DOM inputs, drives a ConsoleSession, and swaps
// rendered fragments into the page. All state lives in the session except
// the preview viewport, which is a rendering concern only.

import { ApiClient } from "./api.js";
import { MODEL_KINDS, MODEL_LABELS, type ConfigDraft, type ModelKind } from "./config.js";
import { ConsoleSession, type SessionState } from "./session.js";
import type { Viewport } from "./charts.js";
import {
  comparisonView,
  errorView,
  issuesView,
  jobBanner,
  metricsCard,
  previewView,
  resultsTable,
} from "./views.js";

const PREVIEW_ROWS = 2000;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function setHtml(id: string, html: string): void {
  byId<HTMLElement>(id).innerHTML = html;
}

let viewport: Viewport | null = null;

function render(state: SessionState): void {
  setHtml("upload-error", state.lastError && !state.datasetId ? errorView(state.lastError) : "");
  setHtml(
    "preview",
    state.preview ? previewView(state.preview, viewport ?? undefined) : "<p class=\"hint\">upload a CSV to begin</p>",
  );
  setHtml("draft-issues", issuesView(state.draftIssues));
  setHtml("job", state.job ? jobBanner(state.job) : "");
  setHtml("run-error", state.lastError && state.datasetId ? errorView(state.lastError) : "");
  setHtml("results", state.results ? resultsTable(state.results) : "");
  setHtml("metrics", state.metrics ? metricsCard(state.metrics) : "");
  setHtml("comparison", state.comparisons.length ? comparisonView(state.comparisons, state.roc) : "");
  byId<HTMLButtonElement>("run").disabled = state.busy || !state.datasetId;

  const results = state.results;
  const pager = byId<HTMLElement>("pager");
  if (results) {
    const pages = Math.max(1, Math.ceil(results.totalRows / results.pageSize));
    pager.hidden = false;
    byId<HTMLSpanElement>("page-label").textContent = `page ${results.page} of ${pages}`;
    byId<HTMLButtonElement>("page-prev").disabled = results.page <= 1;
    byId<HTMLButtonElement>("page-next").disabled = results.page >= pages;
  } else {
    pager.hidden = true;
  }
}

function readDraftFromForm(): Partial<ConfigDraft> {
  return {
    model: byId<HTMLSelectElement>("cfg-model").value as ModelKind,
    windowSize: Number(byId<HTMLInputElement>("cfg-window").value),
    nIterationsRefit: Number(byId<HTMLInputElement>("cfg-refit").value),
    nStandardDeviations: Number(byId<HTMLInputElement>("cfg-nsd").value),
    eventThreshold: Number(byId<HTMLInputElement>("cfg-threshold").value),
    bedWindowSize: Number(byId<HTMLInputElement>("cfg-bed").value),
    trialSuccessProb: Number(byId<HTMLInputElement>("cfg-prob").value),
    robustTraining: byId<HTMLInputElement>("cfg-robust").checked,
  };
}

function writeDraftToForm(draft: ConfigDraft): void {
  byId<HTMLSelectElement>("cfg-model").value = draft.model;
  byId<HTMLInputElement>("cfg-window").value = String(draft.windowSize);
  byId<HTMLInputElement>("cfg-refit").value = String(draft.nIterationsRefit);
  byId<HTMLInputElement>("cfg-nsd").value = String(draft.nStandardDeviations);
  byId<HTMLInputElement>("cfg-threshold").value = String(draft.eventThreshold);
  byId<HTMLInputElement>("cfg-bed").value = String(draft.bedWindowSize);
  byId<HTMLInputElement>("cfg-prob").value = String(draft.trialSuccessProb);
  byId<HTMLInputElement>("cfg-robust").checked = draft.robustTraining;
}

function zoom(state: SessionState, factor: number): void {
  const total = state.preview?.previewRows ?? 0;
  if (!total) return;
  const current = viewport ?? { start: 0, end: total };
  const center = (current.start + current.end) / 2;
  const half = Math.max(5, ((current.end - current.start) * factor) / 2);
  viewport = {
    start: Math.max(0, Math.round(center - half)),
    end: Math.min(total, Math.round(center + half)),
  };
  if (viewport.start === 0 && viewport.end === total) viewport = null;
  render(state);
}

function pan(state: SessionState, direction: number): void {
  const total = state.preview?.previewRows ?? 0;
  if (!total || !viewport) return;
  const width = viewport.end - viewport.start;
  const step = Math.max(1, Math.round(width / 4)) * direction;
  let start = viewport.start + step;
  start = Math.max(0, Math.min(start, total - width));
  viewport = { start, end: start + width };
  render(state);
}

function downloadText(filename: string, text: string, mime: string): void {
  const blob = new Blob([text], { type: mime });
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = filename;
  link.click();
  URL.revokeObjectURL(url);
}

export function boot(): void {
  const api = new ApiClient("");
  const session = new ConsoleSession(api, render);

  const modelSelect = byId<HTMLSelectElement>("cfg-model");
  modelSelect.innerHTML = MODEL_KINDS.map(
    (kind) => `<option value="${kind}">${MODEL_LABELS[kind]}</option>`,
  ).join("");
  writeDraftToForm(session.state.draft);

  byId<HTMLInputElement>("file").addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    viewport = null;
    await session.uploadCsv(await file.text(), PREVIEW_ROWS);
  });

  for (const id of ["cfg-model", "cfg-window", "cfg-refit", "cfg-nsd", "cfg-threshold", "cfg-bed", "cfg-prob", "cfg-robust"]) {
    byId<HTMLElement>(id).addEventListener("change", () => session.setDraft(readDraftFromForm()));
  }

  byId<HTMLButtonElement>("run").addEventListener("click", () => {
    session.setDraft(readDraftFromForm());
    void session.runDraft();
  });

  byId<HTMLButtonElement>("page-prev").addEventListener("click", () => {
    if (session.state.results) void session.loadResultsPage(session.state.results.page - 1);
  });
  byId<HTMLButtonElement>("page-next").addEventListener("click", () => {
    if (session.state.results) void session.loadResultsPage(session.state.results.page + 1);
  });

  byId<HTMLButtonElement>("zoom-in").addEventListener("click", () => zoom(session.state, 0.5));
  byId<HTMLButtonElement>("zoom-out").addEventListener("click", () => zoom(session.state, 2));
  byId<HTMLButtonElement>("pan-left").addEventListener("click", () => pan(session.state, -1));
  byId<HTMLButtonElement>("pan-right").addEventListener("click", () => pan(session.state, 1));

  byId<HTMLButtonElement>("dl-csv").addEventListener("click", async () => {
    const jobId = session.state.activeJobId;
    if (!jobId) return;
    downloadText(`results-${jobId}.csv`, await api.resultsCsv(jobId), "text/csv");
  });
  byId<HTMLButtonElement>("dl-json").addEventListener("click", () => {
    const job = session.state.job;
    if (!job) return;
    const doc = {
      job,
      results: session.state.results,
      metrics: session.state.metrics,
      roc: session.state.roc,
    };
    downloadText(`results-${job.jobId}.json`, JSON.stringify(doc, null, 2), "application/json");
  });

  render(session.state);
}

boot();
