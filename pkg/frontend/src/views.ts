// HTML fragment builders. Pure functions over fetched API payloads: every
// figure rendered here carries the exact server value in a data-exact
// attribute, and the visible text is a formatting of that same value.

import type {
  JobDoc,
  MetricsResponse,
  PreviewResponse,
  ResultsPage,
  RocResponse,
} from "./api.js";
import { ApiError } from "./api.js";
import type { DraftIssue } from "./config.js";
import { escapeXml, rocChart, seriesPanel, type OperatingPoint, type Viewport } from "./charts.js";

export const esc = escapeXml;

function fmt(value: number | null): string {
  if (value === null) return "undefined";
  if (Number.isInteger(value)) return String(value);
  return value.toFixed(4);
}

function stat(label: string, value: number | null): string {
  return (
    `<div class="stat"><dt>${esc(label)}</dt>` +
    `<dd data-stat="${esc(label)}" data-exact="${value === null ? "" : String(value)}">${fmt(value)}</dd></div>`
  );
}

export function previewView(preview: PreviewResponse, viewport?: Viewport): string {
  const panels: string[] = [];
  for (const column of preview.columns) {
    const values = preview.values[column.name] ?? [];
    const missingPct = preview.previewRows > 0 ? (100 * column.missingCount) / preview.previewRows : 0;
    panels.push(
      `<figure class="column-panel" data-role="${esc(column.role)}">` +
        seriesPanel({
          name: column.name,
          values,
          trueEvents: preview.eventLabels,
          viewport,
        }) +
        `<figcaption>${esc(column.name)} (${esc(column.role)}) ` +
        `<span class="missing" data-missing="${column.missingCount}">` +
        `${column.missingCount} missing (${missingPct.toFixed(1)}%)</span></figcaption>` +
        `</figure>`,
    );
  }
  const labelNote = preview.eventLabels
    ? `<p class="label-note">ground-truth event rows shaded</p>`
    : "";
  return (
    `<section class="preview" data-dataset="${esc(preview.datasetId)}">` +
    `<h3>${esc(preview.datasetId)}: ${preview.rowCount} rows, showing ${preview.previewRows}</h3>` +
    labelNote +
    panels.join("") +
    `</section>`
  );
}

export function metricsCard(metrics: MetricsResponse): string {
  const cm = metrics.confusionMatrix;
  return (
    `<section class="metrics-card" data-job="${esc(metrics.jobId)}">` +
    `<h3>Scoring (${metrics.rowsEvaluated} rows)</h3>` +
    `<table class="confusion"><tbody>` +
    `<tr><td data-cm="tp">${cm.tp}</td><td data-cm="fp">${cm.fp}</td></tr>` +
    `<tr><td data-cm="fn">${cm.fn}</td><td data-cm="tn">${cm.tn}</td></tr>` +
    `</tbody></table>` +
    `<dl class="stats">` +
    stat("accuracy", metrics.accuracy) +
    stat("sensitivity", metrics.sensitivity) +
    stat("specificity", metrics.specificity) +
    stat("fpr", metrics.fpr) +
    `</dl></section>`
  );
}

export function resultsTable(page: ResultsPage): string {
  const cols = page.qualityColumns;
  const head =
    `<tr><th>timestamp</th><th>event probability</th><th>label</th>` +
    cols.map((c) => `<th>${esc(c)}</th>`).join("") +
    `</tr>`;
  const rows = page.records
    .map((r) => {
      const marks = cols
        .map((c) => {
          const res = r.residuals[c];
          const title = res === null || res === undefined ? "missing" : `residual ${res}`;
          return `<td class="${r.outliers[c] ? "outlier" : ""}" title="${esc(title)}">${
            r.outliers[c] ? "&#9679;" : ""
          }</td>`;
        })
        .join("");
      return (
        `<tr class="label-${r.label.toLowerCase()}" data-index="${r.index}">` +
        `<td>${esc(r.timestamp)}</td>` +
        `<td data-prob="${String(r.eventProbability)}">${fmt(r.eventProbability)}</td>` +
        `<td>${esc(r.label)}</td>` +
        marks +
        `</tr>`
      );
    })
    .join("");
  const pages = Math.max(1, Math.ceil(page.totalRows / page.pageSize));
  return (
    `<section class="results" data-job="${esc(page.jobId)}" data-page="${page.page}" data-pages="${pages}">` +
    `<table class="results-table"><thead>${head}</thead><tbody>${rows}</tbody></table>` +
    `</section>`
  );
}

export function jobBanner(job: JobDoc): string {
  const diagnostics = job.diagnostics.length
    ? `<ul class="diagnostics">${job.diagnostics.map((d) => `<li>${esc(d)}</li>`).join("")}</ul>`
    : "";
  const error = job.error ? `<p class="job-error">${esc(job.error)}</p>` : "";
  return (
    `<div class="job-banner status-${esc(job.status)}" data-job="${esc(job.jobId)}">` +
    `<span class="status">${esc(job.status)}</span>` +
    error +
    diagnostics +
    `</div>`
  );
}

export interface ComparisonSlot {
  jobId: string;
  eventThreshold: number;
  metrics: MetricsResponse | null;
}

export function comparisonView(slots: ComparisonSlot[], roc: RocResponse | null): string {
  const rows = slots
    .map((slot) => {
      const sens = slot.metrics ? slot.metrics.sensitivity : null;
      const spec = slot.metrics ? slot.metrics.specificity : null;
      return (
        `<tr data-job="${esc(slot.jobId)}">` +
        `<td>${esc(slot.jobId)}</td>` +
        `<td data-exact="${String(slot.eventThreshold)}">${slot.eventThreshold}</td>` +
        `<td data-exact="${sens === null ? "" : String(sens)}">${fmt(sens)}</td>` +
        `<td data-exact="${spec === null ? "" : String(spec)}">${fmt(spec)}</td>` +
        `</tr>`
      );
    })
    .join("");
  const operating: OperatingPoint[] = slots
    .filter((s) => s.metrics && s.metrics.fpr !== null && s.metrics.sensitivity !== null)
    .map((s) => ({
      label: `threshold ${s.eventThreshold}`,
      fpr: s.metrics!.fpr as number,
      tpr: s.metrics!.sensitivity as number,
    }));
  const chart = roc ? rocChart(roc.points, roc.auc, operating) : "";
  return (
    `<section class="comparison">` +
    `<table class="comparison-table"><thead>` +
    `<tr><th>job</th><th>event threshold</th><th>sensitivity</th><th>specificity</th></tr>` +
    `</thead><tbody>${rows}</tbody></table>` +
    chart +
    `</section>`
  );
}

export function issuesView(issues: DraftIssue[]): string {
  if (!issues.length) return "";
  const items = issues
    .map((i) => `<li class="issue-${i.severity}" data-field="${esc(i.field)}">${esc(i.message)}</li>`)
    .join("");
  return `<ul class="draft-issues">${items}</ul>`;
}

export function errorView(error: unknown): string {
  if (error instanceof ApiError) {
    const items = error.errors
      .map((e) => `<li data-field="${esc(e.field)}">${esc(e.field ? `${e.field}: ${e.message}` : e.message)}</li>`)
      .join("");
    return `<div class="error-box" data-status="${error.status}"><ul>${items}</ul></div>`;
  }
  const message = error instanceof Error ? error.message : String(error);
  return `<div class="error-box"><ul><li>${esc(message)}</li></ul></div>`;
}
