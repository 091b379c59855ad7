// SVG builders for the series panels and the ROC view. Pure string
// functions so tests can inspect the markup without a DOM.

import { downsampleIndices } from "./downsample.js";
import type { RocPoint } from "./api.js";

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface Viewport {
  start: number; // inclusive row index
  end: number; // exclusive row index
}

export interface SeriesPanelOptions {
  name: string;
  values: Array<number | null>;
  width?: number;
  height?: number;
  viewport?: Viewport;
  trueEvents?: boolean[] | null;
  detectedRows?: boolean[] | null;
  maxPoints?: number;
}

interface Scale {
  x: (row: number) => number;
  y: (value: number) => number;
}

function makeScale(
  rows: Viewport,
  values: Array<number | null>,
  width: number,
  height: number,
  pad: number,
): Scale {
  let lo = Infinity;
  let hi = -Infinity;
  for (let i = rows.start; i < rows.end; i++) {
    const v = values[i];
    if (v === null || v === undefined || !Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = Math.max(1, rows.end - 1 - rows.start);
  return {
    x: (row) => pad + ((row - rows.start) / span) * (width - 2 * pad),
    y: (value) => height - pad - ((value - lo) / (hi - lo)) * (height - 2 * pad),
  };
}

function contiguousRuns(flags: boolean[], rows: Viewport): Array<[number, number]> {
  const runs: Array<[number, number]> = [];
  let start = -1;
  for (let i = rows.start; i < rows.end; i++) {
    if (flags[i] && start === -1) start = i;
    if ((!flags[i] || i === rows.end - 1) && start !== -1) {
      runs.push([start, flags[i] && i === rows.end - 1 ? i : i - 1]);
      start = -1;
    }
  }
  return runs;
}

export function seriesPanel(options: SeriesPanelOptions): string {
  const width = options.width ?? 640;
  const height = options.height ?? 140;
  const pad = 8;
  const values = options.values;
  const viewport: Viewport = options.viewport ?? { start: 0, end: values.length };
  const rows = {
    start: Math.max(0, Math.min(viewport.start, values.length - 1)),
    end: Math.min(values.length, Math.max(viewport.end, viewport.start + 2)),
  };
  const scale = makeScale(rows, values, width, height, pad);
  const parts: string[] = [];
  parts.push(
    `<svg class="series-panel" data-column="${escapeXml(options.name)}" ` +
      `viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
  );

  if (options.trueEvents) {
    for (const [a, b] of contiguousRuns(options.trueEvents, rows)) {
      const x0 = scale.x(a);
      const x1 = scale.x(b + 1 > rows.end - 1 ? rows.end - 1 : b + 1);
      parts.push(
        `<rect class="event-span" x="${x0.toFixed(1)}" y="0" ` +
          `width="${Math.max(1, x1 - x0).toFixed(1)}" height="${height}" />`,
      );
    }
  }

  const windowValues = values.slice(rows.start, rows.end);
  const picked = downsampleIndices(windowValues, options.maxPoints ?? 500).map((i) => i + rows.start);
  let segment: string[] = [];
  const polylines: string[] = [];
  const flush = () => {
    if (segment.length > 1) polylines.push(`<polyline class="series-line" points="${segment.join(" ")}" />`);
    segment = [];
  };
  for (const i of picked) {
    const v = values[i];
    if (v === null || v === undefined || !Number.isFinite(v)) {
      flush();
      continue;
    }
    segment.push(`${scale.x(i).toFixed(1)},${scale.y(v).toFixed(1)}`);
  }
  flush();
  parts.push(...polylines);

  if (options.detectedRows) {
    for (let i = rows.start; i < rows.end; i++) {
      const v = values[i];
      if (!options.detectedRows[i] || v === null || v === undefined || !Number.isFinite(v)) continue;
      parts.push(
        `<circle class="detection" cx="${scale.x(i).toFixed(1)}" cy="${scale.y(v).toFixed(1)}" r="3" />`,
      );
    }
  }

  parts.push(`<text class="panel-title" x="${pad}" y="14">${escapeXml(options.name)}</text>`);
  parts.push("</svg>");
  return parts.join("");
}

export interface OperatingPoint {
  label: string;
  fpr: number;
  tpr: number;
}

export function rocChart(points: RocPoint[], auc: number | null, operating: OperatingPoint[] = []): string {
  const size = 320;
  const pad = 34;
  const x = (fpr: number) => pad + fpr * (size - 2 * pad);
  const y = (tpr: number) => size - pad - tpr * (size - 2 * pad);
  const parts: string[] = [];
  parts.push(`<svg class="roc-chart" viewBox="0 0 ${size} ${size}" xmlns="http://www.w3.org/2000/svg">`);
  parts.push(
    `<line class="diagonal" x1="${x(0)}" y1="${y(0)}" x2="${x(1)}" y2="${y(1)}" stroke-dasharray="4 3" />`,
  );
  if (points.length > 1) {
    const path = points.map((p) => `${x(p.fpr).toFixed(1)},${y(p.tpr).toFixed(1)}`).join(" ");
    parts.push(`<polyline class="roc-line" points="${path}" />`);
  }
  for (const op of operating) {
    parts.push(
      `<g class="operating-point" data-label="${escapeXml(op.label)}">` +
        `<circle cx="${x(op.fpr).toFixed(1)}" cy="${y(op.tpr).toFixed(1)}" r="4" />` +
        `<text x="${(x(op.fpr) + 6).toFixed(1)}" y="${(y(op.tpr) - 6).toFixed(1)}">${escapeXml(op.label)}</text>` +
        `</g>`,
    );
  }
  const aucText = auc === null ? "AUC undefined" : `AUC = ${auc}`;
  parts.push(`<text class="auc" data-auc="${auc === null ? "" : String(auc)}" x="${pad}" y="16">${escapeXml(aucText)}</text>`);
  parts.push(`<text class="axis-x" x="${size / 2}" y="${size - 6}">False positive rate</text>`);
  parts.push(`<text class="axis-y" x="10" y="${size / 2}" transform="rotate(-90 10 ${size / 2})">True positive rate</text>`);
  parts.push("</svg>");
  return parts.join("");
}
