// Typed client for the detection service JSON API. Every number shown in
// the console comes through here; nothing is recomputed client-side.

export interface FieldError {
  field: string;
  message: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly errors: FieldError[];

  constructor(status: number, errors: FieldError[]) {
    super(errors.map((e) => `${e.field}: ${e.message}`).join("; ") || `HTTP ${status}`);
    this.name = "ApiError";
    this.status = status;
    this.errors = errors;
  }
}

export interface UploadResponse {
  datasetId: string;
  rowCount: number;
  columnNames: string[];
  timeName: string;
  hasEventLabels: boolean;
}

export interface PreviewColumn {
  name: string;
  role: string;
  missingCount: number;
}

export interface PreviewResponse {
  datasetId: string;
  rowCount: number;
  previewRows: number;
  timeName: string;
  timestamps: string[];
  columns: PreviewColumn[];
  values: Record<string, Array<number | null>>;
  eventLabels: boolean[] | null;
}

export interface ModelSpecEcho {
  kind: string;
  maxP: number;
  dChoices: number[];
  includeIntercept: boolean;
  gridStep: number;
  hiddenUnits: number;
  epochs: number;
  learningRate: number;
  seed: number;
}

export interface ConfigEcho {
  windowSize: number;
  nIterationsRefit: number;
  nStandardDeviations: number;
  eventThreshold: number;
  bedWindowSize: number;
  trialSuccessProb: number;
  robustTraining: boolean;
  modelSpec: ModelSpecEcho;
  preprocessors: Array<Record<string, unknown>>;
  absoluteThresholds: Record<string, number> | null;
}

export type JobStatus = "queued" | "running" | "done" | "failed";

export interface JobDoc {
  jobId: string;
  datasetId: string;
  status: JobStatus;
  config: ConfigEcho;
  diagnostics: string[];
  error: string | null;
  createdAt: string;
  finishedAt: string | null;
}

export interface ResultRecord {
  index: number;
  timestamp: string;
  residuals: Record<string, number | null>;
  outliers: Record<string, boolean>;
  isOutlier: boolean;
  eventProbability: number;
  label: string;
}

export interface ResultsPage {
  jobId: string;
  page: number;
  pageSize: number;
  totalRows: number;
  qualityColumns: string[];
  records: ResultRecord[];
}

export interface ConfusionCounts {
  tp: number;
  fp: number;
  fn: number;
  tn: number;
  positives: number;
  negatives: number;
}

export interface MetricsResponse {
  jobId: string;
  rowsEvaluated: number;
  confusionMatrix: ConfusionCounts;
  accuracy: number | null;
  sensitivity: number | null;
  specificity: number | null;
  fpr: number | null;
}

export interface RocPoint {
  threshold: number;
  fpr: number;
  tpr: number;
}

export interface RocResponse {
  jobId: string;
  auc: number | null;
  points: RocPoint[];
}

export interface EventRequest {
  shape: string;
  columns: string[];
  start: number;
  duration: number;
  strength: number;
  period?: number;
}

export interface SimulateResponse {
  datasetId: string;
  rowCount: number;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function extractErrors(response: Response): Promise<FieldError[]> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (Array.isArray(body.detail)) {
      return body.detail
        .filter((d): d is FieldError => typeof d === "object" && d !== null)
        .map((d) => ({ field: String(d.field ?? ""), message: String(d.message ?? "") }));
    }
    if (typeof body.detail === "string") {
      return [{ field: "", message: body.detail }];
    }
  } catch {
    // non-JSON error body; fall through
  }
  return [{ field: "", message: `HTTP ${response.status}` }];
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async requestJson<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await extractErrors(response));
    }
    return (await response.json()) as T;
  }

  private async requestText(path: string): Promise<string> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      throw new ApiError(response.status, await extractErrors(response));
    }
    return response.text();
  }

  uploadDataset(csvText: string): Promise<UploadResponse> {
    return this.requestJson("/api/datasets", {
      method: "POST",
      headers: { "content-type": "text/csv" },
      body: csvText,
    });
  }

  previewDataset(datasetId: string, rows = 200): Promise<PreviewResponse> {
    return this.requestJson(`/api/datasets/${datasetId}/preview?rows=${rows}`);
  }

  datasetCsv(datasetId: string): Promise<string> {
    return this.requestText(`/api/datasets/${datasetId}/csv`);
  }

  submitJob(datasetId: string, config: Record<string, unknown>): Promise<{ jobId: string; status: JobStatus }> {
    return this.requestJson("/api/jobs", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ datasetId, config }),
    });
  }

  getJob(jobId: string): Promise<JobDoc> {
    return this.requestJson(`/api/jobs/${jobId}`);
  }

  getResultsPage(jobId: string, page = 1, pageSize = 100): Promise<ResultsPage> {
    return this.requestJson(`/api/jobs/${jobId}/results?page=${page}&pageSize=${pageSize}`);
  }

  resultsCsv(jobId: string): Promise<string> {
    return this.requestText(`/api/jobs/${jobId}/results.csv`);
  }

  getMetrics(jobId: string, includeWarmup = false): Promise<MetricsResponse> {
    const query = includeWarmup ? "?includeWarmup=true" : "";
    return this.requestJson(`/api/jobs/${jobId}/metrics${query}`);
  }

  getRoc(jobId: string, includeWarmup = false): Promise<RocResponse> {
    const query = includeWarmup ? "?includeWarmup=true" : "";
    return this.requestJson(`/api/jobs/${jobId}/roc${query}`);
  }

  simulate(datasetId: string, events: EventRequest[]): Promise<SimulateResponse> {
    return this.requestJson("/api/simulate", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ datasetId, events }),
    });
  }
}
