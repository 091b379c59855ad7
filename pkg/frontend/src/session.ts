// Console session state. One active poll loop; results, metrics, and ROC
// are rendered only after they are fetched, never from local predictions.

import {
  ApiClient,
  type JobDoc,
  type MetricsResponse,
  type PreviewResponse,
  type ResultsPage,
  type RocResponse,
  type UploadResponse,
} from "./api.js";
import {
  DEFAULT_DRAFT,
  draftFromEcho,
  hasErrors,
  submitPayload,
  validateDraft,
  type ConfigDraft,
  type DraftIssue,
} from "./config.js";
import type { ComparisonSlot } from "./views.js";

export const MAX_COMPARISONS = 3;

export interface SessionState {
  datasetId: string | null;
  upload: UploadResponse | null;
  preview: PreviewResponse | null;
  draft: ConfigDraft;
  draftIssues: DraftIssue[];
  activeJobId: string | null;
  job: JobDoc | null;
  results: ResultsPage | null;
  metrics: MetricsResponse | null;
  roc: RocResponse | null;
  comparisons: ComparisonSlot[];
  lastError: unknown;
  busy: boolean;
}

export type Sleeper = (ms: number) => Promise<void>;

const realSleep: Sleeper = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

export class ConsoleSession {
  readonly state: SessionState;
  private readonly api: ApiClient;
  private readonly onChange: (state: SessionState) => void;
  private readonly sleep: Sleeper;
  private readonly pollMs: number;
  private pollGeneration = 0;

  constructor(
    api: ApiClient,
    onChange: (state: SessionState) => void = () => {},
    sleep: Sleeper = realSleep,
    pollMs = 300,
  ) {
    this.api = api;
    this.onChange = onChange;
    this.sleep = sleep;
    this.pollMs = pollMs;
    this.state = {
      datasetId: null,
      upload: null,
      preview: null,
      draft: { ...DEFAULT_DRAFT },
      draftIssues: [],
      activeJobId: null,
      job: null,
      results: null,
      metrics: null,
      roc: null,
      comparisons: [],
      lastError: null,
      busy: false,
    };
  }

  private emit(): void {
    this.onChange(this.state);
  }

  setDraft(patch: Partial<ConfigDraft>): DraftIssue[] {
    Object.assign(this.state.draft, patch);
    this.state.draftIssues = validateDraft(this.state.draft);
    this.emit();
    return this.state.draftIssues;
  }

  adoptJobConfig(job: JobDoc): void {
    this.state.draft = draftFromEcho(job.config);
    this.state.draftIssues = validateDraft(this.state.draft);
    this.emit();
  }

  async uploadCsv(csvText: string, previewRows = 200): Promise<boolean> {
    this.state.lastError = null;
    this.state.busy = true;
    this.emit();
    try {
      const upload = await this.api.uploadDataset(csvText);
      this.state.upload = upload;
      this.state.datasetId = upload.datasetId;
      this.state.preview = await this.api.previewDataset(upload.datasetId, previewRows);
      return true;
    } catch (error) {
      // stay on the upload screen with the server complaint inline
      this.state.lastError = error;
      return false;
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  async runDraft(): Promise<boolean> {
    if (!this.state.datasetId) {
      this.state.lastError = new Error("no dataset selected");
      this.emit();
      return false;
    }
    this.state.draftIssues = validateDraft(this.state.draft);
    if (hasErrors(this.state.draftIssues)) {
      this.emit();
      return false;
    }
    this.state.lastError = null;
    this.state.busy = true;
    this.state.job = null;
    this.state.results = null;
    this.state.metrics = null;
    this.state.roc = null;
    this.emit();

    const generation = ++this.pollGeneration;
    try {
      const submitted = await this.api.submitJob(this.state.datasetId, submitPayload(this.state.draft));
      this.state.activeJobId = submitted.jobId;
      let job = await this.api.getJob(submitted.jobId);
      this.state.job = job;
      this.emit();
      while (job.status === "queued" || job.status === "running") {
        await this.sleep(this.pollMs);
        if (generation !== this.pollGeneration) return false; // superseded
        job = await this.api.getJob(submitted.jobId);
        this.state.job = job;
        this.emit();
      }
      if (job.status !== "done") {
        return false;
      }
      this.state.results = await this.api.getResultsPage(job.jobId, 1);
      const labeled = this.state.upload?.hasEventLabels ?? false;
      if (labeled) {
        this.state.metrics = await this.api.getMetrics(job.jobId);
        this.state.roc = await this.api.getRoc(job.jobId);
      }
      this.pushComparison(job, this.state.metrics);
      return true;
    } catch (error) {
      this.state.lastError = error;
      return false;
    } finally {
      if (generation === this.pollGeneration) {
        this.state.busy = false;
      }
      this.emit();
    }
  }

  private pushComparison(job: JobDoc, metrics: MetricsResponse | null): void {
    this.state.comparisons.push({
      jobId: job.jobId,
      eventThreshold: job.config.eventThreshold,
      metrics,
    });
    while (this.state.comparisons.length > MAX_COMPARISONS) {
      this.state.comparisons.shift();
    }
  }

  async loadResultsPage(page: number, pageSize = 100): Promise<void> {
    if (!this.state.activeJobId) return;
    try {
      this.state.results = await this.api.getResultsPage(this.state.activeJobId, page, pageSize);
    } catch (error) {
      this.state.lastError = error;
    }
    this.emit();
  }
}
