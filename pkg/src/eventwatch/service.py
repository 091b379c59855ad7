"""HTTP surface over the detection engine.

Uploads are raw CSV request bodies; everything else is JSON with camelCase
field names.  Jobs run on a bounded thread pool and are polled by id.
Validation failures carry field-level messages: 400 for malformed requests,
404 for unknown ids, 409 for results requested before a job finished, 422
for semantically invalid values.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, HTTPException, Request, Response

from .config import build_detector_config
from .detector import config_echo, detect_events
from .errors import ConfigError, DataError
from .evaluate import confusion_matrix, roc_curve, summary_stats
from .frame import CsvOptions, emit_csv, format_timestamp, parse_csv, select_columns
from .simulate import EventSpec, inject_events, resolve_shape
from .store import STATUS_DONE, STATUS_FAILED, STATUS_QUEUED, STATUS_RUNNING, DataStore


def _error(status: int, field: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail=[{"field": field, "message": message}])


def _csv_options(options: dict) -> CsvOptions:
    time_column = options.get("timeColumn")
    label_column = options.get("labelColumn")
    return CsvOptions(
        time_column=0 if time_column is None else time_column,
        label_column="EVENT" if label_column is None else label_column,
    )


def _load_frame(store: DataStore, dataset_id: str, options: dict):
    frame = parse_csv(store.load_dataset(dataset_id), _csv_options(options))
    columns = options.get("columns")
    if columns:
        frame = select_columns(frame, columns)
    return frame


def run_job(store: DataStore, job_id: str) -> None:
    """Worker body: read the stored inputs, detect, persist the outputs."""
    record = store.transition(job_id, STATUS_RUNNING)
    try:
        config, options = build_detector_config(record.config)
        frame = _load_frame(store, record.dataset_id, options)
        result = detect_events(frame, config)
        store.write_job_file(job_id, "results.csv", result.to_csv())
        store.write_job_file(job_id, "results.json", json.dumps(result.to_json_doc()))
        store.transition(job_id, STATUS_DONE, diagnostics=result.diagnostics)
    except Exception as exc:  # a failed job must surface, not hang
        store.transition(job_id, STATUS_FAILED, error=f"{type(exc).__name__}: {exc}")


def create_app(
    store: Optional[DataStore] = None,
    workers: Optional[int] = None,
    console_dir: Optional[Union[str, Path]] = None,
) -> FastAPI:
    """Build the service; workers defaults to the machine's parallelism.

    When console_dir is given, its files are served at the site root so a
    browser console can share the API's origin.  API routes keep priority.
    """

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        app.state.executor.shutdown(wait=True, cancel_futures=True)

    app = FastAPI(title="eventwatch", lifespan=lifespan)
    app.state.store = store or DataStore()
    app.state.executor = ThreadPoolExecutor(max_workers=workers or os.cpu_count() or 2)

    def _store() -> DataStore:
        return app.state.store

    def _get_record(job_id: str):
        try:
            return _store().get_job(job_id)
        except DataError as exc:
            raise _error(404, "jobId", str(exc)) from None

    def _require_done(job_id: str):
        record = _get_record(job_id)
        if record.status == STATUS_FAILED:
            raise _error(409, "status", f"job failed: {record.error}")
        if record.status != STATUS_DONE:
            raise _error(409, "status", f"job is {record.status}")
        return record

    @app.post("/api/datasets", status_code=201)
    async def upload_dataset(request: Request):
        text = (await request.body()).decode("utf-8", errors="replace")
        if not text.strip():
            raise _error(400, "body", "empty upload; send the CSV as the request body")
        try:
            frame = parse_csv(text)
        except DataError as exc:
            raise _error(400, "body", str(exc)) from None
        dataset_id = _store().save_dataset(text)
        return {
            "datasetId": dataset_id,
            "rowCount": len(frame),
            "columnNames": list(frame.column_names),
            "timeName": frame.time_name,
            "hasEventLabels": frame.event_labels is not None,
        }

    @app.get("/api/datasets/{dataset_id}/preview")
    async def preview_dataset(dataset_id: str, rows: int = 100):
        if rows < 1:
            raise _error(422, "rows", "preview rows must be >= 1")
        try:
            frame = parse_csv(_store().load_dataset(dataset_id))
        except DataError as exc:
            raise _error(404, "datasetId", str(exc)) from None
        k = min(rows, len(frame))
        values = {}
        missing = {}
        for name in frame.column_names:
            col = frame.values(name)
            missing[name] = int(sum(1 for v in col if v != v))
            values[name] = [None if v != v else float(v) for v in col[:k]]
        return {
            "datasetId": dataset_id,
            "rowCount": len(frame),
            "previewRows": k,
            "timeName": frame.time_name,
            "columns": [
                {"name": name, "role": frame.column_roles[name], "missingCount": missing[name]}
                for name in frame.column_names
            ],
            "timestamps": [format_timestamp(t) for t in frame.timestamps[:k]],
            "values": values,
            "eventLabels": (
                [bool(v) for v in frame.event_labels[:k]] if frame.event_labels is not None else None
            ),
        }

    @app.get("/api/datasets/{dataset_id}/csv")
    async def download_dataset(dataset_id: str):
        try:
            text = _store().load_dataset(dataset_id)
        except DataError as exc:
            raise _error(404, "datasetId", str(exc)) from None
        return Response(content=text, media_type="text/csv")

    @app.post("/api/jobs", status_code=202)
    async def submit_job(request: Request):
        try:
            body = json.loads((await request.body()).decode("utf-8") or "{}")
        except json.JSONDecodeError as exc:
            raise _error(400, "body", f"request body is not valid JSON: {exc}") from None
        if not isinstance(body, dict):
            raise _error(400, "body", "request body must be a JSON object")
        dataset_id = body.get("datasetId")
        if not isinstance(dataset_id, str) or not dataset_id:
            raise _error(400, "datasetId", "datasetId is required")
        config_doc = body.get("config", {})
        if not isinstance(config_doc, dict):
            raise _error(400, "config", "config must be a JSON object")
        if not _store().has_dataset(dataset_id):
            raise _error(404, "datasetId", f"unknown dataset {dataset_id!r}")
        try:
            config, options = build_detector_config(config_doc)
        except ConfigError as exc:
            raise _error(422, getattr(exc, "field", "config"), str(exc)) from None
        if options["columns"]:
            header = _dataset_header(_store().load_dataset(dataset_id))
            unknown = [c for c in options["columns"] if c not in header]
            if unknown:
                raise _error(422, "columns", f"unknown columns: {unknown}")
        stored = config_echo(config)
        stored.update({k: v for k, v in options.items() if v is not None})
        record = _store().create_job(dataset_id, stored)
        app.state.executor.submit(run_job, _store(), record.job_id)
        return {"jobId": record.job_id, "status": STATUS_QUEUED}

    @app.get("/api/jobs/{job_id}")
    async def job_status(job_id: str):
        return _get_record(job_id).to_json()

    @app.get("/api/jobs/{job_id}/results")
    async def job_results(job_id: str, page: int = 1, pageSize: int = 1000):
        if page < 1 or pageSize < 1:
            raise _error(422, "page", "page and pageSize must be >= 1")
        _require_done(job_id)
        doc = json.loads(_store().read_job_file(job_id, "results.json"))
        records = doc["records"]
        start = (page - 1) * pageSize
        return {
            "jobId": job_id,
            "page": page,
            "pageSize": pageSize,
            "totalRows": len(records),
            "qualityColumns": doc["qualityColumns"],
            "records": records[start : start + pageSize],
        }

    @app.get("/api/jobs/{job_id}/results.csv")
    async def job_results_csv(job_id: str):
        _require_done(job_id)
        return Response(content=_store().read_job_file(job_id, "results.csv"), media_type="text/csv")

    @app.get("/api/jobs/{job_id}/metrics")
    async def job_metrics(job_id: str, includeWarmup: bool = False):
        record = _require_done(job_id)
        predicted, probabilities, warmup, labels = _scores(record, job_id)
        if labels is None:
            raise _error(422, "datasetId", "dataset has no event labels to score against")
        mask = None if includeWarmup else [not w for w in warmup]
        cm = confusion_matrix(predicted, labels, mask)
        stats = summary_stats(cm)
        return {
            "jobId": job_id,
            "confusionMatrix": {
                "tp": cm.tp,
                "fp": cm.fp,
                "fn": cm.fn,
                "tn": cm.tn,
                "positives": cm.positives,
                "negatives": cm.negatives,
            },
            "rowsEvaluated": cm.total,
            **stats,
        }

    @app.get("/api/jobs/{job_id}/roc")
    async def job_roc(job_id: str, includeWarmup: bool = False):
        record = _require_done(job_id)
        predicted, probabilities, warmup, labels = _scores(record, job_id)
        if labels is None:
            raise _error(422, "datasetId", "dataset has no event labels to score against")
        mask = None if includeWarmup else [not w for w in warmup]
        curve = roc_curve(probabilities, labels, mask)
        return {
            "jobId": job_id,
            "auc": curve.auc,
            "points": [{"threshold": t, "fpr": f, "tpr": r} for t, f, r in curve.points],
        }

    def _scores(record, job_id: str):
        doc = json.loads(_store().read_job_file(job_id, "results.json"))
        records = doc["records"]
        predicted = [r["label"] == "Event" for r in records]
        probabilities = [r["eventProbability"] for r in records]
        warmup = [r["label"] == "Warmup" for r in records]
        _, options = build_detector_config(record.config)
        frame = _load_frame(_store(), record.dataset_id, options)
        labels = list(frame.event_labels) if frame.event_labels is not None else None
        return predicted, probabilities, warmup, labels

    @app.post("/api/simulate", status_code=201)
    async def simulate(request: Request):
        try:
            body = json.loads((await request.body()).decode("utf-8") or "{}")
        except json.JSONDecodeError as exc:
            raise _error(400, "body", f"request body is not valid JSON: {exc}") from None
        dataset_id = body.get("datasetId")
        if not isinstance(dataset_id, str) or not dataset_id:
            raise _error(400, "datasetId", "datasetId is required")
        events = body.get("events")
        if not isinstance(events, list) or not events:
            raise _error(400, "events", "events must be a non-empty list")
        try:
            frame = parse_csv(_store().load_dataset(dataset_id))
        except DataError as exc:
            raise _error(404, "datasetId", str(exc)) from None
        specs = []
        for i, entry in enumerate(events):
            field = f"events[{i}]"
            if not isinstance(entry, dict):
                raise _error(422, field, "each event must be an object")
            try:
                columns = entry.get("columns", [])
                if isinstance(columns, str):
                    columns = [c.strip() for c in columns.split(",") if c.strip()]
                specs.append(
                    EventSpec(
                        shape=resolve_shape(entry.get("shape", "")),
                        columns=tuple(columns),
                        start=int(entry.get("start", -1)),
                        duration=int(entry.get("duration", 0)),
                        strength=float(entry.get("strength", 0.0)),
                        period=int(entry["period"]) if entry.get("period") is not None else None,
                    )
                )
            except (ConfigError, TypeError, ValueError) as exc:
                raise _error(422, field, str(exc)) from None
        try:
            injected = inject_events(frame, specs, seed=body.get("seed"))
        except DataError as exc:
            raise _error(422, "events", str(exc)) from None
        new_id = _store().save_dataset(emit_csv(injected))
        return {"datasetId": new_id, "rowCount": len(injected)}

    if console_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # mounted last so every /api route is matched first
        app.mount("/", StaticFiles(directory=console_dir, html=True), name="console")

    return app


def _dataset_header(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    try:
        return [h.strip() for h in next(reader)]
    except StopIteration:
        return []
