"""File-backed store for datasets and detection jobs.

Datasets are keyed by content hash, so re-uploading the same CSV yields
the same id and nothing is duplicated.  Jobs live in their own directory
with a status record plus the result files.  All record mutations go
through one lock; job execution only ever reads datasets.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from hashlib import sha256
from pathlib import Path
from typing import Optional

from .errors import DataError

STATUS_QUEUED = "queued"
STATUS_RUNNING = "running"
STATUS_DONE = "done"
STATUS_FAILED = "failed"

_TRANSITIONS = {
    STATUS_QUEUED: (STATUS_RUNNING,),
    STATUS_RUNNING: (STATUS_DONE, STATUS_FAILED),
    STATUS_DONE: (),
    STATUS_FAILED: (),
}

DATA_DIR_ENV = "EDS_DATA_DIR"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class JobRecord:
    job_id: str
    dataset_id: str
    config: dict  # config document as submitted, normalized
    status: str = STATUS_QUEUED
    created_at: str = field(default_factory=_now)
    finished_at: Optional[str] = None
    error: Optional[str] = None
    diagnostics: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "jobId": self.job_id,
            "datasetId": self.dataset_id,
            "config": self.config,
            "status": self.status,
            "createdAt": self.created_at,
            "finishedAt": self.finished_at,
            "error": self.error,
            "diagnostics": self.diagnostics,
        }

    @staticmethod
    def from_json(doc: dict) -> "JobRecord":
        return JobRecord(
            job_id=doc["jobId"],
            dataset_id=doc["datasetId"],
            config=doc["config"],
            status=doc["status"],
            created_at=doc["createdAt"],
            finished_at=doc.get("finishedAt"),
            error=doc.get("error"),
            diagnostics=list(doc.get("diagnostics", [])),
        )


class DataStore:
    """Datasets under datasets/, one directory per job under jobs/."""

    def __init__(self, root: Optional[str] = None):
        root = root or os.environ.get(DATA_DIR_ENV) or "eventwatch-data"
        self.root = Path(root)
        (self.root / "datasets").mkdir(parents=True, exist_ok=True)
        (self.root / "jobs").mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    # datasets

    def dataset_path(self, dataset_id: str) -> Path:
        return self.root / "datasets" / f"{dataset_id}.csv"

    def save_dataset(self, csv_text: str) -> str:
        dataset_id = sha256(csv_text.encode("utf-8")).hexdigest()[:16]
        path = self.dataset_path(dataset_id)
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_text(csv_text, encoding="utf-8")
            tmp.replace(path)
        return dataset_id

    def has_dataset(self, dataset_id: str) -> bool:
        return self.dataset_path(dataset_id).exists()

    def load_dataset(self, dataset_id: str) -> str:
        path = self.dataset_path(dataset_id)
        if not path.exists():
            raise DataError(f"unknown dataset {dataset_id!r}")
        return path.read_text(encoding="utf-8")

    # jobs

    def job_dir(self, job_id: str) -> Path:
        return self.root / "jobs" / job_id

    def create_job(self, dataset_id: str, config_doc: dict) -> JobRecord:
        record = JobRecord(job_id=uuid.uuid4().hex[:12], dataset_id=dataset_id, config=config_doc)
        with self._lock:
            self.job_dir(record.job_id).mkdir(parents=True)
            self._write_record(record)
        return record

    def get_job(self, job_id: str) -> JobRecord:
        path = self.job_dir(job_id) / "record.json"
        with self._lock:
            if not path.exists():
                raise DataError(f"unknown job {job_id!r}")
            return JobRecord.from_json(json.loads(path.read_text(encoding="utf-8")))

    def transition(self, job_id: str, status: str, error: Optional[str] = None, diagnostics=None) -> JobRecord:
        with self._lock:
            path = self.job_dir(job_id) / "record.json"
            if not path.exists():
                raise DataError(f"unknown job {job_id!r}")
            record = JobRecord.from_json(json.loads(path.read_text(encoding="utf-8")))
            if status not in _TRANSITIONS[record.status]:
                raise DataError(f"job {job_id} cannot move {record.status} -> {status}")
            record.status = status
            if status in (STATUS_DONE, STATUS_FAILED):
                record.finished_at = _now()
            if error is not None:
                record.error = error
            if diagnostics is not None:
                record.diagnostics = list(diagnostics)
            self._write_record(record)
            return record

    def _write_record(self, record: JobRecord) -> None:
        path = self.job_dir(record.job_id) / "record.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(record.to_json(), indent=2), encoding="utf-8")
        tmp.replace(path)

    def write_job_file(self, job_id: str, name: str, text: str) -> None:
        path = self.job_dir(job_id) / name
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)

    def read_job_file(self, job_id: str, name: str) -> str:
        path = self.job_dir(job_id) / name
        if not path.exists():
            raise DataError(f"job {job_id} has no file {name}")
        return path.read_text(encoding="utf-8")
