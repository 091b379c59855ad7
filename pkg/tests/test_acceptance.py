"""End-to-end acceptance checks.

One test per acceptance criterion; each prints a single
"acceptance: <criterion>: PASS" line when it holds.  Tolerances are fixed
here and must not be loosened to make a run pass.
"""

import json
import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
from fastapi.testclient import TestClient

from eventwatch.detector import DetectorConfig, bed_probability, detect_events
from eventwatch.evaluate import ConfusionMatrix, confusion_matrix, roc_curve, summary_stats
from eventwatch.forecast import ForecastModelSpec, fit, predict
from eventwatch.frame import SeriesFrame, emit_csv, parse_csv
from eventwatch.preprocess import Preprocessor, apply_normalizer, fit_normalizer, impute, invert_normalizer
from eventwatch.service import create_app
from eventwatch.simulate import EventSpec, inject_events
from eventwatch.store import DataStore


def ok(name):
    print(f"acceptance: {name}: PASS")


def benchmark_frame():
    """Synthetic stand-in for the original case study: an order-1
    autoregressive base signal with five labeled square events."""
    rng = np.random.default_rng(42)
    n = 5000
    noise = rng.normal(0.0, 1.0, n)
    x = np.empty(n)
    x[0] = noise[0]
    for t in range(1, n):
        x[t] = 0.6 * x[t - 1] + noise[t]
    clean = SeriesFrame(timestamps=tuple(range(n)), columns={"signal": x})
    specs = [
        EventSpec("Square", ("signal",), start, 50, 8.0)
        for start in (600, 1500, 2400, 3300, 4200)
    ]
    return inject_events(clean, specs)


def case_study_config():
    return DetectorConfig(
        window_size=200,
        n_iterations_refit=5,
        model_spec=ForecastModelSpec(kind="ArimaLite"),
        n_standard_deviations=2.0,
        event_threshold=0.7,
        bed_window_size=10,
    )


def test_bed_probability_exactness():
    start = time.perf_counter()
    half = Fraction(1, 2)
    for n in range(1, 31):
        for r in range(0, n + 1):
            oracle = sum(math.comb(n, i) * half**n for i in range(r + 1))
            assert abs(bed_probability(r, n, 0.5) - float(oracle)) < 1e-12, (r, n)
    elapsed = time.perf_counter() - start
    assert bed_probability(5, 10, 0.5) == 638 / 1024
    assert bed_probability(6, 10, 0.5) == 848 / 1024
    assert elapsed < 1.0, f"oracle sweep took {elapsed:.3f}s"
    ok("bed-probability-exactness")


def test_case_study_metrics_arithmetic():
    stats = summary_stats(ConfusionMatrix(tp=115, fp=1748, fn=29, tn=6749))
    assert abs(stats["sensitivity"] - 0.799) <= 0.001
    assert abs(stats["specificity"] - 0.794) <= 0.001
    ok("case-study-metrics-arithmetic")


def test_synthetic_benchmark():
    frame = benchmark_frame()
    config = case_study_config()
    start = time.perf_counter()
    result = detect_events(frame, config)
    elapsed = time.perf_counter() - start

    mask = ~result.warmup_mask()
    cm = confusion_matrix(result.predicted_events(), frame.event_labels, mask)
    stats = summary_stats(cm)
    assert stats["sensitivity"] >= 0.8, f"sensitivity {stats['sensitivity']:.4f}"
    assert stats["fpr"] <= 0.05, f"fpr {stats['fpr']:.4f}"
    assert elapsed < 30.0, f"run took {elapsed:.1f}s"

    again = detect_events(frame, config)
    assert result.to_csv() == again.to_csv()
    ok(
        "synthetic-benchmark "
        f"(sensitivity {stats['sensitivity']:.3f}, fpr {stats['fpr']:.4f}, {elapsed:.1f}s)"
    )


def test_invariant_suites():
    rng = np.random.default_rng(21)

    # forecast translation consistency
    y = np.cumsum(rng.normal(0, 1, 40)) + 5.0
    for kind in ("Meanf", "Naive", "Drift", "SES", "Holt", "Theta"):
        spec = ForecastModelSpec(kind=kind)
        base = predict(fit({"y": y}, spec), 5)["y"]
        shifted = predict(fit({"y": y + 1000.0}, spec), 5)["y"]
        assert np.max(np.abs(shifted - (base + 1000.0))) < 1e-9, kind

    # autoregression degenerations
    data = rng.normal(3, 2, 60)
    meanf_like = ForecastModelSpec(kind="ArimaLite", max_p=0, d_choices=(0,))
    assert np.max(np.abs(
        predict(fit({"y": data}, meanf_like), 4)["y"]
        - predict(fit({"y": data}, ForecastModelSpec(kind="Meanf")), 4)["y"]
    )) < 1e-10
    walk = np.cumsum(rng.normal(0, 1, 60))
    naive_like = ForecastModelSpec(kind="ArimaLite", max_p=0, d_choices=(1,), include_intercept=False)
    assert np.max(np.abs(
        predict(fit({"y": walk}, naive_like), 4)["y"]
        - predict(fit({"y": walk}, ForecastModelSpec(kind="Naive")), 4)["y"]
    )) < 1e-12

    # normalization round trip
    x = rng.normal(3, 7, 300)
    for method in (Preprocessor(kind="NormalizeZScore"), Preprocessor(kind="NormalizeMinMax")):
        state = fit_normalizer(x, method)
        assert np.max(np.abs(invert_normalizer(apply_normalizer(x, state), state) - x)) < 1e-12

    # imputation idempotence
    holey = rng.normal(0, 1, 50)
    holey[[4, 17, 30, 31]] = np.nan
    for kind in ("ImputeInterpolation", "ImputeLOCF", "ImputeMA", "ImputeMean", "ImputeReplace"):
        once = impute(holey, Preprocessor(kind=kind))
        assert np.array_equal(once, impute(once, Preprocessor(kind=kind)))

    # injection difference is zero outside the event rows
    base = SeriesFrame(timestamps=tuple(range(200)), columns={"A": rng.normal(0, 1, 200)})
    dirty = inject_events(base, [EventSpec("Ramp", ("A",), 60, 30, 4.0)])
    diff = dirty.values("A") - base.values("A")
    assert not diff[:60].any() and not diff[90:].any()

    # ROC anchors: perfect probabilities score exactly 1, random near 0.5
    actual = np.zeros(100, dtype=bool)
    actual[20:40] = True
    assert roc_curve(actual.astype(float), actual).auc == 1.0
    probs = rng.uniform(0, 1, 10_000)
    labels = rng.uniform(0, 1, 10_000) < 0.5
    assert abs(roc_curve(probs, labels).auc - 0.5) < 0.05

    ok("invariant-suites")


def write_benchmark_csv(path):
    path.write_text(emit_csv(benchmark_frame()), encoding="utf-8")


def cli_detect(input_path, out_dir):
    return subprocess.run(
        [
            sys.executable, "-m", "eventwatch", "detect",
            "--input", str(input_path),
            "--model", "ForecastArima",
            "--window-size", "200", "--refit-every", "5",
            "--n-sd", "2", "--event-threshold", "0.7", "--bed-window", "10",
            "--out", str(out_dir),
        ],
        capture_output=True,
        text=True,
    )


def test_cli_determinism(tmp_path):
    data = tmp_path / "benchmark.csv"
    write_benchmark_csv(data)
    for name in ("one", "two"):
        proc = cli_detect(data, tmp_path / name)
        assert proc.returncode == 0, proc.stderr
    first = (tmp_path / "one" / "results.csv").read_bytes()
    second = (tmp_path / "two" / "results.csv").read_bytes()
    assert first == second
    ok("cli-determinism")


def test_cli_service_equivalence(tmp_path):
    data = tmp_path / "benchmark.csv"
    write_benchmark_csv(data)
    proc = cli_detect(data, tmp_path / "cli-out")
    assert proc.returncode == 0, proc.stderr
    cli_bytes = (tmp_path / "cli-out" / "results.csv").read_bytes()

    app = create_app(DataStore(root=str(tmp_path / "data")), workers=1)
    with TestClient(app) as client:
        dataset_id = client.post(
            "/api/datasets", content=data.read_text(encoding="utf-8")
        ).json()["datasetId"]
        config = {
            "model": "ForecastArima",
            "windowSize": 200,
            "nIterationsRefit": 5,
            "nStandardDeviations": 2,
            "eventThreshold": 0.7,
            "bedWindowSize": 10,
        }
        job_id = client.post(
            "/api/jobs", json={"datasetId": dataset_id, "config": config}
        ).json()["jobId"]
        deadline = time.monotonic() + 60
        while time.monotonic() < deadline:
            doc = client.get(f"/api/jobs/{job_id}").json()
            if doc["status"] in ("done", "failed"):
                break
            time.sleep(0.05)
        assert doc["status"] == "done", doc.get("error")
        served = client.get(f"/api/jobs/{job_id}/results.csv").content
    assert served == cli_bytes
    ok("cli-service-equivalence")


GECCO_FILE_ENV = "EDS_GECCO_FILE"
GECCO_QUALITY_COLUMNS = ("Cl", "pH", "Redox", "Leit", "Trueb", "Cl_2")


@pytest.mark.skipif(
    not os.environ.get(GECCO_FILE_ENV),
    reason=f"set {GECCO_FILE_ENV} to the public water-quality CSV to run the stretch check",
)
def test_public_dataset_reproduction():
    path = os.environ[GECCO_FILE_ENV]
    frame = parse_csv(open(path, encoding="utf-8").read())
    missing = [c for c in GECCO_QUALITY_COLUMNS if c not in frame.column_names]
    if missing:
        pytest.skip(f"{path} lacks expected columns {missing}")
    roles = {c: ("quality" if c in GECCO_QUALITY_COLUMNS else "operational") for c in frame.column_names}
    frame = frame.with_roles(roles)
    config = DetectorConfig(
        window_size=1000,
        n_iterations_refit=5,
        model_spec=ForecastModelSpec(kind="ArimaLite"),
        n_standard_deviations=2.0,
        event_threshold=0.7,
        bed_window_size=10,
    )
    result = detect_events(frame, config)
    cm = confusion_matrix(result.predicted_events(), frame.event_labels, ~result.warmup_mask())
    stats = summary_stats(cm)
    assert stats["sensitivity"] >= 0.70, f"sensitivity {stats['sensitivity']:.4f}"
    assert stats["specificity"] >= 0.70, f"specificity {stats['specificity']:.4f}"
    ok(f"public-dataset-reproduction (sensitivity {stats['sensitivity']:.3f}, specificity {stats['specificity']:.3f})")
