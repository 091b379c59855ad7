"""Command-line interface: detect, simulate, evaluate, roc, serve.

Exit codes: 1 for configuration problems, 2 for unusable data, 3 for
unexpected runtime failures.  Every failure prints exactly one line to
stderr of the form "eventwatch: error: <category>: <message>".
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from .config import build_detector_config, load_config_file
from .detector import detect_events
from .errors import ConfigError, DataError
from .evaluate import confusion_matrix, metrics_report, roc_csv, roc_curve, summary_stats
from .frame import CsvOptions, emit_csv, parse_csv, select_columns
from .plots import roc_svg, series_svg
from .simulate import EventSpec, inject_events, resolve_shape
from .store import DataStore


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; flag misuse is a config error
        raise ConfigError(message)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _time_column(value):
    if value is None:
        return None
    return int(value) if value.isdigit() else value


def _load_frame(args, options: dict, select: bool = True):
    text = _read_text(args.input)
    time_column = _time_column(args.time_column) if args.time_column is not None else options.get("timeColumn")
    label_column = args.label_column or options.get("labelColumn")
    frame = parse_csv(
        text,
        CsvOptions(
            time_column=0 if time_column is None else time_column,
            label_column="EVENT" if label_column is None else label_column,
        ),
    )
    if not select:
        return frame
    columns = options.get("columns")
    if getattr(args, "columns", None):
        columns = [c.strip() for c in args.columns.split(",") if c.strip()]
    if columns:
        frame = select_columns(frame, columns)
    return frame


def _detect_doc(args) -> dict:
    doc = load_config_file(args.config) if args.config else {}
    overrides = {
        "model": args.model,
        "windowSize": args.window_size,
        "nIterationsRefit": args.refit_every,
        "nStandardDeviations": args.n_sd,
        "eventThreshold": args.event_threshold,
        "bedWindowSize": args.bed_window,
        "trialSuccessProb": args.trial_prob,
        "robustTraining": args.robust_training,
        "seed": args.seed,
        "maxP": args.max_p,
    }
    if args.preprocessors:
        overrides["preprocessors"] = [p.strip() for p in args.preprocessors.split(",") if p.strip()]
    doc.update({k: v for k, v in overrides.items() if v is not None})
    return doc


def _metrics_doc(cm, stats) -> dict:
    return {
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


def cmd_detect(args) -> int:
    config, options = build_detector_config(_detect_doc(args))
    frame = _load_frame(args, options)
    result = detect_events(frame, config)
    out = Path(args.out)
    _write_text(out / "results.csv", result.to_csv())
    _write_text(out / "results.json", json.dumps(result.to_json_doc(), indent=2))
    _write_text(out / "series.svg", series_svg(frame, result.predicted_events()))
    written = ["results.csv", "results.json", "series.svg"]
    if frame.event_labels is not None:
        mask = None if args.include_warmup else ~result.warmup_mask()
        cm = confusion_matrix(result.predicted_events(), frame.event_labels, mask)
        stats = summary_stats(cm)
        _write_text(out / "metrics.json", json.dumps(_metrics_doc(cm, stats), indent=2))
        _write_text(out / "metrics.txt", metrics_report(cm))
        written += ["metrics.json", "metrics.txt"]
    events = int(result.predicted_events().sum())
    print(f"detected {events} event rows over {len(frame)} rows; wrote {', '.join(written)} to {out}")
    for line in result.diagnostics:
        print(f"note: {line}")
    return 0


def cmd_simulate(args) -> int:
    frame = _load_frame(args, {}, select=False)
    spec = EventSpec(
        shape=resolve_shape(args.shape),
        columns=tuple(c.strip() for c in args.columns.split(",") if c.strip()),
        start=args.start,
        duration=args.duration,
        strength=args.strength,
        period=args.period,
    )
    injected = inject_events(frame, [spec], seed=args.seed)
    _write_text(Path(args.out), emit_csv(injected))
    print(f"injected {args.shape} event on rows [{args.start}, {args.start + args.duration}) -> {args.out}")
    return 0


def _read_results_csv(path: str) -> tuple:
    """Returns (probabilities, predicted, warmup) from a detect results file."""
    text = _read_text(path)
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or "eventProbability" not in reader.fieldnames or "label" not in reader.fieldnames:
        raise DataError(f"{path} is not a detect results file (eventProbability/label columns missing)")
    probabilities, predicted, warmup = [], [], []
    for row in reader:
        value = row["eventProbability"]
        probabilities.append(float(value) if value else math.nan)
        predicted.append(row["label"] == "Event")
        warmup.append(row["label"] == "Warmup")
    if not probabilities:
        raise DataError(f"{path} contains no rows")
    return probabilities, predicted, warmup


def _truth_labels(args, n: int):
    frame = _load_frame(args, {})
    if frame.event_labels is None:
        raise DataError(f"{args.input} has no event label column")
    if len(frame) != n:
        raise DataError(f"results cover {n} rows but {args.input} has {len(frame)}")
    return frame.event_labels


def cmd_evaluate(args) -> int:
    probabilities, predicted, warmup = _read_results_csv(args.results)
    labels = _truth_labels(args, len(predicted))
    mask = None if args.include_warmup else [not w for w in warmup]
    cm = confusion_matrix(predicted, labels, mask)
    stats = summary_stats(cm)
    print(metrics_report(cm), end="")
    if args.out:
        _write_text(Path(args.out), json.dumps(_metrics_doc(cm, stats), indent=2))
        print(f"wrote {args.out}")
    return 0


def cmd_roc(args) -> int:
    probabilities, predicted, warmup = _read_results_csv(args.results)
    labels = _truth_labels(args, len(probabilities))
    mask = None if args.include_warmup else [not w for w in warmup]
    for p, m in zip(probabilities, mask if mask is not None else [True] * len(probabilities)):
        if m and math.isnan(p):
            raise DataError("results contain rows without an event probability")
    probabilities = [0.0 if math.isnan(p) else p for p in probabilities]
    curve = roc_curve(probabilities, labels, mask)
    out = Path(args.out)
    _write_text(out / "roc.csv", roc_csv(curve))
    _write_text(out / "roc.svg", roc_svg(curve))
    auc = "undefined" if curve.auc is None else format(curve.auc, ".6f")
    print(f"AUC {auc}; wrote roc.csv, roc.svg to {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    console = Path(args.console).resolve() if args.console else None
    if console is not None and not console.is_dir():
        raise ConfigError(f"console directory not found: {console}")
    store = DataStore(args.data_dir)
    app = create_app(store, workers=args.workers, console_dir=console)
    print(f"serving on http://{args.host}:{args.port} (data dir: {store.root})")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eventwatch", description="Sliding-window event detection for sensor time series")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input_flags(p):
        p.add_argument("--input", required=True, help="input CSV file")
        p.add_argument("--time-column", help="time column name or index (default: first column)")
        p.add_argument("--label-column", help="ground-truth column name (default: EVENT)")

    p = sub.add_parser("detect", help="run the detector over a CSV file")
    add_input_flags(p)
    p.add_argument("--columns", help="comma-separated quality columns (default: all value columns)")
    p.add_argument("--config", help="JSON config file; flags override file values")
    p.add_argument("--model", help="forecast model name, e.g. ForecastArima")
    p.add_argument("--window-size", type=int)
    p.add_argument("--refit-every", type=int, help="forecast horizon and window step")
    p.add_argument("--n-sd", type=float, help="residual threshold multiplier")
    p.add_argument("--event-threshold", type=float)
    p.add_argument("--bed-window", type=int)
    p.add_argument("--trial-prob", type=float)
    p.add_argument("--max-p", type=int, help="AR order bound for ForecastArima")
    p.add_argument("--seed", type=int, help="weight seed for NeuralNetwork")
    p.add_argument("--preprocessors", help="comma-separated preprocessor names")
    p.add_argument("--robust-training", action=argparse.BooleanOptionalAction, default=None,
                   help="hold flagged rows out of model training (default on)")
    p.add_argument("--include-warmup", action="store_true", help="score warmup rows as predicted normal")
    p.add_argument("--out", default="eventwatch-out", help="output directory")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("simulate", help="inject a synthetic event into a CSV file")
    add_input_flags(p)
    p.add_argument("--shape", required=True, help="square, ramp, sinusoidal, or slowsinusoidal")
    p.add_argument("--columns", required=True, help="comma-separated target columns")
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--duration", type=int, required=True)
    p.add_argument("--strength", type=float, required=True)
    p.add_argument("--period", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output CSV file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="score detect results against labeled data")
    add_input_flags(p)
    p.add_argument("--results", required=True, help="results.csv from a detect run")
    p.add_argument("--include-warmup", action="store_true")
    p.add_argument("--out", help="also write metrics JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("roc", help="threshold sweep over detect results")
    add_input_flags(p)
    p.add_argument("--results", required=True, help="results.csv from a detect run")
    p.add_argument("--include-warmup", action="store_true")
    p.add_argument("--out", default="eventwatch-out", help="output directory")
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", help="dataset/job store root (default: $EDS_DATA_DIR or ./eventwatch-data)")
    p.add_argument("--workers", type=int, help="job worker threads (default: machine parallelism)")
    p.add_argument("--console", metavar="DIR", help="serve this static directory at the site root")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"eventwatch: error: config: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"eventwatch: error: data: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("eventwatch: error: runtime: interrupted", file=sys.stderr)
        return 3
    except Exception as exc:  # anything else is a runtime failure, never a traceback
        print(f"eventwatch: error: runtime: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
