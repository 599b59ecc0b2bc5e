"""Command-line batch interface: annotate, canonicalize and evaluate CSV columns."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import evaluation as ev
from .canonical import canonicalize_column
from .inference import DEFAULT_CONFIDENCE_THRESHOLD, InferenceError, annotate_column
from .kb import KBError, bundled_kb_path, read_kb
from .model import MixingProportions, default_params
from .parsing import parse_cell
from .report import REPORT_VERSION, canonical_record, column_record, dumps

log = logging.getLogger("puc")

MODES = ("annotate", "canonicalize", "evaluate")
_CONFIG_TYPES = {"w_regular": float, "w_missing": float, "w_anomalous": float,
                 "anomaly_alphabet_size": int, "confidence_threshold": float,
                 "distance_cutoff": int}
CONFIG_KEYS = tuple(_CONFIG_TYPES)


class CLIError(Exception):
    """Fatal run error; reported as a one-line diagnostic with exit status 1."""


@dataclass
class RunConfig:
    inputs: list[str]
    mode: str = "annotate"
    kb_paths: list[str] = field(default_factory=list)
    columns: list[str] | None = None
    out: str | None = None
    truth: str | None = None
    baseline_reports: list[str] = field(default_factory=list)
    published: str | None = None
    compare: tuple[str, str] | None = None
    figures: str | None = None
    timing: bool = True
    w_regular: float = 0.98
    w_missing: float = 0.01
    w_anomalous: float = 0.01
    anomaly_alphabet_size: int = 128
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD
    distance_cutoff: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise CLIError(f"unknown mode {self.mode!r}")
        try:
            self.mixing = MixingProportions(self.w_regular, self.w_missing, self.w_anomalous)
        except ValueError as exc:
            raise CLIError(f"invalid mixing proportions: {exc}") from None
        if self.anomaly_alphabet_size < 1:
            raise CLIError("anomaly_alphabet_size must be positive")
        if self.mode == "canonicalize" and not self.out:
            raise CLIError("canonicalize mode needs --out")
        if self.mode == "canonicalize" and len(self.inputs) != 1:
            raise CLIError("canonicalize mode takes exactly one CSV")
        if self.mode == "evaluate" and not self.published and not self.truth:
            raise CLIError("evaluate mode needs --truth (or --published)")
        if self.mode != "evaluate" and not self.inputs:
            raise CLIError(f"{self.mode} mode needs at least one CSV")


# -- CSV handling -------------------------------------------------------------

def read_csv(path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise CLIError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise CLIError(f"{path}: no rows")
    header, body = rows[0], rows[1:]
    if not body:
        raise CLIError(f"{path}: no rows")
    width = len(header)
    body = [r + [""] * (width - len(r)) if len(r) < width else r for r in body]
    return header, body


def select_columns(header: list[str], wanted: list[str] | None) -> list[int]:
    if not wanted:
        return list(range(len(header)))
    out = []
    for w in wanted:
        if w in header:
            out.append(header.index(w))
        elif w.lstrip("-").isdigit() and 0 <= int(w) < len(header):
            out.append(int(w))
        else:
            raise CLIError(f"unknown column {w!r}")
    return out


# -- modes --------------------------------------------------------------------

def _load(config: RunConfig):
    paths = config.kb_paths or [bundled_kb_path()]
    try:
        kb = read_kb(*paths)
    except KBError as exc:
        raise CLIError(f"malformed knowledge base: {exc}") from None
    params = default_params(kb, config.mixing, config.anomaly_alphabet_size)
    return kb, params


def _params_record(config: RunConfig) -> dict:
    return {k: getattr(config, k) for k in CONFIG_KEYS}


def _annotate_file(path, config, kb, params):
    header, body = read_csv(path)
    records, parsed = [], {}
    for idx in select_columns(header, config.columns):
        cells = [parse_cell(r[idx]) for r in body]
        start = time.perf_counter()
        try:
            ann = annotate_column(cells, kb, params, config.confidence_threshold,
                                  config.distance_cutoff)
        except InferenceError as exc:
            raise CLIError(f"{path}: column {header[idx]!r}: {exc}") from None
        elapsed = time.perf_counter() - start
        rec = column_record(header[idx], idx, cells, ann)
        if config.timing:
            rec["elapsed_seconds"] = elapsed
        records.append(rec)
        parsed[idx] = (cells, ann)
    return header, body, records, parsed


def _kb_record(kb):
    return {"entries": len(kb), "dimensions": len(kb.dimensions)}


def run_annotate(config: RunConfig) -> dict:
    kb, params = _load(config)
    datasets = []
    figures = []
    for path in config.inputs:
        _, _, records, _ = _annotate_file(path, config, kb, params)
        name = Path(path).stem
        datasets.append({"dataset": name, "path": str(path), "columns": records})
        if config.figures:
            from .plotting import column_figure
            figures += [column_figure(r, config.figures, prefix=f"{name}_") for r in records]
    doc = {"version": REPORT_VERSION, "mode": "annotate", "kb": _kb_record(kb),
           "params": _params_record(config), "datasets": datasets}
    if figures:
        doc["figures"] = figures
    return doc


def _format_value(v: float) -> str:
    return f"{v:.15g}"


def run_canonicalize(config: RunConfig) -> tuple[str, dict]:
    kb, params = _load(config)
    path = config.inputs[0]
    header, body, records, parsed = _annotate_file(path, config, kb, params)
    out_header = list(header)
    out_rows = [list(r) for r in body]
    figures = []
    for rec in records:
        idx = rec["index"]
        cells, ann = parsed[idx]
        col = canonicalize_column(ann, cells, kb)
        rec["canonical"] = canonical_record(col)
        out_header[idx] = f"{header[idx]} ({col.unit})"
        for r, value, tag in zip(out_rows, col.values, col.provenance):
            if value is not None:
                r[idx] = _format_value(value)
            elif tag == "value-missing":
                r[idx] = ""
            # non-convertible rows keep their original text
        if config.figures:
            from .plotting import canonical_figure
            figures.append(canonical_figure(rec["name"], col.unit, col.values,
                                            config.figures, prefix=f"{Path(path).stem}_"))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(out_header)
    writer.writerows(out_rows)
    doc = {"version": REPORT_VERSION, "mode": "canonicalize", "kb": _kb_record(kb),
           "params": _params_record(config),
           "datasets": [{"dataset": Path(path).stem, "path": str(path), "columns": records}]}
    if figures:
        doc["figures"] = figures
    return buf.getvalue(), doc


# -- evaluation ---------------------------------------------------------------

def _read_json(path, what):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CLIError(f"cannot read {what} {path}: {exc}") from None


def _read_report(path):
    doc = _read_json(path, "report")
    if not isinstance(doc, dict) or doc.get("version") != REPORT_VERSION:
        got = doc.get("version") if isinstance(doc, dict) else None
        raise CLIError(f"{path}: report version {got!r} does not match "
                       f"supported version {REPORT_VERSION!r}")
    if doc.get("mode") not in ("annotate", "canonicalize"):
        raise CLIError(f"{path}: not a prediction report")
    return doc


def _index_report(docs):
    out = {}
    for doc in docs:
        for ds in doc["datasets"]:
            for col in ds["columns"]:
                out[(ds["dataset"], col["name"])] = col
    return out


def score_predictions(pred_docs, truth) -> dict:
    """Score prediction reports against a ground-truth document."""
    index = _index_report(pred_docs)
    pred_dims, true_dims, col_keys = [], [], []
    per_dataset = {}
    for ds in truth:
        name = ds["dataset"]
        pred_rows, true_rows = [], []
        for col in ds["columns"]:
            key = (name, col["column"])
            if key not in index:
                raise CLIError(f"no prediction for dataset {name!r} column {col['column']!r}")
            pcol = index[key]
            col_keys.append(key)
            pred_dims.append(pcol["dimension"])
            true_dims.append(col["dimension"])
            trows = col.get("rows") or []
            if trows:
                if len(trows) != len(pcol["rows"]):
                    raise CLIError(f"{name}/{col['column']}: {len(pcol['rows'])} predicted "
                                   f"rows vs {len(trows)} true rows")
                pred_rows += [(r["value"], r["unit"]) for r in pcol["rows"]]
                true_rows += [(r.get("value"), r.get("unit")) for r in trows]
        if true_rows:
            per_dataset[name] = {
                "unit_accuracy": ev.unit_identification_accuracy(pred_rows, true_rows),
                "value_accuracy": ev.value_accuracy(pred_rows, true_rows),
                "n_rows": len(true_rows),
            }
    dims = sorted(set(true_dims) | {d for d in pred_dims if d})
    unit_accs = [v["unit_accuracy"] for v in per_dataset.values()]
    return {
        "n_columns": len(true_dims),
        "overall_accuracy": ev.overall_accuracy(pred_dims, true_dims),
        "jaccard": {d: ev.jaccard_per_dimension(pred_dims, true_dims, d) for d in dims},
        "per_dataset": per_dataset,
        "mean_unit_accuracy": sum(unit_accs) / len(unit_accs) if unit_accs else None,
        "_correct": [p == t for p, t in zip(pred_dims, true_dims)],
        "_keys": col_keys,
    }


def _compare(primary, baseline) -> dict:
    out = {}
    n01, n10 = ev.discordant_counts(primary["_correct"], baseline["_correct"])
    out["mcnemar"] = {"n01": n01, "n10": n10,
                      "p": ev.mcnemar_exact(n01, n10) if n01 + n10 else None}
    shared = sorted(set(primary["per_dataset"]) & set(baseline["per_dataset"]))
    a = [primary["per_dataset"][d]["unit_accuracy"] for d in shared]
    b = [baseline["per_dataset"][d]["unit_accuracy"] for d in shared]
    try:
        res = ev.paired_t_test(a, b)
        out["paired_t"] = {"t": res.statistic, "p": res.pvalue, "df": res.df,
                           "datasets": shared}
    except ev.EvaluationError as exc:
        out["paired_t"] = {"error": str(exc), "datasets": shared}
    return out


def _strip_private(d):
    return {k: v for k, v in d.items() if not k.startswith("_")}


def _evaluate_published(config: RunConfig) -> dict:
    try:
        fx = ev.load_published(config.published)
    except ev.EvaluationError as exc:
        raise CLIError(str(exc)) from None
    doc = {"version": REPORT_VERSION, "mode": "evaluate", "published": config.published}
    if fx["kind"] == "dimension_inference":
        truth = fx["truth"]
        dims = sorted(set(truth))
        methods = {}
        for m, pred in fx["predictions"].items():
            methods[m] = {"overall_accuracy": ev.overall_accuracy(pred, truth),
                          "jaccard": {d: ev.jaccard_per_dimension(pred, truth, d) for d in dims}}
        doc["methods"] = methods
        if config.compare:
            a, b = config.compare
            for m in (a, b):
                if m not in fx["predictions"]:
                    raise CLIError(f"no predictions for method {m!r}")
            ca = [p == t for p, t in zip(fx["predictions"][a], truth)]
            cb = [p == t for p, t in zip(fx["predictions"][b], truth)]
            n01, n10 = ev.discordant_counts(ca, cb)
            doc["comparison"] = {"a": a, "b": b, "mcnemar": {
                "n01": n01, "n10": n10,
                "p": ev.mcnemar_exact(n01, n10) if n01 + n10 else None}}
        if config.figures:
            from .plotting import grouped_bars
            series = {m: [v["jaccard"][d] for d in dims] for m, v in methods.items()}
            doc["figures"] = [grouped_bars(dims, series, "Jaccard index per dimension",
                                           "Jaccard", Path(config.figures) / "jaccard.png")]
    else:
        acc = fx["accuracy"]
        doc["methods"] = {m: {"mean_accuracy": sum(v) / len(v)} for m, v in acc.items()}
        if config.compare:
            a, b = config.compare
            for m in (a, b):
                if m not in acc:
                    raise CLIError(f"no accuracies for method {m!r}")
            res = ev.paired_t_test(acc[a], acc[b])
            doc["comparison"] = {"a": a, "b": b, "paired_t": {
                "t": res.statistic, "p": res.pvalue, "df": res.df}}
        if config.figures:
            from .plotting import grouped_bars
            doc["figures"] = [grouped_bars(fx["datasets"], acc, "Unit identification accuracy",
                                           "accuracy", Path(config.figures) / "unit_accuracy.png")]
    return doc


def run_evaluate(config: RunConfig) -> dict:
    if config.published:
        return _evaluate_published(config)
    if not config.inputs:
        raise CLIError("evaluate mode needs at least one prediction report")
    truth = _read_json(config.truth, "ground truth")
    if not isinstance(truth, list):
        raise CLIError(f"{config.truth}: ground truth must be an array of dataset records")
    primary = score_predictions([_read_report(p) for p in config.inputs], truth)
    doc = {"version": REPORT_VERSION, "mode": "evaluate", "metrics": _strip_private(primary)}
    if config.baseline_reports:
        baseline = score_predictions([_read_report(p) for p in config.baseline_reports], truth)
        doc["baseline_metrics"] = _strip_private(baseline)
        doc["comparison"] = _compare(primary, baseline)
    if config.figures:
        from .plotting import grouped_bars
        dims = sorted(primary["jaccard"])
        series = {"predictions": [primary["jaccard"][d] for d in dims]}
        if config.baseline_reports:
            series["baseline"] = [baseline["jaccard"].get(d) for d in dims]
        doc["figures"] = [grouped_bars(dims, series, "Jaccard index per dimension", "Jaccard",
                                       Path(config.figures) / "jaccard.png")]
    return doc


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="puc",
        description="Infer dimensions and units of CSV columns and canonicalize their values.")
    p.add_argument("inputs", nargs="*",
                   help="CSV files (annotate/canonicalize) or prediction reports (evaluate)")
    p.add_argument("--mode", choices=MODES, default="annotate")
    p.add_argument("--kb", action="append", dest="kb_paths", metavar="PATH",
                   help="unit dictionary JSON; repeat to merge extensions (default: bundled)")
    p.add_argument("--columns", help="comma-separated column names or 0-based indices")
    p.add_argument("--config", help="JSON file with parameter overrides")
    p.add_argument("--out", help="output path (report, or CSV in canonicalize mode)")
    p.add_argument("--truth", help="ground-truth JSON (evaluate mode)")
    p.add_argument("--baseline-report", action="append", dest="baseline_reports",
                   default=None, metavar="PATH", help="second prediction set (evaluate mode)")
    p.add_argument("--published", choices=("dimension_inference", "unit_identification"),
                   help="evaluate the bundled published results instead of reports")
    p.add_argument("--compare", nargs=2, metavar=("A", "B"),
                   help="methods to compare with --published")
    p.add_argument("--figures", metavar="DIR", help="also render PNG figures into DIR")
    p.add_argument("--no-timing", action="store_true",
                   help="omit wall-clock timings so reports are byte-reproducible")
    for key, typ in _CONFIG_TYPES.items():
        p.add_argument("--" + key.replace("_", "-"), type=typ, dest=key, default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args) -> RunConfig:
    values = {}
    if args.config:
        raw = _read_json(args.config, "config")
        if not isinstance(raw, dict):
            raise CLIError(f"{args.config}: config must be a JSON object")
        unknown = set(raw) - set(CONFIG_KEYS)
        if unknown:
            raise CLIError(f"{args.config}: unknown config keys {sorted(unknown)}")
        for key, value in raw.items():
            typ = _CONFIG_TYPES[key]
            if value is None and key == "distance_cutoff":
                values[key] = None
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)) \
                    or (typ is int and value != int(value)):
                kind = "an integer" if typ is int else "a number"
                raise CLIError(f"{args.config}: {key} must be {kind}")
            values[key] = typ(value)
    for key in CONFIG_KEYS:
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    return RunConfig(
        inputs=list(args.inputs),
        mode=args.mode,
        kb_paths=args.kb_paths or [],
        columns=[c.strip() for c in args.columns.split(",")] if args.columns else None,
        out=args.out,
        truth=args.truth,
        baseline_reports=args.baseline_reports or [],
        published=args.published,
        compare=tuple(args.compare) if args.compare else None,
        figures=args.figures,
        timing=not args.no_timing,
        **values,
    )


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CLIError(f"cannot write {path}: {exc}") from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        if config.mode == "annotate":
            _write(config.out, dumps(run_annotate(config)))
        elif config.mode == "canonicalize":
            text, doc = run_canonicalize(config)
            _write(config.out, text)
            _write(str(config.out) + ".report.json", dumps(doc))
        else:
            _write(config.out, dumps(run_evaluate(config)))
    except (CLIError, ev.EvaluationError) as exc:
        print(f"puc: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
