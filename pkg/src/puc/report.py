"""JSON report records for annotated and canonicalized columns."""

from __future__ import annotations

import json
import math

from .canonical import CanonicalColumn
from .correction import Correction
from .inference import ColumnAnnotation
from .model import ANOMALOUS, MISSING
from .parsing import ParsedCell

REPORT_VERSION = "1"

_LABEL_NAMES = {MISSING: "missing", ANOMALOUS: "anomalous"}


def label_name(label: str) -> str:
    return _LABEL_NAMES.get(label, label)


def label_kind(label: str) -> str:
    return _LABEL_NAMES.get(label, "regular")


def _round(x):
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite number in report: {x!r}")
        return float(f"{x:.15g}")
    if isinstance(x, dict):
        return {str(k): _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def dumps(doc) -> str:
    """Byte-stable JSON: sorted keys, floats at 15 significant digits."""
    return json.dumps(_round(doc), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def correction_record(c: Correction | None):
    if c is None:
        return None
    return {"original": c.original, "corrected": c.corrected,
            "unit": c.unit, "distance": c.distance}


def column_record(name: str, index: int, cells: list[ParsedCell],
                  ann: ColumnAnnotation) -> dict:
    rows = []
    for cell, row in zip(cells, ann.rows):
        rows.append({
            "raw": cell.raw,
            "value": cell.value,
            "symbol": cell.symbol,
            "parse_ok": cell.parse_ok,
            "label": label_name(row.label),
            "label_kind": label_kind(row.label),
            "label_probability": row.label_posterior[row.label],
            "unit": row.unit,
            "correction": correction_record(row.correction),
        })
    return {
        "name": name,
        "index": index,
        "n_rows": ann.n_rows,
        "dimension": ann.dimension,
        "dimension_posterior": dict(ann.dimension_posterior),
        "low_confidence": ann.low_confidence,
        "column_unit": ann.column_unit,
        "column_unit_scores": dict(ann.column_unit_scores),
        "rows": rows,
    }


def canonical_record(col: CanonicalColumn) -> dict:
    counts: dict[str, int] = {}
    for tag in col.provenance:
        counts[tag] = counts.get(tag, 0) + 1
    return {
        "unit": col.unit,
        "values": list(col.values),
        "provenance": list(col.provenance),
        "provenance_counts": counts,
    }
