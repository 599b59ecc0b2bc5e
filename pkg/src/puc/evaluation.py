"""Accuracy metrics and significance tests for dimension and unit predictions."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from math import comb
from typing import Sequence

from scipy import stats


class EvaluationError(ValueError):
    pass


def _check_lengths(pred, truth, allow_empty=False):
    if len(pred) != len(truth):
        raise EvaluationError(f"length mismatch: {len(pred)} predictions, {len(truth)} truths")
    if not allow_empty and not pred:
        raise EvaluationError("nothing to score")


def overall_accuracy(pred: Sequence[str], truth: Sequence[str]) -> float:
    _check_lengths(pred, truth)
    return sum(p == t for p, t in zip(pred, truth)) / len(truth)


def confusion_counts(pred, truth, dimension):
    """(TP, FP, FN) of `dimension` treated as the positive class."""
    _check_lengths(pred, truth, allow_empty=True)
    tp = sum(p == dimension and t == dimension for p, t in zip(pred, truth))
    fp = sum(p == dimension and t != dimension for p, t in zip(pred, truth))
    fn = sum(p != dimension and t == dimension for p, t in zip(pred, truth))
    return tp, fp, fn


def jaccard_per_dimension(pred: Sequence[str], truth: Sequence[str],
                          dimension: str) -> float | None:
    """TP / (TP + FP + FN); None when the dimension never occurs in either."""
    tp, fp, fn = confusion_counts(pred, truth, dimension)
    denom = tp + fp + fn
    return tp / denom if denom else None


def unit_identification_accuracy(pred_rows, truth_rows) -> float:
    """Fraction of rows whose predicted unit equals the true unit.

    Rows are ``(value, unit)`` pairs; values are ignored here (see
    :func:`value_accuracy`).
    """
    _check_lengths(pred_rows, truth_rows)
    return sum(p[1] == t[1] for p, t in zip(pred_rows, truth_rows)) / len(truth_rows)


def value_accuracy(pred_rows, truth_rows, rel_tol=1e-9) -> float:
    _check_lengths(pred_rows, truth_rows)
    hits = 0
    for (pv, _), (tv, _) in zip(pred_rows, truth_rows):
        if pv is None or tv is None:
            hits += pv is None and tv is None
        else:
            hits += math.isclose(pv, tv, rel_tol=rel_tol, abs_tol=0.0)
    return hits / len(truth_rows)


@dataclass(frozen=True)
class TTestResult:
    statistic: float
    pvalue: float
    df: int
    mean_difference: float


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-sided paired t-test on the differences a - b (n - 1 degrees of freedom)."""
    _check_lengths(a, b)
    n = len(a)
    if n < 2:
        raise EvaluationError("paired t-test needs at least two pairs")
    d = [x - y for x, y in zip(a, b)]
    mean = math.fsum(d) / n
    var = math.fsum((x - mean) ** 2 for x in d) / (n - 1)
    if var == 0.0:
        raise EvaluationError("zero-variance differences")
    t = mean / math.sqrt(var / n)
    p = 2.0 * stats.t.sf(abs(t), n - 1)
    return TTestResult(float(t), float(min(p, 1.0)), n - 1, mean)


def mcnemar_exact(n01: int, n10: int) -> float:
    """Exact two-sided McNemar p-value from the discordant counts.

    ``2 * sum_{i=max}^{n} C(n, i) / 2**n`` with ``n = n01 + n10``, clamped to 1.
    """
    if n01 < 0 or n10 < 0:
        raise EvaluationError("discordant counts must be non-negative")
    n = n01 + n10
    if n == 0:
        raise EvaluationError("no discordant pairs")
    tail = sum(comb(n, i) for i in range(max(n01, n10), n + 1))
    return min(1.0, 2 * tail / 2 ** n)


def discordant_counts(primary_correct: Sequence[bool], other_correct: Sequence[bool]):
    """(n01, n10): items only `other` gets wrong, items only `primary` gets wrong."""
    _check_lengths(primary_correct, other_correct)
    n01 = sum(p and not o for p, o in zip(primary_correct, other_correct))
    n10 = sum(o and not p for p, o in zip(primary_correct, other_correct))
    return n01, n10


# -- bundled published results ----------------------------------------------

def load_published(name: str) -> dict:
    """Load a bundled results fixture: ``"dimension_inference"`` or ``"unit_identification"``."""
    path = resources.files("puc") / "data" / f"published_{name}.json"
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise EvaluationError(f"no bundled results named {name!r}") from None
