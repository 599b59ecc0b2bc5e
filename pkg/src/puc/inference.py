"""Posterior inference for the column dimension, row labels and row units.

All products over rows are taken in log space; the marginalisation over row
units uses log-sum-exp.  Rows are grouped by observed symbol first, which is
exact because the column likelihood factorises over rows.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .correction import Correction, correct_symbol
from .kb import KBError, KnowledgeBase, units_of_dimension
from .model import (
    ANOMALOUS,
    MISSING,
    NEG_INF,
    ModelParams,
    anomaly_log_likelihood,
    log_missing_likelihood,
)
from .parsing import ParsedCell

DEFAULT_CONFIDENCE_THRESHOLD = 0.5


class InferenceError(ValueError):
    pass


@dataclass(frozen=True)
class RowAnnotation:
    observed: str | None
    label_posterior: Mapping[str, float]
    label: str
    unit_posterior: Mapping[str, float]
    # regular rows: the label's unit; anomalous rows: the corrected unit;
    # missing rows: None (the column unit is assumed downstream)
    unit: str | None
    correction: Correction | None = None


@dataclass(frozen=True)
class ColumnAnnotation:
    dimension_posterior: Mapping[str, float]
    dimension: str
    rows: tuple[RowAnnotation, ...]
    column_unit: str
    column_unit_scores: Mapping[str, float]
    low_confidence: bool

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.rows]

    @property
    def corrections(self) -> list[Correction | None]:
        return [r.correction for r in self.rows]


def _observed(cell) -> str | None:
    if isinstance(cell, ParsedCell):
        return cell.observed
    return cell or None


def _normalize(log_weights) -> np.ndarray:
    log_weights = np.asarray(log_weights, dtype=float)
    total = logsumexp(log_weights)
    if total == NEG_INF:
        raise InferenceError("all configurations have zero probability")
    return np.exp(log_weights - total)


def _argmax(names: Sequence[str], probs) -> str:
    # np.argmax returns the first maximum, i.e. the earliest name in sorted order
    return names[int(np.argmax(probs))]


class _Model:
    """Per-(kb, params) log-space lookups shared by the inference entry points."""

    def __init__(self, kb: KnowledgeBase, params: ModelParams):
        self.kb = kb
        self.params = params
        self.units = {d: units_of_dimension(kb, d) for d in kb.dimensions}
        self.log_prior = {d: -math.log(len(us)) for d, us in self.units.items()}
        # log sum_u p(u|t) w_u^m and the same for w^a
        self.log_bg = {}
        for d, us in self.units.items():
            wm = [params.mixing_for(u).w_missing for u in us]
            wa = [params.mixing_for(u).w_anomalous for u in us]
            self.log_bg[d] = (_log(math.fsum(wm) / len(us)), _log(math.fsum(wa) / len(us)))

    def log_w(self, unit, kind):
        return _log(self.params.mixing_for(unit).weight(kind))

    def log_pi(self, x, unit):
        p = self.params.obs.pi[unit].get(x, 0.0) if x else 0.0
        return _log(p)

    def regular_units(self, x, dimension):
        if not x:
            return []
        return [u for u in sorted(self.kb.units_for_symbol(x))
                if self.kb.entries[u].dimension == dimension]

    def log_evidence(self, x, dimension) -> float:
        """log p(x | t) with the row unit and label summed out."""
        lp = self.log_prior[dimension]
        terms = [lp + self.log_w(u, "regular") + self.log_pi(x, u)
                 for u in self.regular_units(x, dimension)]
        bm, ba = self.log_bg[dimension]
        terms.append(bm + log_missing_likelihood(x))
        terms.append(ba + anomaly_log_likelihood(x, self.params))
        return float(logsumexp(terms))

    def check_dimension(self, dimension):
        if dimension not in self.units:
            raise KBError(f"unknown dimension {dimension!r}")


def _log(p: float) -> float:
    return math.log(p) if p > 0 else NEG_INF


def _symbol_counts(cells) -> Counter:
    counts = Counter(_observed(c) for c in cells)
    if not counts:
        raise InferenceError("no rows")
    return counts


def dimension_posterior(cells: Iterable, kb: KnowledgeBase, params: ModelParams,
                        _model: _Model | None = None) -> dict[str, float]:
    """p(t | x) over the KB dimensions, with a uniform prior on t."""
    counts = _symbol_counts(cells)
    model = _model or _Model(kb, params)
    logp = np.full(len(kb.dimensions), -math.log(len(kb.dimensions)))
    for x, n in sorted(counts.items(), key=lambda kv: (kv[0] is None, kv[0] or "")):
        logp += n * np.array([model.log_evidence(x, d) for d in kb.dimensions])
    return dict(zip(kb.dimensions, _normalize(logp).tolist()))


def row_label_posterior(x: str | None, dimension: str, kb: KnowledgeBase,
                        params: ModelParams, _model: _Model | None = None) -> dict[str, float]:
    """p(z | t, x) over the units of t followed by MISSING and ANOMALOUS."""
    model = _model or _Model(kb, params)
    model.check_dimension(dimension)
    x = x or None
    units = model.units[dimension]
    lp = model.log_prior[dimension]
    logs = [lp + model.log_w(u, "regular") + model.log_pi(x, u) for u in units]
    bm, ba = model.log_bg[dimension]
    logs.append(bm + log_missing_likelihood(x))
    logs.append(ba + anomaly_log_likelihood(x, params))
    return dict(zip(units + [MISSING, ANOMALOUS], _normalize(logs).tolist()))


def row_unit_posterior(x: str | None, dimension: str, label: str, kb: KnowledgeBase,
                       params: ModelParams, _model: _Model | None = None) -> dict[str, float]:
    """p(u | t, z, x) over the units of t.

    A regular label pins the unit.  For MISSING or ANOMALOUS the symbol
    likelihood does not depend on the unit, so the result is p(u | t)
    reweighted by the per-unit mixing weight of that label.
    """
    model = _model or _Model(kb, params)
    model.check_dimension(dimension)
    units = model.units[dimension]
    if label in (MISSING, ANOMALOUS):
        logs = [model.log_prior[dimension] + model.log_w(u, label) for u in units]
        return dict(zip(units, _normalize(logs).tolist()))
    if label not in units:
        raise KBError(f"label {label!r} is not a unit of {dimension!r}")
    return {u: float(u == label) for u in units}


def row_unit_marginal(x: str | None, dimension: str, kb: KnowledgeBase,
                      params: ModelParams, _model: _Model | None = None) -> dict[str, float]:
    """p(u | t, x) with the row label summed out."""
    model = _model or _Model(kb, params)
    model.check_dimension(dimension)
    x = x or None
    units = model.units[dimension]
    lmiss = log_missing_likelihood(x)
    lanom = anomaly_log_likelihood(x, params)
    logs = []
    for u in units:
        terms = [model.log_w(u, "regular") + model.log_pi(x, u),
                 model.log_w(u, MISSING) + lmiss,
                 model.log_w(u, ANOMALOUS) + lanom]
        logs.append(model.log_prior[dimension] + float(logsumexp(terms)))
    return dict(zip(units, _normalize(logs).tolist()))


def column_unit_scores(cells: Iterable, dimension: str, kb: KnowledgeBase,
                       params: ModelParams, _model: _Model | None = None) -> dict[str, float]:
    """Sum over rows of p(u_i = l | t, x_i) for each unit l of t."""
    counts = _symbol_counts(cells)
    model = _model or _Model(kb, params)
    units = units_of_dimension(kb, dimension)
    totals = np.zeros(len(units))
    for x, n in sorted(counts.items(), key=lambda kv: (kv[0] is None, kv[0] or "")):
        marg = row_unit_marginal(x, dimension, kb, params, model)
        totals += n * np.array([marg[u] for u in units])
    return dict(zip(units, totals.tolist()))


def column_unit(cells: Iterable, dimension: str, kb: KnowledgeBase,
                params: ModelParams) -> str:
    scores = column_unit_scores(cells, dimension, kb, params)
    names = list(scores)
    return _argmax(names, list(scores.values()))


def annotate_column(cells: Sequence[ParsedCell], kb: KnowledgeBase, params: ModelParams,
                    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
                    max_distance: int | None = None) -> ColumnAnnotation:
    """Infer dimension, per-row labels and units, corrections and the column unit."""
    cells = list(cells)
    model = _Model(kb, params)
    dim_post = dimension_posterior(cells, kb, params, model)
    dims = list(dim_post)
    dimension = _argmax(dims, list(dim_post.values()))

    per_symbol = {}
    for x in {_observed(c) for c in cells}:
        labels = row_label_posterior(x, dimension, kb, params, model)
        label = _argmax(list(labels), list(labels.values()))
        units = row_unit_posterior(x, dimension, label, kb, params, model)
        correction = None
        if label == ANOMALOUS:
            unit = None
            correction = correct_symbol(x, dimension, kb, max_distance)
            if correction is not None:
                unit = correction.unit
        elif label == MISSING:
            unit = None
        else:
            unit = label
        per_symbol[x] = RowAnnotation(x, labels, label, units, unit, correction)

    rows = tuple(per_symbol[_observed(c)] for c in cells)
    scores = column_unit_scores(cells, dimension, kb, params, model)
    col_unit = _argmax(list(scores), list(scores.values()))
    return ColumnAnnotation(
        dimension_posterior=dim_post,
        dimension=dimension,
        rows=rows,
        column_unit=col_unit,
        column_unit_scores=scores,
        low_confidence=max(dim_post.values()) < confidence_threshold,
    )
