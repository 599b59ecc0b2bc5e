"""Rewrite row values in the column unit."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .inference import ColumnAnnotation
from .model import MISSING
from .kb import ConversionError, KnowledgeBase, conversion_factor
from .parsing import ParsedCell

CONVERTED = "converted"
ASSUMED = "assumed-column-unit"
VALUE_MISSING = "value-missing"
NON_CONVERTIBLE = "non-convertible"


@dataclass(frozen=True)
class CanonicalColumn:
    unit: str
    values: tuple[float | None, ...]
    provenance: tuple[str, ...]


def canonicalize_row(cell: ParsedCell, row_unit: str | None, column_unit: str,
                     kb: KnowledgeBase) -> tuple[float | None, str]:
    """Scale one row into `column_unit`.

    ``row_unit=None`` marks a row without a unit symbol; its value is taken to
    already be in the column unit.
    """
    if row_unit is not None:
        a, b = kb.unit(row_unit), kb.unit(column_unit)
        if a.dimension != b.dimension:
            raise ConversionError(
                f"row unit {row_unit!r} ({a.dimension}) does not match column unit "
                f"{column_unit!r} ({b.dimension})")
    if cell.value is None:
        return None, VALUE_MISSING
    if row_unit is None:
        return cell.value, ASSUMED
    try:
        factor = conversion_factor(kb, row_unit, column_unit)
    except ConversionError as exc:
        if exc.non_convertible:
            return None, NON_CONVERTIBLE
        raise
    return cell.value * float(factor), CONVERTED


def canonicalize_column(annotation: ColumnAnnotation, cells: Sequence[ParsedCell],
                        kb: KnowledgeBase) -> CanonicalColumn:
    if len(cells) != annotation.n_rows:
        raise ValueError(f"annotation has {annotation.n_rows} rows, got {len(cells)} cells")
    values, tags = [], []
    for cell, row in zip(cells, annotation.rows):
        if row.unit is None and row.label != MISSING:
            # anomalous row left uncorrected (distance cutoff)
            value, tag = (None, VALUE_MISSING) if cell.value is None else (None, NON_CONVERTIBLE)
        else:
            value, tag = canonicalize_row(cell, row.unit, annotation.column_unit, kb)
        values.append(value)
        tags.append(tag)
    return CanonicalColumn(annotation.column_unit, tuple(values), tuple(tags))
