"""Probabilistic unit canonicalization for numeric columns with unit symbols.

Typical use::

    from puc import default_kb, default_params, parse_column, annotate_column
    kb = default_kb()
    cells = parse_column(["5.2 l", "180 L", "7 cu ft", "300"])
    ann = annotate_column(cells, kb, default_params(kb))
    ann.dimension, ann.column_unit      # ('volume', 'litre')
"""

from .canonical import CanonicalColumn, canonicalize_column, canonicalize_row
from .correction import Correction, correct_symbol, edit_distance
from .evaluation import (
    jaccard_per_dimension,
    mcnemar_exact,
    overall_accuracy,
    paired_t_test,
    unit_identification_accuracy,
)
from .inference import (
    ColumnAnnotation,
    RowAnnotation,
    annotate_column,
    column_unit,
    dimension_posterior,
    row_label_posterior,
    row_unit_posterior,
)
from .kb import (
    ConversionError,
    KBError,
    KnowledgeBase,
    UnitEntry,
    conversion_factor,
    default_kb,
    load_kb,
    read_kb,
    unit_prior,
    units_of_dimension,
)
from .model import (
    ANOMALOUS,
    MISSING,
    MixingProportions,
    ModelParams,
    ObservationParams,
    anomaly_likelihood,
    default_params,
    missing_likelihood,
    regular_likelihood,
)
from .parsing import ParsedCell, parse_cell, parse_column

__version__ = "0.1.0"
