"""Unit knowledge base: dimensions, units, symbols and conversion factors.

A KB file is a JSON array of unit records using the attribute names of the
quantulum-style unit dictionary::

    {"name": "litre", "surfaces": ["litre", "liter"], "entity": "volume",
     "URI": "Litre", "dimensions": [{"base": "decimetre", "power": 3}],
     "symbols": ["l", "L", "ltr"],
     "conversion": {"base": "cubic metre", "factor": "0.001"}}

``conversion`` is optional and states that one unit equals ``factor`` base
units.  Factors are decimal strings and are read as exact fractions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

SUPPORTED_DIMENSIONS = frozenset({
    "acceleration", "amount of substance", "angle", "area", "capacitance",
    "catalytic activity", "charge", "currency", "current", "data storage",
    "data transfer rate", "dimensionless", "dynamic viscosity",
    "electric potential", "electrical conductance", "electrical resistance",
    "energy", "flux density", "force", "frequency", "illuminance",
    "inductance", "instance frequency", "irradiance", "kinematic viscosity",
    "length", "linear mass density", "luminance", "luminous flux",
    "luminous intensity", "magnetic field", "magnetic flux",
    "magnetomotive force", "mass", "mass flow", "power", "pressure",
    "radiation absorbed dose", "radiation exposure", "radioactivity",
    "sound level", "speed", "temperature", "time", "torque",
    "typographical element", "volume", "volume (lumber)", "volumetric flow",
})


class KBError(ValueError):
    """Raised for malformed knowledge-base documents or invalid queries."""


class ConversionError(KBError):
    """Raised when two units cannot be converted into each other."""

    def __init__(self, message, non_convertible=False):
        super().__init__(message)
        self.non_convertible = non_convertible


@dataclass(frozen=True)
class UnitEntry:
    name: str
    dimension: str
    surfaces: frozenset[str] = frozenset()
    symbols: frozenset[str] = frozenset()
    uri: str | None = None
    # ((base unit, power), ...); a single pair for simple derived units
    derivation: tuple[tuple[str, int], ...] | None = None
    # (base unit, factor): one of this unit equals `factor` base units
    conversion: tuple[str, Fraction] | None = None

    @property
    def all_symbols(self) -> frozenset[str]:
        return self.surfaces | self.symbols


@dataclass(frozen=True)
class KnowledgeBase:
    entries: Mapping[str, UnitEntry]
    dimensions: tuple[str, ...]
    symbol_index: Mapping[str, frozenset[str]]
    base_unit: Mapping[str, str]
    # unit name -> factor relative to base_unit[dimension]; convertible units only
    scale: Mapping[str, Fraction] = field(default_factory=dict, compare=False)
    _by_dimension: Mapping[str, tuple[str, ...]] = field(
        default_factory=dict, compare=False, repr=False)
    # memo for derived lookups (e.g. correction candidates); not part of identity
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    def __len__(self):
        return len(self.entries)

    def unit(self, name: str) -> UnitEntry:
        try:
            return self.entries[name]
        except KeyError:
            raise KBError(f"unknown unit {name!r}") from None

    def units_for_symbol(self, symbol: str) -> frozenset[str]:
        return self.symbol_index.get(symbol, frozenset())

    def is_convertible(self, name: str) -> bool:
        return name in self.scale


def units_of_dimension(kb: KnowledgeBase, dimension: str) -> list[str]:
    """Name-sorted units of `dimension`."""
    try:
        return list(kb._by_dimension[dimension])
    except KeyError:
        raise KBError(f"unknown dimension {dimension!r}") from None


def unit_prior(kb: KnowledgeBase, unit: str, dimension: str) -> float:
    """p(unit | dimension): uniform over the units of the dimension."""
    entry = kb.unit(unit)
    units = units_of_dimension(kb, dimension)
    if entry.dimension != dimension:
        return 0.0
    return 1.0 / len(units)


def conversion_factor(kb: KnowledgeBase, source: str, target: str) -> Fraction:
    """Exact factor r with ``value_in_source * r == value_in_target``."""
    a, b = kb.unit(source), kb.unit(target)
    if a.dimension != b.dimension:
        raise ConversionError(
            f"cannot convert {source!r} ({a.dimension}) to {target!r} ({b.dimension})")
    if source == target:
        return Fraction(1)
    missing = [n for n in (source, target) if n not in kb.scale]
    if missing:
        raise ConversionError(
            f"non-convertible unit: {', '.join(map(repr, missing))} "
            "has no conversion data", non_convertible=True)
    return kb.scale[source] / kb.scale[target]


# -- loading -----------------------------------------------------------------

def _parse_factor(raw, where) -> Fraction:
    try:
        value = Fraction(str(raw))
    except (ValueError, ZeroDivisionError):
        raise KBError(f"{where}: bad conversion factor {raw!r}") from None
    if value <= 0:
        raise KBError(f"{where}: conversion factor must be positive, got {raw!r}")
    return value


def _parse_derivation(raw, where):
    if raw in (None, "", [], {}):
        return None
    items = [raw] if isinstance(raw, Mapping) else list(raw)
    out = []
    for item in items:
        try:
            base, power = item["base"], item["power"]
        except (TypeError, KeyError):
            raise KBError(f"{where}: derivation needs 'base' and 'power'") from None
        if isinstance(power, bool) or int(power) != power or power == 0:
            raise KBError(f"{where}: derivation power must be a nonzero integer")
        out.append((str(base), int(power)))
    return tuple(out)


def _strings(raw):
    if raw is None:
        return frozenset()
    if isinstance(raw, str):
        raw = [raw]
    return frozenset(s for s in (str(x) for x in raw) if s)


def _record_to_entry(record, where) -> UnitEntry:
    if not isinstance(record, Mapping):
        raise KBError(f"{where}: record must be an object")
    name = record.get("name")
    entity = record.get("entity")
    if not name:
        raise KBError(f"{where}: record is missing 'name'")
    if not entity:
        raise KBError(f"{where}: record {name!r} is missing 'entity'")
    conversion = None
    if record.get("conversion"):
        conv = record["conversion"]
        if not isinstance(conv, Mapping) or "base" not in conv or "factor" not in conv:
            raise KBError(f"{where}: conversion needs 'base' and 'factor'")
        conversion = (str(conv["base"]), _parse_factor(conv["factor"], where))
    return UnitEntry(
        name=str(name),
        dimension=str(entity),
        surfaces=_strings(record.get("surfaces")),
        symbols=_strings(record.get("symbols")),
        uri=record.get("URI") or record.get("uri") or None,
        derivation=_parse_derivation(record.get("dimensions"), where),
        conversion=conversion,
    )


def _merge(old: UnitEntry, new: UnitEntry, where) -> UnitEntry:
    if old.dimension != new.dimension:
        raise KBError(
            f"{where}: unit {new.name!r} declared with dimension "
            f"{new.dimension!r} conflicts with earlier {old.dimension!r}")
    for attr in ("derivation", "conversion"):
        a, b = getattr(old, attr), getattr(new, attr)
        if a is not None and b is not None and a != b:
            raise KBError(f"{where}: conflicting {attr} for unit {new.name!r}")
    return UnitEntry(
        name=old.name,
        dimension=old.dimension,
        surfaces=old.surfaces | new.surfaces,
        symbols=old.symbols | new.symbols,
        uri=min(filter(None, (old.uri, new.uri)), default=None),
        derivation=old.derivation or new.derivation,
        conversion=old.conversion or new.conversion,
    )


def _resolve_scales(entries: Mapping[str, UnitEntry]):
    """Return (base_unit per dimension, scale per convertible unit)."""
    scale: dict[str, Fraction] = {}
    root: dict[str, str] = {}

    def explicit(name, seen=()):
        if name in root:
            return root[name], scale[name]
        if name in seen:
            raise KBError(f"conversion cycle through unit {name!r}")
        entry = entries[name]
        conv = entry.conversion
        if conv is None or conv[0] == name:
            if conv is not None and conv[1] != 1:
                raise KBError(f"unit {name!r} converts to itself with factor {conv[1]}")
            r, f = name, Fraction(1)
        else:
            base = entries.get(conv[0])
            if base is None:
                raise KBError(f"unit {name!r} converts to unknown unit {conv[0]!r}")
            if base.dimension != entry.dimension:
                raise KBError(
                    f"unit {name!r} ({entry.dimension}) converts to "
                    f"{conv[0]!r} ({base.dimension})")
            r, f0 = explicit(conv[0], seen + (name,))
            f = conv[1] * f0
        root[name], scale[name] = r, f
        return r, f

    # Dimensions anchored by an explicit conversion.
    base_unit: dict[str, str] = {}
    for name in sorted(entries):
        entry = entries[name]
        if entry.conversion is None:
            continue
        r, _ = explicit(name)
        prev = base_unit.setdefault(entry.dimension, r)
        if prev != r:
            raise KBError(
                f"dimension {entry.dimension!r} has two conversion bases: "
                f"{prev!r} and {r!r}")
    for dim, r in base_unit.items():
        explicit(r)
    explicit_scale = {n: scale[n] for n in scale
                      if entries[n].dimension in base_unit
                      and root[n] == base_unit[entries[n].dimension]}

    # Units with only a single-term derivation (e.g. decimetre^3) convert when
    # their base is convertible and the dimension's anchor shares the power.
    for name in sorted(entries):
        entry = entries[name]
        if name in explicit_scale or entry.dimension not in base_unit:
            continue
        anchor = entries[base_unit[entry.dimension]]
        if not entry.derivation or len(entry.derivation) != 1:
            continue
        if not anchor.derivation or len(anchor.derivation) != 1:
            continue
        (b, p), (ab, ap) = entry.derivation[0], anchor.derivation[0]
        if p != ap or b not in explicit_scale or ab not in explicit_scale:
            continue
        if entries[b].dimension != entries[ab].dimension:
            continue
        explicit_scale[name] = (explicit_scale[b] / explicit_scale[ab]) ** p
    return base_unit, explicit_scale


def build_kb(entries: Iterable[UnitEntry]) -> KnowledgeBase:
    entries = {e.name: e for e in entries}
    if not entries:
        raise KBError("no entries")
    for e in entries.values():
        if not e.all_symbols:
            raise KBError(f"unit {e.name!r} has no symbols or surfaces")
        if e.dimension not in SUPPORTED_DIMENSIONS:
            raise KBError(f"unit {e.name!r} has unknown dimension {e.dimension!r}")
    dimensions = tuple(sorted({e.dimension for e in entries.values()}))
    by_dim: dict[str, list[str]] = {d: [] for d in dimensions}
    index: dict[str, set[str]] = {}
    for name in sorted(entries):
        e = entries[name]
        by_dim[e.dimension].append(name)
        for s in e.all_symbols:
            index.setdefault(s, set()).add(name)
    base_unit, scale = _resolve_scales(entries)
    return KnowledgeBase(
        entries=entries,
        dimensions=dimensions,
        symbol_index={s: frozenset(v) for s, v in index.items()},
        base_unit=base_unit,
        scale=scale,
        _by_dimension={d: tuple(v) for d, v in by_dim.items()},
    )


def load_kb(documents: Sequence[Sequence[Mapping]]) -> KnowledgeBase:
    """Merge unit-dictionary documents into one knowledge base.

    Records sharing a name are merged by unioning their surfaces and symbols;
    a name reused with a different entity is an error.
    """
    merged: dict[str, UnitEntry] = {}
    for d, doc in enumerate(documents):
        if isinstance(doc, Mapping) or isinstance(doc, (str, bytes)):
            raise KBError(f"document {d}: expected an array of records")
        for r, record in enumerate(doc):
            where = f"document {d}, record {r}"
            entry = _record_to_entry(record, where)
            if entry.name in merged:
                entry = _merge(merged[entry.name], entry, where)
            merged[entry.name] = entry
    return build_kb(merged.values())


def read_kb(*paths) -> KnowledgeBase:
    """Load one or more KB files; later files extend earlier ones."""
    docs = []
    for p in paths:
        try:
            with open(p, encoding="utf-8") as fh:
                docs.append(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise KBError(f"cannot read knowledge base {p}: {exc}") from exc
    return load_kb(docs)


def bundled_kb_path() -> Path:
    return Path(str(resources.files("puc") / "data" / "units.json"))


def default_kb() -> KnowledgeBase:
    return read_kb(bundled_kb_path())
