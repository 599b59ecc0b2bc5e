"""Map anomalous unit symbols to the closest known symbol of a dimension."""

from __future__ import annotations

from dataclasses import dataclass
from .kb import KBError, KnowledgeBase, units_of_dimension


@dataclass(frozen=True)
class Correction:
    original: str
    corrected: str
    unit: str
    distance: int


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance with unit-cost insertions, deletions and substitutions."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(min(
                previous[j] + 1,                # deletion
                current[j - 1] + 1,             # insertion
                previous[j - 1] + (ca != cb),   # substitution
            ))
        previous = current
    return previous[-1]


def _candidates(kb: KnowledgeBase, dimension: str):
    key = ("correction-candidates", dimension)
    if key not in kb._memo:
        kb._memo[key] = _build_candidates(kb, dimension)
    return kb._memo[key]


def _build_candidates(kb, dimension):
    # (symbol, unit) pairs; a symbol shared by two units yields two pairs
    pairs = []
    for unit in units_of_dimension(kb, dimension):
        for s in kb.entries[unit].all_symbols:
            pairs.append((s, unit))
    pairs.sort(key=lambda p: (len(p[0]), p[0], p[1]))
    return tuple((s, s.casefold(), u) for s, u in pairs)


def correct_symbol(x: str, dimension: str, kb: KnowledgeBase,
                   max_distance: int | None = None) -> Correction | None:
    """Closest known symbol of `dimension` to `x`.

    Distances compare case-folded strings; the returned symbol keeps the KB
    casing.  Ties go to the smaller case-sensitive distance, then the shorter
    candidate, then the lexicographically smaller one, then the unit name.
    Returns None only when `max_distance` is set and no candidate is close
    enough.
    """
    if not x:
        raise ValueError("cannot correct an empty symbol")
    candidates = _candidates(kb, dimension)
    if not candidates:
        raise KBError(f"dimension {dimension!r} has no unit symbols")
    folded = x.casefold()
    best = None
    for symbol, key, unit in candidates:
        d = edit_distance(folded, key)
        if best is not None and d > best[0]:
            continue
        rank = (d, edit_distance(x, symbol))
        # candidates are pre-sorted by the remaining tie-break keys, so strict < suffices
        if best is None or rank < best[:2]:
            best = (*rank, symbol, unit)
            if rank == (0, 0):
                break
    d, _, symbol, unit = best
    if max_distance is not None and d > max_distance:
        return None
    return Correction(original=x, corrected=symbol, unit=unit, distance=d)
