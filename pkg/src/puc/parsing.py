"""Split raw cells into a numeric value and a unit symbol."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

_NUMBER = r"""
    [-+]?                   # optional sign
    (?: \d+ / \d+           # 1/4
      | \d* [.,] \d+        # .1  9.1  9,1
      | \d+ \.?             # 1  12  12.
    )
"""

# Number first, symbol after (the usual position).
_SUFFIX = re.compile(
    rf"""
    (?P<number> {_NUMBER} )?
    \s*
    (?P<symbol> [\w\s.!?\\-]* )
    """,
    re.VERBOSE,
)

# Symbol before the number, as with "$159000" or "$ 1012".
_PREFIX = re.compile(
    rf"""
    (?P<symbol> [^\d\s+\-.,] .*? )
    \s*
    (?P<number> {_NUMBER} )
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class ParsedCell:
    raw: str
    value: float | None = None
    symbol: str | None = None
    parse_ok: bool = True

    @property
    def observed(self) -> str | None:
        """The symbol the model sees; unparseable cells expose their text."""
        if not self.parse_ok:
            return self.raw.strip() or None
        return self.symbol


def _to_number(text: str) -> float | None:
    text = text.rstrip(".")
    try:
        if "/" in text:
            num, den = text.split("/")
            value = int(num) / int(den)
        else:
            value = float(text.replace(",", "."))
    except (ZeroDivisionError, OverflowError, ValueError):
        return None
    return value if math.isfinite(value) else None


def _clean_symbol(text: str | None) -> str | None:
    if text is None:
        return None
    text = text.strip().rstrip(".").strip()
    return text or None


def parse_cell(text: str) -> ParsedCell:
    """Parse one cell such as ``"70 USD"``, ``"$ 1012"`` or ``"1/4 lb"``.

    Never raises: content outside the grammar gives ``parse_ok=False``.
    """
    if text is None:
        text = ""
    stripped = text.strip()
    if not stripped:
        return ParsedCell(raw=text)

    m = _SUFFIX.fullmatch(stripped)
    if m is not None and m.group("number"):
        value = _to_number(m.group("number"))
        if value is None:
            return ParsedCell(raw=text, parse_ok=False)
        return ParsedCell(raw=text, value=value, symbol=_clean_symbol(m.group("symbol")))

    p = _PREFIX.fullmatch(stripped)
    if p is not None:
        value = _to_number(p.group("number"))
        symbol = _clean_symbol(p.group("symbol"))
        if value is not None and symbol is not None:
            return ParsedCell(raw=text, value=value, symbol=symbol)

    if m is not None:
        return ParsedCell(raw=text, symbol=_clean_symbol(m.group("symbol")))
    return ParsedCell(raw=text, parse_ok=False)


def parse_column(cells) -> list[ParsedCell]:
    return [parse_cell(c) for c in cells]
