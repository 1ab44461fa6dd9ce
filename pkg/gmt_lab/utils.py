"""Utility functions for gmt-lab."""

import re
from fractions import Fraction
from typing import Any, Iterable, List, Sequence

from .errors import PayloadError

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(value: Any) -> Fraction:
    """
    Parse an exact rational.

    Accepts "p/q" and "p" strings and plain integers. Floats are rejected so that no rounding can
    enter a payload.
    """
    if isinstance(value, bool):
        raise PayloadError(f"Expected a rational, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise PayloadError(f"Rationals must be given as 'p/q' strings, got {value!r}")
    match = _RATIONAL.match(value)
    if not match:
        raise PayloadError(f"Malformed rational {value!r}")
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise PayloadError(f"Zero denominator in {value!r}")
    return Fraction(int(match.group(1)), denominator)


def format_rational(value: Fraction) -> str:
    """Reduced "p/q" form; integers print without a denominator."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_table(table: Sequence[int]) -> str:
    """Compact key for a function table, e.g. (0, 1, 1) -> "0.1.1"; the empty table is "-"."""
    return ".".join(str(x) for x in table) if table else "-"


def format_rationals(values: Iterable[Fraction]) -> List[str]:
    return [format_rational(v) for v in values]


def truncate_items(items: List[Any], limit: int) -> tuple[List[Any], bool]:
    """Keep the first `limit` witness items of a report section."""
    if len(items) <= limit:
        return items, False
    return items[:limit], True
