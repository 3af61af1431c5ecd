"""Exact number handling: rational parsing and canonical formatting.

Level and chain computations depend on exact equality of distances, so
rational inputs stay rational end to end.  Decimal strings are parsed
exactly ("0.1" becomes 1/10, not the nearest binary float).
"""
from __future__ import annotations

from decimal import Decimal, InvalidOperation
from fractions import Fraction

Number = int | Fraction | float


def parse_number(text: str) -> Fraction:
    """Parse "7/3", "-2", or "0.125" into an exact Fraction."""
    s = text.strip()
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            return Fraction(int(num.strip()), int(den.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational literal {text!r}") from exc
    try:
        return Fraction(Decimal(s))
    except InvalidOperation as exc:
        raise ValueError(f"bad number literal {text!r}") from exc


def as_exact(value) -> Fraction:
    """Coerce a user-supplied weight to an exact rational.

    Floats are read through their shortest decimal repr, so a literal like
    0.1 means one tenth exactly.
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not weights")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        return parse_number(value)
    raise ValueError(f"cannot interpret {value!r} as an exact number")


def format_number(value) -> str:
    """Canonical string form: integers bare, rationals "p/q", floats repr."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_float(value) -> float:
    return float(value)
