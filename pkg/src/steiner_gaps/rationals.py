"""Exact rational arithmetic helpers shared across the package.

All public data structures carry :class:`fractions.Fraction` values.  The
exact LP solver internally converts to ``gmpy2.mpq`` when available (it is
substantially faster), but that is an implementation detail of the solver
module; everything user-facing round-trips through ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rat = Fraction
RatLike = Union[int, str, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value: RatLike, den: int | None = None) -> Fraction:
    """Build a Fraction from an int, a ``"p/q"`` string, or a pair."""
    if den is not None:
        return Fraction(value, den)
    if isinstance(value, str):
        return parse_rat(value)
    return Fraction(value)


def parse_rat(text: str) -> Fraction:
    """Parse ``"p/q"``, plain integers, or decimal literals."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(text)


def rat_str(q: RatLike) -> str:
    """Canonical ``"p/q"`` rendering (always with an explicit denominator)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def trunc_decimal(q: RatLike, places: int) -> str:
    """Decimal expansion truncated toward zero to exactly ``places`` digits."""
    q = Fraction(q)
    sign = "-" if q < 0 else ""
    q = abs(q)
    scale = 10**places
    total = (q.numerator * scale) // q.denominator
    whole, frac = divmod(total, scale)
    if places == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{places}d}"


def trunc5(q: RatLike) -> str:
    """Five-place truncation used for table display (e.g. ``16/15 -> 1.06666``)."""
    return trunc_decimal(q, 5)


def decimal30(q: RatLike) -> str:
    """30-place truncated decimal used when exporting LP files."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    text = trunc_decimal(q, 30)
    return text.rstrip("0").rstrip(".")
