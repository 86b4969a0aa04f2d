"""Exact rationals and their "p/q" wire format.

Every measure, time and CDF value in the package is a `fractions.Fraction`
(arbitrary-precision, always in lowest terms, exact arithmetic).  This module
only adds the canonical string codec used by all JSON surfaces.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import SchemaError

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" (or a bare integer "p") into a Fraction.

    Normalizes to lowest terms, so "10/54" parses to 5/27.
    """
    if not isinstance(text, str):
        raise SchemaError(f"rational must be a string, got {type(text).__name__}")
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise SchemaError(f"not a rational: {text!r} (expected 'p/q')")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise SchemaError(f"zero denominator in rational {text!r}")
    return Fraction(num, den)


def format_rational(x: Fraction) -> str:
    """Canonical "p/q" rendering (lowest terms, denominator always present)."""
    return f"{x.numerator}/{x.denominator}"


def decimal_str(x: Fraction, digits: int = 12) -> str:
    """Decimal rendering at `digits` significant digits, for CSV/plots only."""
    if x == 0:
        return "0"
    return f"{float(x):.{digits}g}"
