"""Canonical number-to-text formatting shared by encoders, templates and tables.

Moodle's CLOZE parser chokes on exponent notation and thousands separators,
so every number the package emits goes through format_number: fixed point,
'.' decimal separator, trailing zeros trimmed, at most 12 significant digits.
"""

from __future__ import annotations

import decimal
import math

MAX_SIG_DIGITS = 12


def format_number(x: float) -> str:
    """Format a number the way it appears in question text and CLOZE strings."""
    if isinstance(x, bool):
        return "TRUE" if x else "FALSE"
    if x != x or math.isinf(x):
        raise ValueError(f"cannot format non-finite number {x!r}")
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    s = f"{x:.{MAX_SIG_DIGITS}g}"
    if "e" in s or "E" in s:
        exp = int(s.lower().partition("e")[2])
        if exp < 0:
            # keep MAX_SIG_DIGITS significant digits in fixed-point form
            s = f"{x:.{-exp + MAX_SIG_DIGITS - 1}f}"
        else:
            s = f"{x:.0f}"
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s


def round_half_away(x: float, digits: int = 0) -> float:
    """Round to `digits` decimals, ties away from zero.

    Works on the shortest decimal representation of x, so round(0.125, 2)
    gives 0.13 even though 0.125 is stored as 0.125000...011 in binary.
    """
    if x != x or math.isinf(x):
        raise ValueError("cannot round non-finite number")
    q = decimal.Decimal(1).scaleb(-digits)
    d = decimal.Decimal(repr(x)).quantize(q, rounding=decimal.ROUND_HALF_UP)
    return float(d)


def parse_number(text: str) -> float | None:
    """Parse a numeric literal; '.' decimals only, no locale forms.

    Returns None when text is not a plain numeric literal (rejects nan/inf
    spellings that float() would accept).
    """
    t = text.strip()
    if not t:
        return None
    body = t[1:] if t[0] in "+-" else t
    if not body:
        return None
    mantissa, _, exp = body.partition("e") if "e" in body else body.partition("E")
    if exp and not (exp.lstrip("+-").isdigit() and exp.lstrip("+-")):
        return None
    int_part, dot, frac_part = mantissa.partition(".")
    if not (int_part.isdigit() or (dot and frac_part.isdigit() and int_part == "")):
        return None
    if dot and frac_part and not frac_part.isdigit():
        return None
    if int_part and not int_part.isdigit():
        return None
    if not int_part and not frac_part:
        return None
    try:
        return float(t)
    except ValueError:
        return None
