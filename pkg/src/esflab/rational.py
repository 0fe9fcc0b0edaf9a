"""Exact arbitrary-precision rational arithmetic.

The canonical value type is ``gmpy2.mpq``: always reduced, denominator
positive, zero represented as 0/1. Everything downstream (symmetric-function
values, valuations, sweep hits) lives in this domain. The helpers here pin
down construction, the serialization format used by checkpoints and JSON
reports ("p/q" in base 10, "/q" omitted when q == 1), and decimal display.
"""

from __future__ import annotations

import mpmath
from gmpy2 import mpq

Rational = mpq


def rational(numerator, denominator=1) -> Rational:
    """Build a reduced rational; raises ZeroDivisionError on denominator 0."""
    return mpq(numerator, denominator)


def add(x: Rational, y: Rational) -> Rational:
    """Exact sum, reduced."""
    return mpq(x) + mpq(y)


def mul(x: Rational, y: Rational) -> Rational:
    """Exact product, reduced."""
    return mpq(x) * mpq(y)


def is_integer(x: Rational) -> bool:
    return mpq(x).denominator == 1


def numerator(x: Rational) -> int:
    return int(mpq(x).numerator)


def denominator(x: Rational) -> int:
    return int(mpq(x).denominator)


def render(x: Rational) -> str:
    """Serialize as "p/q", omitting "/q" when the value is an integer."""
    return str(mpq(x))


def parse(text: str) -> Rational:
    """Inverse of render; accepts "p" and "p/q" with optional sign."""
    try:
        return mpq(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def approx_str(x: Rational, digits: int = 12) -> str:
    """Round-to-nearest decimal with the given significant digits, for display.

    Uses mpmath so values whose numerator/denominator overflow a double
    (the sweeps reach tens of thousands of bits) still format correctly.
    """
    x = mpq(x)
    if x == 0:
        return "0"
    with mpmath.workdps(digits + 10):
        val = mpmath.mpf(int(x.numerator)) / mpmath.mpf(int(x.denominator))
        return mpmath.nstr(val, digits)
