"""Exact scalar arithmetic over the rationals.

Every number in this package is a ``fractions.Fraction``: arbitrary precision,
always in lowest terms, positive denominator.  No floating point is used
anywhere.  The text format is "p/q" (or just "p" when q = 1).
"""

from fractions import Fraction

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_scalar(text):
    """Parse "p/q" or "p" (p possibly negative) into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError("scalar must be a string like '3/4', got %r" % (text,))
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/")
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(int(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError("malformed scalar %r: %s" % (text, exc)) from None
    return value


def format_scalar(x):
    """Render a Fraction as "p/q", or "p" when the denominator is 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)
