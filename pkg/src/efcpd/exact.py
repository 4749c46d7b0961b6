"""Exact rational scalars and the factorial kernels built on them.

Every exact computation in the package runs on :class:`fractions.Fraction`,
which is already canonical (positive denominator, reduced) after each
operation.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

ExactRational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a Fraction.

    Decimal and exponent notations are rejected so that a value which
    crosses the CLI boundary is always exactly what the user typed.
    """
    if isinstance(text, Fraction):
        return text
    match = _RATIONAL_RE.match(str(text))
    if match is None:
        raise ValueError(f"not a rational literal of the form p/q or p: {text!r}")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(value: Rational) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and rational strings; floats are refused."""
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def rising_factorial(a, ell: int):
    """Return a(a+1)...(a+ell-1); the empty product (ell=0) is 1.

    Works for any numeric ``a``; with a Fraction the result is exact.
    """
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    out = 1 if not isinstance(a, float) else 1.0
    for j in range(ell):
        out = out * (a + j)
    if isinstance(a, Fraction) or isinstance(a, int):
        return Fraction(out)
    return out


def alpha_weight(alpha, m: int):
    """One factor -(-alpha)_{m} of the sampling formula.

    Equals alpha * (1-alpha)(2-alpha)...(m-1-alpha) and is strictly positive
    for 0 < alpha < 1.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if m < 1:
        raise ValueError(f"block size must be >= 1, got {m}")
    return alpha * rising_factorial(1 - alpha, m - 1)
