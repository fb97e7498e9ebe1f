"""Exact-number plumbing shared by the modules.

Real parameters are kept as :class:`fractions.Fraction` so that every float
input is taken at its exact binary value, and decimal strings are taken at
their exact decimal value. That lets an irrational be supplied with more
digits than a float holds (``"1.41421356237309504880168872420969807857"``).
"""

from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction
from numbers import Rational

__all__ = ["as_fraction", "frac_part", "gen_binom", "precision_of", "split_double"]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            return Fraction(s)
        try:
            d = Decimal(s)
        except ArithmeticError:
            raise ValueError(f"not a number: {x!r}") from None
        if not d.is_finite():
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(d)
    # numpy scalars, mpmath mpf and friends
    if hasattr(x, "as_integer_ratio"):
        return Fraction(*x.as_integer_ratio())
    if hasattr(x, "man") and hasattr(x, "exp"):  # mpmath.mpf
        return Fraction(int(x.man)) * Fraction(2) ** int(x.exp)
    return Fraction(float(x))


def precision_of(x) -> Fraction:
    """Half-width of the uncertainty interval implied by the input type.

    Floats are good to half an ulp, decimal strings to half a unit in the
    last written digit, Fractions and ints are exact (returns 0).
    """
    if isinstance(x, float):
        return Fraction(math.ulp(x)) / 2 if x != 0 else Fraction(0)
    if isinstance(x, str) and "/" not in x:
        d = Decimal(x.strip())
        exp = d.as_tuple().exponent
        return Fraction(1, 2) * Fraction(10) ** exp if exp < 0 else Fraction(0)
    if isinstance(x, Decimal):
        exp = x.as_tuple().exponent
        return Fraction(1, 2) * Fraction(10) ** exp if exp < 0 else Fraction(0)
    return Fraction(0)


def frac_part(q: Fraction) -> Fraction:
    return q - math.floor(q)


def split_double(q: Fraction) -> tuple[float, float]:
    """Return (hi, lo) with hi + lo approximating q to about 106 bits."""
    hi = float(q)
    lo = float(q - Fraction(hi))
    return hi, lo


def gen_binom(t, n: int):
    """Generalized binomial t(t-1)...(t-n+1)/n! for any ring element t."""
    if n < 0:
        return 0
    out = Fraction(1) if not isinstance(t, float) else 1.0
    for j in range(n):
        out = out * (t - j) / (j + 1)
    return out
