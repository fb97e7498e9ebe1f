"""Continued fractions and Diophantine-type diagnostics.

Inputs are handled exactly: a float is expanded as the dyadic rational it
stores, a decimal string as the decimal it spells. Because those are
stand-ins for an intended real number, the expansion runs the Gauss map on
both ends of the input's uncertainty interval and stops as soon as the two
disagree on a partial quotient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._numbers import as_fraction, precision_of
from .errors import InvalidParameter, ResourceExceeded

__all__ = [
    "ContinuedFraction",
    "JarnikExponents",
    "continued_fraction",
    "convergents",
    "diophantine_exponent_estimate",
    "count_small_denominators",
    "nu_rho_dictionary",
    "jarnik_exponents",
    "golden_ratio",
]

QUOTIENT_CAP = 1 << 60
SCAN_LIMIT = 10**7
ANCHOR_Q = 10


@dataclass(frozen=True)
class ContinuedFraction:
    x: Fraction
    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    terminated: bool  # the expansion reached the end of a rational
    truncated: bool  # stopped early: precision exhausted or quotient cap hit
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "x": str(self.x.numerator) if self.x.denominator == 1 else f"{self.x.numerator}/{self.x.denominator}",
            "quotients": list(self.quotients),
            "convergents": [[p, q] for p, q in self.convergents],
        }


def golden_ratio(digits: int = 60) -> Fraction:
    """(1 + sqrt 5)/2 correct to ``digits`` decimal places, as an exact decimal."""
    s = math.isqrt(5 * 10 ** (2 * digits))
    return Fraction(10**digits + s, 2 * 10**digits)


def _cf_exact(x: Fraction, depth: int):
    qs = []
    y = x
    for _ in range(depth):
        a = math.floor(y)
        qs.append(a)
        r = y - a
        if r == 0:
            return qs, True
        y = 1 / r
    return qs, False


def convergents(quotients: Sequence[int]) -> list[tuple[int, int]]:
    out = []
    p0, q0, p1, q1 = 1, 0, 0, 1
    for a in quotients:
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        out.append((p0, q0))
    return out


def continued_fraction(x, depth: int = 64, precision=None) -> ContinuedFraction:
    """Partial quotients and convergents of x, up to ``depth`` terms.

    ``precision`` overrides the uncertainty implied by the input type
    (0 means treat the input as exact).
    """
    if isinstance(depth, bool) or not isinstance(depth, int) or depth < 1:
        raise InvalidParameter(f"depth must be a positive integer, got {depth!r}")
    try:
        xf = as_fraction(x)
        eps = as_fraction(precision) if precision is not None else precision_of(x)
    except (TypeError, ValueError, ArithmeticError) as exc:
        raise InvalidParameter(f"cannot read x: {exc}") from exc
    if eps < 0:
        raise InvalidParameter("precision must be non-negative")

    if eps == 0:
        qs, done = _cf_exact(xf, depth)
        reason = "rational" if done else ""
        truncated = False
    else:
        lo, _ = _cf_exact(xf - eps, depth + 1)
        hi, _ = _cf_exact(xf + eps, depth + 1)
        qs = []
        for a, b in zip(lo, hi):
            if a != b or len(qs) == depth:
                break
            qs.append(a)
        done = False
        truncated = len(qs) < depth
        reason = "input precision exhausted" if truncated else ""

    # very large quotients mean the rest is noise; treat x as rational there
    for i, a in enumerate(qs):
        if i > 0 and a > QUOTIENT_CAP:
            qs = qs[:i]
            truncated, done, reason = True, True, "quotient cap"
            break
    return ContinuedFraction(
        x=xf,
        quotients=tuple(qs),
        convergents=tuple(convergents(qs)),
        terminated=done,
        truncated=truncated,
        reason=reason,
    )


def _dist(q: int, x: Fraction) -> Fraction:
    r = (q * x) % 1
    return min(r, 1 - r)


def diophantine_exponent_estimate(x, Qmax) -> float:
    """Finite-range estimate of the exponent nu in ||q x|| >= C q^-nu.

    Along the convergent denominators q_n <= Qmax, take the largest slope of
    log(1/||q_n x||) against log q_n measured from an anchor convergent (the
    first one with q >= 10). Measuring from an anchor removes the unknown
    constant C, so badly approximable numbers give values near 1 already at
    moderate Qmax. The estimate never decreases as Qmax grows. Returns inf
    when some q <= Qmax makes ||q x|| vanish.
    """
    try:
        Q = int(Qmax)
    except (TypeError, ValueError) as exc:
        raise InvalidParameter(f"bad Qmax {Qmax!r}") from exc
    if Q < ANCHOR_Q:
        raise InvalidParameter(f"Qmax must be at least {ANCHOR_Q}")
    cf = continued_fraction(x, depth=4 * int(math.log2(Q)) + 8)
    xf = cf.x
    qs = [q for _, q in cf.convergents if 1 < q <= Q]
    for q in qs:
        if _dist(q, xf) == 0:
            return math.inf
    if not qs:
        return 0.0

    def y(q):
        return -math.log(_dist(q, xf))

    anchor = next((q for q in qs if q >= ANCHOR_Q), None)
    if anchor is None or anchor == qs[-1]:
        q = qs[-1]
        return y(q) / math.log(q)
    ya, la = y(anchor), math.log(anchor)
    return max((y(q) - ya) / (math.log(q) - la) for q in qs if q > anchor)


def count_small_denominators(x, N: int, delta) -> int:
    """#{0 < |n| <= N : ||n x|| <= delta}.

    x is taken mod 1 and rounded to the 2**-64 grid; n x mod 1 is then exact
    in uint64 arithmetic. For floats in [2**-11, 1) the rounding is exact.
    """
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidParameter(f"N must be a positive integer, got {N!r}")
    if N > SCAN_LIMIT:
        raise ResourceExceeded(f"scan length {N} exceeds {SCAN_LIMIT}")
    d = as_fraction(delta)
    if not 0 < d <= Fraction(1, 2):
        raise InvalidParameter("delta must lie in (0, 1/2]")
    xf = as_fraction(x) % 1
    X = np.uint64(round(xf * (1 << 64)) % (1 << 64))
    thresh = int(math.floor(d * (1 << 64)))
    count = 0
    step = 1 << 20
    for start in range(1, int(N) + 1, step):
        n = np.arange(start, min(start + step, int(N) + 1), dtype=np.uint64)
        r = n * X
        dist = np.minimum(r, np.uint64(0) - r)  # 0 - r wraps to 2**64 - r
        if thresh >= 1 << 64:
            count += len(n)
        else:
            count += int(np.count_nonzero(dist <= np.uint64(thresh)))
    return 2 * count


def nu_rho_dictionary(k: int, rho1):
    """Exponent nu that matches a given rho_1 in the Weyl-sum dictionary: nu = 1/rho_1."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise InvalidParameter("k must be an integer >= 2")
    if isinstance(rho1, float):
        if not 0 < rho1 <= 1:
            raise InvalidParameter("rho_1 must lie in (0, 1]")
        return 1.0 / rho1
    r = as_fraction(rho1)
    if not 0 < r <= 1:
        raise InvalidParameter("rho_1 must lie in (0, 1]")
    return 1 / r


@dataclass(frozen=True)
class JarnikExponents:
    b: object
    b_i: tuple
    common: object  # shared exponent of exp(t) in the Jarnik-type inequalities

    @property
    def valid(self) -> bool:
        return all(v > 0 for v in self.b_i)


def jarnik_exponents(k: int, rho: Sequence, nu) -> JarnikExponents:
    """Exponents b, b_2..b_k of the Jarnik-type system.

    rho is the full scaling vector (rho_1..rho_k). Exact when inputs are exact.
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise InvalidParameter("k must be an integer >= 2")
    if len(rho) != k:
        raise InvalidParameter(f"rho must have {k} entries")
    exact = not any(isinstance(v, float) for v in list(rho) + [nu])
    conv = as_fraction if exact else float
    r = [conv(v) for v in rho]
    n = conv(nu)
    D = k * r[0] + k - 1
    b = ((k - 1) * n - k * r[0] + 1) / D
    bi = tuple((n * r[0] + ((k - 1) * n + k) * r[i] - 1) / D for i in range(1, k))
    common = (1 - n * r[0]) / D
    return JarnikExponents(b=b, b_i=bi, common=common)
