"""Skew-shift return maps on the torus and the Weyl sums they produce.

The step-``k`` skew-shift with frequency vector ``alpha`` is

    Phi(s)_1 = s_1 + alpha_1,    Phi(s)_i = s_i + s_(i-1) + alpha_i   (mod 1).

Its last coordinate along an orbit is a degree-``k`` polynomial in the time
``n``, so exponential sums of that coordinate are Weyl sums. This module runs
the orbit in one of two numeric modes.

``"fixed64"``
    Coordinates are uint64 words (one unit = 2**-64 turn). The iteration is
    exact for the inputs rounded to that grid.

``"float64"``
    Coordinates are double-double pairs. The phase error after ``n`` steps is
    about ``n**k * 2**-105`` relative to the exact orbit of the given inputs,
    so a cubic sweep to ``N = 2**22`` stays near 1e-13.

Parameters are stored exactly (floats at their binary value, decimal strings
at their decimal value) so that irrationals can carry extra digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from ._numbers import as_fraction, frac_part, split_double
from .errors import InvalidParameter, ResourceExceeded

__all__ = [
    "MODES",
    "SkewShiftSystem",
    "SectionPolynomial",
    "skew_shift",
    "step",
    "step_inverse",
    "iterate",
    "orbit",
    "iterate_closed_form",
    "section_polynomial",
    "monomial_to_section",
    "transport_point",
    "weyl_sum_skew",
    "weyl_partial_sums",
    "weyl_sum_direct",
    "ergodic_sum",
]

MODES = ("float64", "fixed64")
BLOCK = 1 << 16
MAX_TERMS = 1 << 36
_TWO64 = 1 << 64
_INV64 = 2.0**-64


@dataclass(frozen=True)
class SkewShiftSystem:
    k: int
    alpha: tuple[Fraction, ...]
    mode: str = "float64"

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or not 2 <= self.k <= 64:
            raise InvalidParameter(f"step k must be an integer in [2, 64], got {self.k!r}")
        if len(self.alpha) != self.k:
            raise InvalidParameter(f"alpha must have {self.k} entries, got {len(self.alpha)}")
        if self.mode not in MODES:
            raise InvalidParameter(f"mode must be one of {MODES}, got {self.mode!r}")

    def encode(self, s: Sequence):
        """Internal state for a point: uint64 array, or (hi, lo) float arrays."""
        return _encode([as_fraction(x) for x in _check_point(self.k, s)], self.mode)

    def decode(self, state) -> np.ndarray:
        if self.mode == "fixed64":
            return _fixed_to_turns(np.asarray(state, dtype=np.uint64))
        hi, lo = state
        x = np.asarray(hi) + np.asarray(lo)
        x = x - np.floor(x)
        x[x >= 1.0] = 0.0
        return x

    def alpha_state(self):
        return _encode(list(self.alpha), self.mode)


def skew_shift(k: int, alpha: Sequence, mode: str = "float64") -> SkewShiftSystem:
    try:
        a = tuple(as_fraction(x) for x in alpha)
    except (TypeError, ValueError) as exc:
        raise InvalidParameter(f"bad alpha: {exc}") from exc
    return SkewShiftSystem(k=k, alpha=a, mode=mode)


def _check_point(k, s):
    s = list(s)
    if len(s) != k:
        raise InvalidParameter(f"point must have {k} coordinates, got {len(s)}")
    return s


def _to_fixed(q: Fraction) -> int:
    return round(frac_part(q) * _TWO64) % _TWO64


def _encode(vals, mode):
    if mode == "fixed64":
        return np.array([_to_fixed(q) for q in vals], dtype=np.uint64)
    pairs = [split_double(frac_part(q)) for q in vals]
    hi = np.array([p[0] for p in pairs], dtype=np.float64)
    lo = np.array([p[1] for p in pairs], dtype=np.float64)
    return hi, lo


def _fixed_to_turns(u: np.ndarray) -> np.ndarray:
    x = u.astype(np.float64) * _INV64
    x[x >= 1.0] = 0.0
    return x


def _exact_point(sys, s):
    """The point as exact fractions, after the rounding implied by the mode."""
    s = [as_fraction(x) for x in _check_point(sys.k, s)]
    if sys.mode == "fixed64":
        return [Fraction(_to_fixed(q), _TWO64) for q in s], [Fraction(_to_fixed(q), _TWO64) for q in sys.alpha]
    return s, list(sys.alpha)


def _out(sys, vals):
    if sys.mode == "fixed64":
        return _fixed_to_turns(np.array([_to_fixed(q) for q in vals], dtype=np.uint64))
    out = np.array([float(frac_part(q)) for q in vals])
    out[out >= 1.0] = 0.0
    return out


def step(sys: SkewShiftSystem, s: Sequence) -> np.ndarray:
    """One application of the skew-shift; result in [0, 1)^k."""
    x, a = _exact_point(sys, s)
    y = [x[0] + a[0]] + [x[i] + x[i - 1] + a[i] for i in range(1, sys.k)]
    return _out(sys, y)


def step_inverse(sys: SkewShiftSystem, s: Sequence) -> np.ndarray:
    y, a = _exact_point(sys, s)
    x = [y[0] - a[0]]
    for i in range(1, sys.k):
        x.append(y[i] - x[i - 1] - a[i])
    return _out(sys, x)


def _check_n(N):
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
        raise InvalidParameter(f"N must be an integer, got {N!r}")
    N = int(N)
    if N < 0:
        raise InvalidParameter(f"N must be non-negative, got {N}")
    if N > MAX_TERMS:
        raise ResourceExceeded(f"N = {N} exceeds the limit {MAX_TERMS}")
    return N


class _Orbit:
    """Block generator over an orbit, in the internal representation."""

    def __init__(self, sys, s):
        self.sys = sys
        self.state = sys.encode(s)
        self.alpha = sys.alpha_state()

    def block(self, B):
        k = self.sys.k
        if self.sys.mode == "fixed64":
            out = np.empty((k, B), dtype=np.uint64)
            _kernels.orbit_block_fixed(self.state, self.alpha, out)
            return out
        hi, lo = self.state
        oh = np.empty((k, B))
        ol = np.empty((k, B))
        _kernels.orbit_block_dd(hi, lo, self.alpha[0], self.alpha[1], oh, ol)
        return oh, ol

    def last_phases(self, B, ell):
        if self.sys.mode == "fixed64":
            out = np.empty(B, dtype=np.uint64)
            _kernels.last_phase_fixed(self.state, self.alpha, np.uint64(ell % _TWO64), out)
            return _fixed_to_turns(out)
        hi, lo = self.state
        out = np.empty(B)
        _kernels.last_phase_dd(hi, lo, self.alpha[0], self.alpha[1], float(ell), out)
        return out


def iterate(sys: SkewShiftSystem, s: Sequence, N: int) -> np.ndarray:
    """Phi^N(s) by N successive steps of the internal state."""
    N = _check_n(N)
    orb = _Orbit(sys, s)
    while N > 0:
        b = min(N, BLOCK)
        orb.block(b)
        N -= b
    return sys.decode(orb.state)


def orbit(sys: SkewShiftSystem, s: Sequence, N: int) -> np.ndarray:
    """Array of shape (N, k) holding Phi^n(s) for n = 0..N-1."""
    N = _check_n(N)
    if N * sys.k > 1 << 28:
        raise ResourceExceeded("orbit too long to hold in memory; use ergodic_sum instead")
    orb = _Orbit(sys, s)
    res = orb.block(N) if N else None
    if N == 0:
        return np.empty((0, sys.k))
    if sys.mode == "fixed64":
        return _fixed_to_turns(res.T.copy().ravel()).reshape(N, sys.k)
    hi, lo = res
    x = hi.T + lo.T
    x = x - np.floor(x)
    x[x >= 1.0] = 0.0
    return x


def iterate_closed_form(sys: SkewShiftSystem, s: Sequence, N: int) -> np.ndarray:
    """Phi^N(s) from the binomial formula, with exact integer binomials.

    Phi^N(s)_i = sum_{j<i} C(N, j) s_(i-j) + sum_{1<=j<=i} C(N, j) alpha_(i-j+1).
    """
    N = _check_n(N)
    x, a = _exact_point(sys, s)
    k = sys.k
    out = []
    for i in range(1, k + 1):
        acc = sum(math.comb(N, j) * x[i - j - 1] for j in range(i))
        acc += sum(math.comb(N, j) * a[i - j] for j in range(1, i + 1))
        out.append(acc)
    return _out(sys, out)


def transport_point(s: Sequence, y: Sequence) -> np.ndarray:
    """Flow the point by -Y for unit time, Y given on (Y1..Yk) coordinates."""
    s = [as_fraction(v) for v in s]
    y = [as_fraction(v) for v in y]
    if len(s) != len(y):
        raise InvalidParameter("point and Y must have the same length")
    return np.array([float(frac_part(p - q)) for p, q in zip(s, y)])


@dataclass(frozen=True)
class SectionPolynomial:
    """P(n) = sum_i c[i] * C(n, i): the last coordinate of Phi^n(s) before reduction."""

    k: int
    c: tuple[Fraction, ...]

    def __call__(self, n: int) -> Fraction:
        return sum(math.comb(n, i) * ci for i, ci in enumerate(self.c))

    def phase(self, n: int) -> float:
        return float(frac_part(self(n)))

    @property
    def leading(self) -> Fraction:
        return self.c[self.k] / math.factorial(self.k)

    def monomial(self) -> tuple[Fraction, ...]:
        """Monomial coefficients, highest degree first (constant term last)."""
        out = [Fraction(0)] * (self.k + 1)
        for i, ci in enumerate(self.c):
            # C(n, i) = falling factorial / i!, expanded via Stirling numbers of the first kind
            for d, st in enumerate(_falling_coeffs(i)):
                out[self.k - d] += ci * st / math.factorial(i)
        return tuple(out)


def _falling_coeffs(i: int) -> list[int]:
    """Coefficients of n(n-1)...(n-i+1) in ascending powers of n."""
    poly = [1]
    for j in range(i):
        nxt = [0] * (len(poly) + 1)
        for d, c in enumerate(poly):
            nxt[d + 1] += c
            nxt[d] -= j * c
        poly = nxt
    return poly


def section_polynomial(sys: SkewShiftSystem, s: Sequence) -> SectionPolynomial:
    k = sys.k
    x = [as_fraction(v) for v in _check_point(k, s)]
    a = sys.alpha
    c = [x[k - 1]] + [x[k - 1 - i] + a[k - i] for i in range(1, k)] + [a[0]]
    return SectionPolynomial(k=k, c=tuple(c))


def monomial_to_section(k: int, coeffs: Sequence) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """(alpha, s) whose section polynomial is a_1 n^k + ... + a_k n (+ a_0).

    ``coeffs`` lists a_1..a_k, highest degree first; an optional trailing
    constant may be appended. Uses c_i = (finite difference)^i P at 0.
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise InvalidParameter(f"step k must be an integer >= 2, got {k!r}")
    a = [as_fraction(x) for x in coeffs]
    if len(a) == k:
        a.append(Fraction(0))
    if len(a) != k + 1:
        raise InvalidParameter(f"expected {k} or {k + 1} coefficients, got {len(a)}")

    def P(n):
        acc = Fraction(0)
        for ai in a:
            acc = acc * n + ai
        return acc

    vals = [P(n) for n in range(k + 1)]
    c = [sum((-1) ** (i - j) * math.comb(i, j) * vals[j] for j in range(i + 1)) for i in range(k + 1)]
    alpha = (c[k],) + (Fraction(0),) * (k - 1)
    s = tuple(c[k - j] for j in range(1, k)) + (c[0],)
    return alpha, s


def _sum_turns(x: np.ndarray) -> complex:
    ang = (2.0 * np.pi) * x
    return complex(np.cos(ang).sum(), np.sin(ang).sum())


def _check_ell(ell):
    if isinstance(ell, bool) or not isinstance(ell, (int, np.integer)):
        raise InvalidParameter(f"frequency ell must be an integer, got {ell!r}")
    return int(ell)


def weyl_partial_sums(sys: SkewShiftSystem, s: Sequence, ell: int, schedule: Iterable[int]) -> np.ndarray:
    """W_ell(N) for every N in ``schedule`` from a single pass over the orbit.

    Every value agrees bit-for-bit with :func:`weyl_sum_skew` at that N.
    """
    ell = _check_ell(ell)
    sched = [_check_n(n) for n in schedule]
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise InvalidParameter("schedule must be strictly increasing")
    out = np.zeros(len(sched), dtype=complex)
    if not sched:
        return out
    orb = _Orbit(sys, s)
    total = 0j
    start = 0
    idx = 0
    while idx < len(sched) and sched[idx] == 0:
        idx += 1
    last = sched[-1]
    while idx < len(sched):
        b = min(BLOCK, last - start)
        ph = orb.last_phases(b, ell)
        while idx < len(sched) and sched[idx] <= start + b:
            out[idx] = total + _sum_turns(ph[: sched[idx] - start])
            idx += 1
        total = total + _sum_turns(ph)
        start += b
    return out


def weyl_sum_skew(sys: SkewShiftSystem, s: Sequence, ell: int, N: int) -> complex:
    """sum_{n<N} e(ell * Phi^n(s)_k), iterating the skew-shift."""
    return complex(weyl_partial_sums(sys, s, ell, [N])[0])


def ergodic_sum(sys: SkewShiftSystem, s: Sequence, f, N: int) -> complex:
    """sum_{n<N} f(Phi^n(s)) for a trigonometric polynomial f.

    ``f`` is a list of ``(m, c)`` with m an integer vector of length k and
    c a complex coefficient, meaning f(x) = sum c e(m . x).
    """
    N = _check_n(N)
    terms = []
    for m, c in f:
        m = [int(v) for v in m]
        if len(m) != sys.k:
            raise InvalidParameter(f"frequency vectors must have length {sys.k}")
        terms.append((m, complex(c)))
    orb = _Orbit(sys, s)
    acc = [0j] * len(terms)
    done = 0
    while done < N:
        b = min(BLOCK, N - done)
        blk = orb.block(b)
        for t, (m, _) in enumerate(terms):
            if sys.mode == "fixed64":
                u = np.zeros(b, dtype=np.uint64)
                for i, mi in enumerate(m):
                    if mi:
                        u += np.uint64(mi % _TWO64) * blk[i]
                x = _fixed_to_turns(u)
            else:
                hi, lo = blk
                p = np.zeros(b)
                q = np.zeros(b)
                for i, mi in enumerate(m):
                    if mi:
                        p += mi * hi[i]
                        p -= np.floor(p)
                        q += mi * lo[i]
                x = p + q
                x -= np.floor(x)
            acc[t] += _sum_turns(x)
        done += b
    return complex(sum(c * a for (_, c), a in zip(terms, acc)))


def weyl_sum_direct(coeffs: Sequence, ell: int, N: int, mode: str = "float64") -> complex:
    """sum_{n<N} e(ell * P(n)) with P(n) = a_1 n^k + ... + a_k n, evaluated per term.

    ``float64`` reduces each phase exactly mod 1 before rounding it to a
    double. ``fixed64`` rounds each coefficient to the 2**-64 grid and then
    evaluates P(n) exactly mod 2**64. Both sum in the same blocked order as
    the skew-shift path, so identical phases give identical sums.
    """
    if mode not in MODES:
        raise InvalidParameter(f"mode must be one of {MODES}, got {mode!r}")
    ell = _check_ell(ell)
    N = _check_n(N)
    a = [as_fraction(x) for x in coeffs]
    if not a:
        raise InvalidParameter("need at least one coefficient")
    a = [ell * x for x in a]
    if mode == "fixed64":
        A = [np.uint64(_to_fixed(x)) for x in a]
        return _direct_uint(A, N)
    den = 1
    for x in a:
        den = den * x.denominator // math.gcd(den, x.denominator)
    if _TWO64 % den == 0:
        A = [np.uint64((frac_part(x) * _TWO64).numerator % _TWO64) for x in a]
        return _direct_uint(A, N)
    if N > 1 << 22:
        raise ResourceExceeded("exact direct evaluation with non-dyadic coefficients is limited to 2**22 terms")
    num = [int(frac_part(x) * den) for x in a]
    total = 0j
    for start in range(0, N, BLOCK):
        b = min(BLOCK, N - start)
        x = np.empty(b)
        for j in range(b):
            n = start + j
            acc = 0
            for c in num:
                acc = (acc + c) * n % den
            x[j] = acc / den
        total = total + _sum_turns(x)
    return total


def _direct_uint(A, N):
    total = 0j
    for start in range(0, N, BLOCK):
        b = min(BLOCK, N - start)
        n = np.arange(start, start + b, dtype=np.uint64)
        acc = np.zeros(b, dtype=np.uint64)
        for c in A:
            acc = (acc + c) * n
        total = total + _sum_turns(_fixed_to_turns(acc))
    return total
