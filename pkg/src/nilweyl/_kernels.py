"""Compiled inner loops for the skew-shift orbit.

Two state representations:

* fixed: uint64 words, one unit = 2**-64 of a turn. Addition wraps, so the
  iteration is exact for inputs on the 2**-64 grid.
* dd: double-double (hi, lo) pairs kept in [0, 1). Each step is an error-free
  two-sum, so the orbit carries about 106 bits.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


@numba.njit(cache=True)
def _two_prod(a, b):
    p = a * b
    c = 134217729.0 * a  # Dekker split
    ah = c - (c - a)
    al = a - ah
    c = 134217729.0 * b
    bh = c - (c - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


@numba.njit(cache=True)
def _dd_add_mod1(ah, al, bh, bl):
    """(a + b) mod 1 for double-doubles whose high parts lie in [0, 1].

    Every step is exact apart from the final rounding into the low part, so
    the high part stays in [0, 1] and no bits are lost at the wrap point.
    """
    s, e = _two_sum(ah, bh)
    s -= np.floor(s)  # s in [0, 2], so this is exact
    hi, lo = _two_sum(s, e + (al + bl))
    if hi < 0.0:
        hi, t = _two_sum(hi, 1.0)
        lo += t
    elif hi > 1.0:
        hi, lo = _two_sum(hi - 1.0, lo)
    return hi, lo


@numba.njit(cache=True)
def orbit_block_fixed(state, alpha, out):
    """Write states n = 0..B-1 into out[:, n], leave state at n = B."""
    k = state.shape[0]
    B = out.shape[1]
    for n in range(B):
        for i in range(k):
            out[i, n] = state[i]
        for i in range(k - 1, 0, -1):
            state[i] = state[i] + state[i - 1] + alpha[i]
        state[0] = state[0] + alpha[0]


@numba.njit(cache=True)
def orbit_block_dd(hi, lo, ahi, alo, out_hi, out_lo):
    k = hi.shape[0]
    B = out_hi.shape[1]
    for n in range(B):
        for i in range(k):
            out_hi[i, n] = hi[i]
            out_lo[i, n] = lo[i]
        for i in range(k - 1, 0, -1):
            h, l = _dd_add_mod1(hi[i], lo[i], hi[i - 1], lo[i - 1])
            hi[i], lo[i] = _dd_add_mod1(h, l, ahi[i], alo[i])
        hi[0], lo[0] = _dd_add_mod1(hi[0], lo[0], ahi[0], alo[0])


@numba.njit(cache=True)
def last_phase_fixed(state, alpha, ell, out):
    """Phases ell * s_k(n) in 2**-64 units, n = 0..B-1."""
    k = state.shape[0]
    B = out.shape[0]
    for n in range(B):
        out[n] = ell * state[k - 1]
        for i in range(k - 1, 0, -1):
            state[i] = state[i] + state[i - 1] + alpha[i]
        state[0] = state[0] + alpha[0]


@numba.njit(cache=True)
def last_phase_dd(hi, lo, ahi, alo, ell, out):
    """Phases frac(ell * s_k(n)) as floats, n = 0..B-1."""
    k = hi.shape[0]
    B = out.shape[0]
    for n in range(B):
        p, pe = _two_prod(ell, hi[k - 1])
        x = (p - np.floor(p)) + (pe + ell * lo[k - 1])
        x -= np.floor(x)
        out[n] = 0.0 if x >= 1.0 else x
        for i in range(k - 1, 0, -1):
            h, l = _dd_add_mod1(hi[i], lo[i], hi[i - 1], lo[i - 1])
            hi[i], lo[i] = _dd_add_mod1(h, l, ahi[i], alo[i])
        hi[0], lo[0] = _dd_add_mod1(hi[0], lo[0], ahi[0], alo[0])
