"""Filiform Lie algebras with exact rational structure constants.

The canonical filiform algebra of step ``k`` has basis ``X, Y1, ..., Yk`` and
the only nonzero brackets ``[X, Yi] = Y(i+1)`` for ``i < k``. Besides the
canonical basis this module carries

* the ``eta`` basis in which the group law of the standard lattice is written,
  with brackets ``[xi, eta_i] = sum_{m>i} theta(m-i) eta_m`` and
  ``theta(m) = (-1)**(m-1)/m``;
* the upper-triangular change of basis ``S`` (rows are ``Yi`` expressed in the
  ``eta`` basis) produced by a three-term recurrence in ``theta``;
* the quasi-Abelian cover of dimension ``1 + k(k+1)/2`` and its quotient map.

All arithmetic is done in :class:`fractions.Fraction` unless the caller
passes floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from ._numbers import as_fraction, gen_binom
from .errors import InvalidParameter, NoSolution

__all__ = [
    "LieAlgebra",
    "FiliformAlgebra",
    "QuasiAbelianCover",
    "filiform",
    "eta_algebra",
    "theta",
    "vergne_matrix",
    "check_vergne",
    "ad_exp",
    "ad_exp_matrix",
    "h_map",
    "quasi_abelian",
    "x_alpha",
    "conjugating_element",
]

MAX_STEP = 64


def _check_k(k) -> int:
    if isinstance(k, bool) or not isinstance(k, int):
        raise InvalidParameter(f"step k must be an integer, got {k!r}")
    if k < 2 or k > MAX_STEP:
        raise InvalidParameter(f"step k must lie in [2, {MAX_STEP}], got {k}")
    return k


def _fmt_coeff(c: Fraction):
    return int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


@dataclass(frozen=True)
class LieAlgebra:
    """A finite-dimensional Lie algebra given by its structure constants.

    ``table[(a, b)]`` with ``a < b`` maps output basis indices to coefficients
    of ``[e_a, e_b]``. Missing pairs bracket to zero.
    """

    names: tuple[str, ...]
    table: Mapping[tuple[int, int], Mapping[int, Fraction]]

    @property
    def dim(self) -> int:
        return len(self.names)

    def basis_bracket(self, a: int, b: int) -> dict[int, Fraction]:
        if a == b:
            return {}
        if a < b:
            return dict(self.table.get((a, b), {}))
        return {c: -v for c, v in self.table.get((b, a), {}).items()}

    def bracket(self, u: Sequence, v: Sequence) -> list:
        """Bracket of two coefficient vectors (bilinear extension of the table)."""
        if len(u) != self.dim or len(v) != self.dim:
            raise InvalidParameter("vector length does not match algebra dimension")
        zero = u[0] * 0 if len(u) else 0
        out = [zero] * self.dim
        for (a, b), row in self.table.items():
            w = u[a] * v[b] - u[b] * v[a]
            if w == 0:
                continue
            for c, coef in row.items():
                out[c] = out[c] + w * coef
        return out

    def unit(self, i: int) -> list[Fraction]:
        e = [Fraction(0)] * self.dim
        e[i] = Fraction(1)
        return e

    def jacobi_residual(self) -> Fraction:
        """Largest |coefficient| of the Jacobiator over all basis triples."""
        worst = Fraction(0)
        for a, b, c in itertools.combinations(range(self.dim), 3):
            ea, eb, ec = self.unit(a), self.unit(b), self.unit(c)
            t1 = self.bracket(ea, self.bracket(eb, ec))
            t2 = self.bracket(eb, self.bracket(ec, ea))
            t3 = self.bracket(ec, self.bracket(ea, eb))
            for x, y, z in zip(t1, t2, t3):
                worst = max(worst, abs(x + y + z))
        return worst

    def ad_matrix(self, u: Sequence) -> list[list]:
        """Matrix of ad(u); column j is [u, e_j]."""
        cols = [self.bracket(list(u), self.unit(j)) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def to_json(self) -> dict:
        rows = []
        for (a, b) in sorted(self.table):
            out = {self.names[c]: _fmt_coeff(v) for c, v in sorted(self.table[(a, b)].items()) if v != 0}
            if out:
                rows.append({"lhs": self.names[a], "rhs": self.names[b], "out": out})
        return {"dim": self.dim, "brackets": rows}


@dataclass(frozen=True)
class FiliformAlgebra(LieAlgebra):
    k: int = 0

    def to_json(self) -> dict:
        d = super().to_json()
        return {"k": self.k, "brackets": d["brackets"]}


def filiform(k: int) -> FiliformAlgebra:
    """Canonical filiform algebra: basis X, Y1..Yk, [X, Yi] = Y(i+1)."""
    k = _check_k(k)
    names = ("X",) + tuple(f"Y{i}" for i in range(1, k + 1))
    table = {(0, i): {i + 1: Fraction(1)} for i in range(1, k)}
    return FiliformAlgebra(names=names, table=table, k=k)


def theta(m: int) -> Fraction:
    if m < 1:
        raise InvalidParameter("theta is defined for m >= 1")
    return Fraction((-1) ** (m - 1), m)


def eta_algebra(k: int) -> FiliformAlgebra:
    """The same algebra written in the basis xi, eta_1..eta_k of the lattice group law."""
    k = _check_k(k)
    names = ("xi",) + tuple(f"eta{i}" for i in range(1, k + 1))
    table = {}
    for i in range(1, k):
        table[(0, i)] = {m: theta(m - i) for m in range(i + 1, k + 1)}
    return FiliformAlgebra(names=names, table=table, k=k)


def vergne_matrix(k: int) -> tuple[tuple[Fraction, ...], ...]:
    """Upper-triangular S with Yi = sum_j S[i][j] eta_j (0-based rows and columns).

    Row 1 is the first unit vector and S[i+1][j] = sum_{l=i}^{j-1} S[i][l] theta(j-l).
    """
    k = _check_k(k)
    S = [[Fraction(0)] * k for _ in range(k)]
    S[0][0] = Fraction(1)
    for i in range(k - 1):
        for j in range(i + 1, k):
            acc = Fraction(0)
            for l in range(i, j):
                acc += S[i][l] * theta(j - l)
            S[i + 1][j] = acc
    return tuple(tuple(r) for r in S)


def check_vergne(k: int) -> bool:
    """Exact check that S turns the eta bracket table into the canonical one."""
    S = vergne_matrix(k)
    eta = eta_algebra(k)
    xi = eta.unit(0)
    for i in range(k):
        yi = [Fraction(0)] + list(S[i])
        got = eta.bracket(xi, yi)
        want = [Fraction(0)] + (list(S[i + 1]) if i + 1 < k else [Fraction(0)] * k)
        if got != want:
            return False
    return True


def ad_exp_matrix(k: int, t) -> list[list]:
    """Matrix of Ad(exp(tX)) on the full basis X, Y1..Yk (exact for rational t)."""
    k = _check_k(k)
    if not isinstance(t, float):
        t = as_fraction(t)
    one = 1.0 if isinstance(t, float) else Fraction(1)
    n = k + 1
    M = [[one * 0 for _ in range(n)] for _ in range(n)]
    M[0][0] = one
    for i in range(1, n):
        for j in range(0, n - i):
            M[i + j][i] = t**j / math.factorial(j)
    return M


def ad_exp(alg: FiliformAlgebra, t, v: Sequence) -> list:
    """Ad(exp(tX)) v, i.e. Yi -> sum_j t^j/j! Y(i+j); X is fixed."""
    if len(v) != alg.dim:
        raise InvalidParameter("vector length does not match algebra dimension")
    M = ad_exp_matrix(alg.k, t)
    return [sum(M[r][c] * v[c] for c in range(alg.dim)) for r in range(alg.dim)]


def h_map(k: int, t, s: Sequence) -> tuple:
    """Conjugation by x^t in eta coordinates: s'_i = sum_l binom(t, l) s_{i-l}."""
    k = _check_k(k)
    if len(s) != k:
        raise InvalidParameter(f"expected {k} coordinates, got {len(s)}")
    out = []
    for i in range(k):
        acc = s[0] * 0
        for l in range(i + 1):
            acc = acc + gen_binom(t, l) * s[i - l]
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class QuasiAbelianCover:
    """Quasi-Abelian algebra with basis X, Y_{i,j} (i + j <= k + 1).

    ``index`` lists the pairs (i, j) in basis order (X is position 0).
    ``ideal`` spans the kernel of the quotient onto the filiform algebra.
    """

    k: int
    algebra: LieAlgebra
    index: tuple[tuple[int, int], ...]
    ideal: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def position(self, i: int, j: int) -> int:
        return 1 + self.index.index((i, j))

    def project(self, v: Sequence) -> list:
        """Quotient map onto filiform(k): Y_{i,j} -> Y(i+j-1), X -> X."""
        out = [v[0] * 0] * (self.k + 1)
        out[0] = v[0]
        for p, (i, j) in enumerate(self.index, start=1):
            out[i + j - 1] = out[i + j - 1] + v[p]
        return out

    def verify_quotient(self) -> bool:
        """Ideal is an ideal, lies in the kernel, and the quotient table is filiform."""
        fil = filiform(self.k)
        alg = self.algebra
        for w in self.ideal:
            if any(c != 0 for c in self.project(list(w))):
                return False
            for a in range(alg.dim):
                if any(c != 0 for c in self.project(alg.bracket(alg.unit(a), list(w)))):
                    return False
        # the kernel has the right dimension
        if len(self.ideal) != alg.dim - fil.dim:
            return False
        for a in range(alg.dim):
            for b in range(alg.dim):
                lhs = self.project(alg.bracket(alg.unit(a), alg.unit(b)))
                rhs = fil.bracket(self.project(alg.unit(a)), self.project(alg.unit(b)))
                if lhs != rhs:
                    return False
        return True


def quasi_abelian(k: int) -> QuasiAbelianCover:
    k = _check_k(k)
    index = tuple(sorted(((i, j) for j in range(1, k + 1) for i in range(1, k + 2 - j)),
                         key=lambda p: (p[1], p[0])))
    pos = {p: n + 1 for n, p in enumerate(index)}
    names = ("X",) + tuple(f"Y{i},{j}" for i, j in index)
    table = {}
    for (i, j), p in pos.items():
        if i + j <= k:
            table[(0, p)] = {pos[(i + 1, j)]: Fraction(1)}
    alg = LieAlgebra(names=names, table=table)
    ideal = []
    for (i, j), p in pos.items():
        if j >= 2:
            w = [Fraction(0)] * alg.dim
            w[pos[(i + 1, j - 1)]] = Fraction(1)
            w[p] = Fraction(-1)
            ideal.append(tuple(w))
    return QuasiAbelianCover(k=k, algebra=alg, index=index, ideal=tuple(ideal))


def x_alpha(alg: FiliformAlgebra, alpha: Sequence) -> list[Fraction]:
    """Generator -X + sum alpha_i Yi of the nilflow with frequency vector alpha."""
    if len(alpha) != alg.k:
        raise InvalidParameter(f"alpha must have {alg.k} entries")
    return [Fraction(-1)] + [as_fraction(a) for a in alpha]


def conjugating_element(alg: FiliformAlgebra, alpha: Sequence, beta: Sequence) -> list[Fraction]:
    """Coefficients of Y in span(Y1..Yk) with [X, Y] = X_beta - X_alpha.

    Exists iff alpha_1 == beta_1. The central coefficient is a free parameter
    and is set to 0. Flowing a point by -Y for unit time conjugates the
    alpha-nilflow to the beta-nilflow.
    """
    k = alg.k
    if len(alpha) != k or len(beta) != k:
        raise InvalidParameter(f"alpha and beta must have {k} entries")
    a = [as_fraction(x) for x in alpha]
    b = [as_fraction(x) for x in beta]
    if a[0] != b[0]:
        raise NoSolution(f"leading frequencies differ: {a[0]} != {b[0]}")
    c = [x - y for x, y in zip(a, b)]
    return [-c[j + 1] for j in range(k - 1)] + [Fraction(0)]
