"""Diagonal flow on unimodular lattices, exact shortest vectors and widths.

The lattice attached to a frequency vector alpha at renormalization time t
has the basis whose columns are the images of the unit vectors under
``diag(e^-t, e^(rho_1 t), ..., e^(rho_k t)) . U_alpha``. Here
``U_alpha e_0 = e_0 + sum alpha_i e_i``, and ``U_alpha e_i = e_i`` otherwise.

At large t these bases are extremely skewed: a reduced vector is an integer
combination whose coefficients are of size e^t, so forming it in floating
point cancels away every digit. Alpha-orbit bases therefore keep the exact
frequency vector and rebuild any integer combination directly, rounding only
once per coordinate. Reduction is carried out by continuation in t, so each
floating-point LLL pass starts from a basis that was reduced at a nearby
time and is well conditioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from ._numbers import as_fraction
from .errors import InvalidParameter, NumericalFailure, ResourceExceeded

__all__ = [
    "ScalingExponents",
    "LatticeBasis",
    "SVPResult",
    "InjTrajectory",
    "IStar",
    "scaling_exponents",
    "diagonal_flow_matrix",
    "alpha_lattice_basis",
    "lattice_basis",
    "lll_reduce",
    "shortest_vector",
    "injectivity_radius",
    "inj_trajectory",
    "i_star",
    "width_lower_bound",
    "b_hat_bound",
    "b_hat_envelope",
]

MAX_DIM = 12
NODE_BUDGET = 2_000_000
CONTINUATION_STEP = 1.0


@dataclass(frozen=True)
class ScalingExponents:
    """Non-negative weights rho_1..rho_k with sum 1."""

    rho: tuple

    def __post_init__(self):
        r = self.rho
        if len(r) < 2:
            raise InvalidParameter("need at least two scaling exponents")
        if any(v < 0 for v in r):
            raise InvalidParameter("scaling exponents must be non-negative")
        total = sum(r)
        if any(isinstance(v, float) for v in r):
            if abs(total - 1) > 1e-12:
                raise InvalidParameter(f"scaling exponents must sum to 1, got {total}")
        elif total != 1:
            raise InvalidParameter(f"scaling exponents must sum to 1, got {total}")

    @property
    def k(self) -> int:
        return len(self.rho)

    def admissible(self) -> bool:
        """rho_(k-i) >= i/(k-1) * rho_1 for i = 1..k-1."""
        k, r = self.k, self.rho
        return all(r[k - i - 1] * (k - 1) >= i * r[0] - (1e-12 if isinstance(r[0], float) else 0)
                   for i in range(1, k))

    def floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.rho])


def scaling_exponents(rho) -> ScalingExponents:
    if isinstance(rho, ScalingExponents):
        return rho
    vals = []
    for v in rho:
        vals.append(v if isinstance(v, float) else as_fraction(v))
    return ScalingExponents(tuple(vals))


def diagonal_flow_matrix(rho, t: float) -> np.ndarray:
    r = scaling_exponents(rho).floats()
    return np.diag(np.concatenate([[math.exp(-t)], np.exp(r * t)]))


@dataclass(frozen=True)
class LatticeBasis:
    """Columns of ``matrix`` are the basis vectors."""

    matrix: np.ndarray
    provenance: str = "user"
    alpha: Optional[tuple] = None
    rho: Optional[ScalingExponents] = None
    t: float = 0.0
    _eval: Optional[Callable] = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def combine(self, U) -> np.ndarray:
        """Columns B @ U for an integer matrix U, evaluated accurately when possible."""
        U = np.asarray(U, dtype=object)
        if U.ndim == 1:
            U = U.reshape(-1, 1)
        if self._eval is not None:
            return self._eval(U)
        return self.matrix @ U.astype(np.float64)

    def det(self) -> float:
        return float(np.linalg.det(self.matrix))


def lattice_basis(matrix) -> LatticeBasis:
    M = np.array(matrix, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidParameter("basis matrix must be square")
    if M.shape[0] > MAX_DIM:
        raise ResourceExceeded(f"dimension {M.shape[0]} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(M)):
        raise InvalidParameter("basis has non-finite entries")
    if abs(np.linalg.det(M)) < 1e-300 or np.linalg.matrix_rank(M) < M.shape[0]:
        raise InvalidParameter("basis is singular")
    return LatticeBasis(matrix=M)


def _alpha_eval(alpha, rho, t):
    k = len(alpha)
    em = math.exp(-t)
    ep = [math.exp(float(r) * t) for r in rho.rho]

    def ev(U):
        n = U.shape[1]
        out = np.empty((k + 1, n))
        for c in range(n):
            n0 = int(U[0, c])
            out[0, c] = n0 * em
            for i in range(k):
                a = alpha[i]
                out[i + 1, c] = float(a * n0 + int(U[i + 1, c])) * ep[i] - float(a * n0) * em
        return out

    return ev


def alpha_lattice_basis(alpha: Sequence, rho, t: float) -> LatticeBasis:
    r = scaling_exponents(rho)
    try:
        a = tuple(as_fraction(v) for v in alpha)
    except (TypeError, ValueError) as exc:
        raise InvalidParameter(f"bad alpha: {exc}") from exc
    if len(a) != r.k:
        raise InvalidParameter("alpha and rho must have the same length")
    if len(a) + 1 > MAX_DIM:
        raise ResourceExceeded(f"dimension {len(a) + 1} exceeds {MAX_DIM}")
    t = float(t)
    if not math.isfinite(t):
        raise InvalidParameter("t must be finite")
    ev = _alpha_eval(a, r, t)
    M = ev(np.identity(len(a) + 1, dtype=object).astype(object))
    return LatticeBasis(matrix=M, provenance="alpha-orbit", alpha=a, rho=r, t=t, _eval=ev)


def _identity(n):
    U = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            U[i, j] = int(i == j)
    return U


def _gso(B):
    n = B.shape[1]
    Bs = np.zeros_like(B)
    mu = np.identity(n)
    bb = np.zeros(n)
    for i in range(n):
        v = B[:, i].copy()
        for j in range(i):
            mu[i, j] = (v @ Bs[:, j]) / bb[j]
            v -= mu[i, j] * Bs[:, j]
        Bs[:, i] = v
        bb[i] = v @ v
        if not bb[i] > 0 or not math.isfinite(bb[i]):
            raise NumericalFailure("Gram-Schmidt breakdown: basis is numerically dependent")
    return mu, bb


def _lll_pass(B, U, delta, max_iter):
    """Float LLL on columns of B, mirroring column operations in U. Returns #changes."""
    n = B.shape[1]
    mu, bb = _gso(B)
    changes = 0
    kk = 1
    it = 0
    while kk < n:
        it += 1
        if it > max_iter:
            raise ResourceExceeded("LLL iteration budget exhausted")
        for j in range(kk - 1, -1, -1):
            if abs(mu[kk, j]) > 0.5:
                q = int(round(mu[kk, j]))
                B[:, kk] -= q * B[:, j]
                U[:, kk] = U[:, kk] - q * U[:, j]
                mu[kk, : j + 1] -= q * mu[j, : j + 1]
                changes += 1
        if bb[kk] >= (delta - mu[kk, kk - 1] ** 2) * bb[kk - 1]:
            kk += 1
        else:
            B[:, [kk - 1, kk]] = B[:, [kk, kk - 1]]
            U[:, [kk - 1, kk]] = U[:, [kk, kk - 1]]
            mu, bb = _gso(B)
            changes += 1
            kk = max(kk - 1, 1)
    return changes


def _lll_refresh(basis, U, delta, max_passes=50):
    for _ in range(max_passes):
        B = basis.combine(U)
        if _lll_pass(B, U, delta, 100_000) == 0:
            return U
    raise NumericalFailure("LLL did not stabilise after re-evaluating the basis")


def lll_reduce(basis: LatticeBasis, delta: float = 0.99, start=None) -> tuple[LatticeBasis, np.ndarray]:
    """LLL-reduce. Returns the reduced basis and the unimodular U with reduced = B U.

    ``start`` is an optional unimodular matrix to begin from (a warm start).
    Alpha-orbit bases without a warm start are reduced by continuation from
    t = 0, where the lattice is Z^(k+1).
    """
    if not 0.25 < delta < 1:
        raise InvalidParameter("LLL parameter delta must lie in (1/4, 1)")
    n = basis.dim
    if start is not None:
        U = np.array(start, dtype=object)
        U = _lll_refresh(basis, U, delta)
    elif basis.provenance == "alpha-orbit":
        U = _identity(n)
        for tt in _continuation_path(0.0, basis.t):
            U = _lll_refresh(alpha_lattice_basis(basis.alpha, basis.rho, tt), U, delta)
    else:
        U = _lll_refresh(basis, _identity(n), delta)
    reduced = basis.combine(U)
    return LatticeBasis(matrix=reduced, provenance=basis.provenance), U


def _continuation_path(t0, t1):
    steps = max(1, int(math.ceil(abs(t1 - t0) / CONTINUATION_STEP)))
    return [t0 + (t1 - t0) * (i + 1) / steps for i in range(steps)]


@dataclass(frozen=True)
class SVPResult:
    vector: np.ndarray
    length: float
    coeffs: tuple[int, ...]
    nodes: int


def _enumerate(mu, bb, R2, budget):
    """Depth-first enumeration over intervals (Fincke-Pohst)."""
    n = len(bb)
    best_x = None
    best = R2
    x = [0] * n
    nodes = 0

    def rec(i, partial):
        nonlocal best, best_x, nodes
        c = -sum(x[j] * mu[j, i] for j in range(i + 1, n))
        rad = math.sqrt(max(best - partial, 0.0) / bb[i])
        lo, hi = math.ceil(c - rad), math.floor(c + rad)
        # visit from the centre outwards so good vectors are found early
        cands = sorted(range(lo, hi + 1), key=lambda v: abs(v - c))
        for v in cands:
            nodes += 1
            if nodes > budget:
                raise ResourceExceeded("enumeration node budget exhausted", partial=(best_x, best))
            d = partial + (v - c) ** 2 * bb[i]
            if d >= best:
                continue
            x[i] = v
            if i == 0:
                if any(x):
                    best, best_x = d, list(x)
            else:
                rec(i - 1, d)
            x[i] = 0

    rec(n - 1, 0.0)
    return best_x, best, nodes


def shortest_vector(basis: LatticeBasis, budget: int = NODE_BUDGET, reduced=None) -> SVPResult:
    """Exact shortest nonzero vector: LLL, then Fincke-Pohst enumeration.

    ``reduced`` may pass a precomputed ``(reduced_basis, U)`` pair.
    """
    if basis.dim > MAX_DIM:
        raise ResourceExceeded(f"dimension {basis.dim} exceeds {MAX_DIM}")
    red, U = reduced if reduced is not None else lll_reduce(basis)
    B = red.matrix
    mu, bb = _gso(B)
    norms = np.einsum("ij,ij->j", B, B)
    j0 = int(np.argmin(norms))
    R2 = float(norms[j0]) * (1 + 1e-12)
    x, _, nodes = _enumerate(mu, bb, R2, budget)
    if x is None:
        x = [0] * basis.dim
        x[j0] = 1
    coeffs = np.array([sum(int(U[i, j]) * x[j] for j in range(basis.dim)) for i in range(basis.dim)], dtype=object)
    v = basis.combine(coeffs)[:, 0]
    return SVPResult(vector=v, length=float(np.linalg.norm(v)), coeffs=tuple(int(c) for c in coeffs), nodes=nodes)


def injectivity_radius(basis: LatticeBasis) -> float:
    """Half the systole."""
    return shortest_vector(basis).length / 2


@dataclass(frozen=True)
class InjTrajectory:
    t: np.ndarray
    inj: np.ndarray
    delta_hat: float
    C: float

    @property
    def log_inj(self) -> np.ndarray:
        return np.log(self.inj)

    @property
    def envelope(self) -> np.ndarray:
        """Running minimum of Inj."""
        return np.minimum.accumulate(self.inj)

    @property
    def floor(self) -> float:
        return float(self.inj.min())

    @property
    def argmin(self) -> float:
        return float(self.t[int(np.argmin(self.inj))])


def inj_trajectory(alpha: Sequence, rho, t_grid) -> InjTrajectory:
    """Inj(t) along the orbit, and a fit Inj >= C e^(-delta t) to its running minimum."""
    ts = np.asarray(t_grid, dtype=np.float64)
    if ts.ndim != 1 or len(ts) < 2:
        raise InvalidParameter("need at least two grid points")
    if np.any(np.diff(ts) <= 0) or ts[0] < 0:
        raise InvalidParameter("t grid must be increasing and start at t >= 0")
    r = scaling_exponents(rho)
    U = _identity(len(alpha) + 1)
    prev = 0.0
    inj = np.empty(len(ts))
    for n, t in enumerate(ts):
        for tt in _continuation_path(prev, float(t)) if t > prev else [float(t)]:
            U = _lll_refresh(alpha_lattice_basis(alpha, r, tt), U, 0.99)
        prev = float(t)
        basis = alpha_lattice_basis(alpha, r, float(t))
        red = LatticeBasis(matrix=basis.combine(U), provenance=basis.provenance)
        inj[n] = shortest_vector(basis, reduced=(red, U)).length / 2
    env = np.log(np.minimum.accumulate(inj))
    slope, intercept = np.polyfit(ts, env, 1)
    return InjTrajectory(t=ts, inj=inj, delta_hat=max(0.0, -float(slope)), C=float(math.exp(intercept)))


@dataclass(frozen=True)
class IStar:
    value: float
    s_star: Optional[float]
    crossed: bool

    def __float__(self):
        return self.value


def i_star(t_samples, I_samples, t: float) -> IStar:
    """I*(t) = 2 e^(-s*), s* the first s >= 0 with I(t + s) = 2 e^(-s).

    I is given by samples on an increasing grid and interpolated linearly in
    log I. Returns value 0 with ``crossed=False`` if no crossing occurs
    inside the sampled range.
    """
    ts = np.asarray(t_samples, dtype=np.float64)
    Is = np.asarray(I_samples, dtype=np.float64)
    if ts.shape != Is.shape or ts.ndim != 1 or len(ts) < 2:
        raise InvalidParameter("samples must be two 1-d arrays of equal length >= 2")
    if np.any(np.diff(ts) <= 0):
        raise InvalidParameter("sample grid must be increasing")
    if np.any(Is <= 0):
        raise InvalidParameter("I must be positive")
    if np.any(np.diff(Is) > 0):
        raise InvalidParameter("I must be non-increasing on its sample range")
    if not ts[0] <= t <= ts[-1]:
        raise InvalidParameter("t outside the sampled range")
    logI = np.log(Is)
    log2 = math.log(2.0)

    def g(s):
        return float(np.interp(t + s, ts, logI)) - log2 + s

    if g(0.0) >= 0:
        return IStar(value=2.0, s_star=0.0, crossed=True)
    nodes = np.concatenate([[0.0], ts[ts > t] - t])
    vals = [g(s) for s in nodes]
    for a, b, ga, gb in zip(nodes, nodes[1:], vals, vals[1:]):
        if ga < 0 <= gb:
            s = b if gb == 0 else brentq(g, a, b, xtol=1e-14, rtol=1e-14)
            return IStar(value=2.0 * math.exp(-s), s_star=float(s), crossed=True)
    return IStar(value=0.0, s_star=None, crossed=False)


def width_lower_bound(k: int, t: float, delta=None, istar=None) -> float:
    """exp(-(k+1) delta t/(1-delta)) in exponent mode, I*^(k+1) in I* mode (constant 1)."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise InvalidParameter("k must be an integer >= 2")
    if (delta is None) == (istar is None):
        raise InvalidParameter("give exactly one of delta or istar")
    if delta is not None:
        d = float(delta)
        if not 0 <= d < 1:
            raise InvalidParameter("delta must lie in [0, 1)")
        return math.exp(-(k + 1) * d * float(t) / (1 - d))
    v = float(istar)
    if v < 0:
        raise InvalidParameter("I* must be non-negative")
    return v ** (k + 1)


def _scale_count(T):
    T = float(T)
    if not T >= math.e * (1 - 1e-15):
        raise InvalidParameter("T must be at least e")
    J = max(1, int(math.floor(math.log(T) + 1e-12)))
    return J, math.log(T) / J


def b_hat_bound(B, rho1, k: int, T: float) -> float:
    """sum_{j=0}^{[log T]} exp((1 - rho_1/(2(k-1))) j h) B_j, with h = log T/[log T]."""
    J, h = _scale_count(T)
    B = np.asarray(B, dtype=np.float64)
    if len(B) < J + 1:
        raise InvalidParameter(f"need {J + 1} per-scale values, got {len(B)}")
    a = 1 - float(rho1) / (2 * (k - 1))
    j = np.arange(J + 1)
    return float(np.sum(np.exp(a * j * h) * B[: J + 1]))


def b_hat_envelope(rho1, k: int, T: float, delta: float) -> float:
    """T^(1 - rho_1/(2(k-1))) * T^((k+1) delta/(2(1-delta)))."""
    if not 0 <= delta < 1:
        raise InvalidParameter("delta must lie in [0, 1)")
    T = float(T)
    return T ** (1 - float(rho1) / (2 * (k - 1))) * T ** ((k + 1) * delta / (2 * (1 - delta)))
