"""Schrodinger-type models of irreducible representations and their invariants.

A linear form lambda on span(Y1..Yk) with lambda_k != 0 gives a model on
L^2(R) where X acts by d/dx and Yi by multiplication by i P_i(x), with

    P_i(x) = sum_j lambda_(i+j) x^j / j!.

The X-invariant distribution is integration against dx, and its norm in the
Sobolev space of order sigma is (int dx/(1 + P(x))^sigma)^(1/2), where
P = sum P_i^2. Under the rescaling Yi -> e^(-rho_i t) Yi the polynomials
scale accordingly, so norms can be tracked along the renormalization flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from . import algebra
from ._numbers import as_fraction, gen_binom
from .errors import InvalidParameter, NumericalFailure, ObstructionError
from .lattice import scaling_exponents

__all__ = [
    "RepForm",
    "ScalingFit",
    "GreenSolution",
    "rep_form",
    "rep_poly",
    "laplacian_poly",
    "dist_norm",
    "dist_norm_poly",
    "green_apply",
    "green_norm_bound",
    "green_norm_bound_poly",
    "p_norm",
    "p_components",
    "normalized_components",
    "omega_upsilon",
    "scaling_check",
    "normalize_orbit_form",
    "multiplicity_bound",
]

QUAD_TOL = 1e-10
QUAD_LIMIT = 4000


@dataclass(frozen=True)
class RepForm:
    """lambda on (Y1..Yk); ``lam[i-1] = lambda(Yi)``."""

    k: int
    lam: tuple

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 2:
            raise InvalidParameter(f"k must be an integer >= 2, got {self.k!r}")
        if len(self.lam) != self.k:
            raise InvalidParameter(f"lambda must have {self.k} entries")
        if self.lam[-1] == 0:
            raise InvalidParameter("lambda_k must be nonzero")

    def eta_values(self) -> tuple[Fraction, ...]:
        """lambda on the eta basis: solves lam = S mu with S unit upper triangular."""
        S = algebra.vergne_matrix(self.k)
        lam = [as_fraction(v) for v in self.lam]
        mu = [Fraction(0)] * self.k
        for i in range(self.k - 1, -1, -1):
            mu[i] = lam[i] - sum(S[i][j] * mu[j] for j in range(i + 1, self.k))
        return tuple(mu)

    @property
    def integral(self) -> bool:
        """Integer values on the eta basis, i.e. on the generators of the lattice."""
        return all(v.denominator == 1 for v in self.eta_values())

    @classmethod
    def from_eta(cls, k: int, mu: Sequence) -> "RepForm":
        S = algebra.vergne_matrix(k)
        mu = [as_fraction(v) for v in mu]
        if len(mu) != k:
            raise InvalidParameter(f"expected {k} values")
        return cls(k=k, lam=tuple(sum(S[i][j] * mu[j] for j in range(k)) for i in range(k)))

    def floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.lam])


def rep_form(k: int, lam: Sequence) -> RepForm:
    vals = tuple(v if isinstance(v, float) else as_fraction(v) for v in lam)
    return RepForm(k=k, lam=vals)


def _rho_t(form, t, rho):
    if rho is None:
        if t != 0:
            raise InvalidParameter("a nonzero time needs scaling exponents rho")
        return np.zeros(form.k)
    r = scaling_exponents(rho)
    if r.k != form.k:
        raise InvalidParameter("rho and lambda have different lengths")
    return r.floats() * float(t)


def rep_poly(form: RepForm, i: int, t: float = 0.0, rho=None) -> Polynomial:
    """e^(-rho_i t) P_i as a numpy Polynomial (ascending coefficients)."""
    if not 1 <= i <= form.k:
        raise InvalidParameter(f"index i must lie in 1..{form.k}")
    lam = form.floats()
    scale = math.exp(-_rho_t(form, t, rho)[i - 1])
    coef = [scale * lam[i - 1 + j] / math.factorial(j) for j in range(form.k - i + 1)]
    return Polynomial(coef)


def laplacian_poly(form: RepForm, t: float = 0.0, rho=None) -> Polynomial:
    """sum_i (e^(-rho_i t) P_i)^2, the symbol of the transverse Laplacian."""
    out = Polynomial([0.0])
    for i in range(1, form.k + 1):
        p = rep_poly(form, i, t, rho)
        out = out + p * p
    return out


def _as_poly(P) -> Polynomial:
    if isinstance(P, Polynomial):
        return P
    return Polynomial(np.asarray([float(c) for c in P]))


def _scale_of(P: Polynomial) -> float:
    c = np.abs(P.coef[1:])
    with np.errstate(divide="ignore"):
        m = max((c[j] ** (1.0 / (j + 1)) for j in range(len(c)) if c[j] > 0), default=1.0)
    return 1.0 / m


def _log1p_P(P, x):
    with np.errstate(over="ignore", invalid="ignore"):
        v = P(x)
    if not np.isfinite(v):
        # overflowed: fall back to the leading term in log form
        d = P.degree()
        return math.log(abs(P.coef[d])) + d * math.log(abs(x))
    if v < -1:
        raise NumericalFailure("polynomial is not non-negative")
    return math.log1p(v)


def _quad(fun, a, b):
    val, err, *_ = integrate.quad(fun, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=QUAD_LIMIT, full_output=1)
    if not math.isfinite(val):
        raise NumericalFailure("quadrature returned a non-finite value")
    if err > 1e-6 * max(abs(val), 1e-300) and err > 1e-12:
        raise NumericalFailure(f"quadrature did not converge (estimate {val}, error {err})")
    return val


def _check_poly_degree(P):
    d2 = P.degree()
    if d2 < 2 or d2 % 2:
        raise InvalidParameter("P must have even degree >= 2")
    if P.coef[d2] <= 0:
        raise InvalidParameter("P must have a positive leading coefficient")
    return d2 // 2


def _tail_integral(P, sigma, L, a, b):
    """int_a^b (1 + P(x))^-sigma dx with a, b in [-inf, inf], via x = L tan(theta)."""
    ta = -math.pi / 2 if a == -math.inf else math.atan(a / L)
    tb = math.pi / 2 if b == math.inf else math.atan(b / L)
    if tb <= ta:
        return 0.0

    def f(th):
        c = math.cos(th)
        if c <= 0:
            return 0.0
        x = L * math.tan(th)
        return math.exp(math.log(L) - 2 * math.log(c) - sigma * _log1p_P(P, x))

    return _quad(f, ta, tb)


def dist_norm_poly(P, sigma: float) -> float:
    """(int_R dx/(1 + P(x))^sigma)^(1/2) for a non-negative polynomial P of degree 2d."""
    P = _as_poly(P)
    d = _check_poly_degree(P)
    sigma = float(sigma)
    if not sigma > 1.0 / (2 * d):
        raise InvalidParameter(f"sigma must exceed 1/(2d) = {1 / (2 * d)} for convergence")
    L = _scale_of(P)
    val = _tail_integral(P, sigma, L, -math.inf, 0.0) + _tail_integral(P, sigma, L, 0.0, math.inf)
    return math.sqrt(val)


def dist_norm(form: RepForm, sigma: float, t: float = 0.0, rho=None) -> float:
    """Norm of the invariant distribution in the model of ``form`` (rescaled to time t)."""
    if not float(sigma) > 1.0 / (2 * (form.k - 1)):
        raise InvalidParameter(f"sigma must exceed 1/(2(k-1)) = {1 / (2 * (form.k - 1))}")
    return dist_norm_poly(laplacian_poly(form, t, rho), sigma)


@dataclass(frozen=True)
class GreenSolution:
    x: np.ndarray
    u: np.ndarray
    invariant: float  # D(f) = int f dx
    one_sided_gap: float  # max |u_left - u_right|
    residual: float  # sup |central difference of u - f| on interior nodes


def green_apply(x, f, tol: float = 1e-8) -> GreenSolution:
    """Solve u' = f with u decaying at both ends, for f sampled on a grid.

    Requires int f dx = 0 (relative to int |f| dx, tolerance ``tol``);
    otherwise raises :class:`ObstructionError` carrying the value of the
    integral. The two one-sided primitives are averaged.
    """
    x = np.asarray(x, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if x.ndim != 1 or x.shape != f.shape or len(x) < 5:
        raise InvalidParameter("x and f must be 1-d arrays of equal length >= 5")
    if np.any(np.diff(x) <= 0):
        raise InvalidParameter("grid must be increasing")
    if not np.all(np.isfinite(f)):
        raise InvalidParameter("f has non-finite samples")
    left = integrate.cumulative_simpson(f, x=x, initial=0.0)
    # mirrored grid: the primitive from the right is -int_x^{x_max} f
    right = -integrate.cumulative_simpson(f[::-1], x=-x[::-1], initial=0.0)[::-1]
    D = float(left[-1])
    mass = float(integrate.simpson(np.abs(f), x=x))
    if abs(D) > tol * max(mass, 1e-300):
        raise ObstructionError(f"input has nonzero invariant value D(f) = {D:.17g}", value=D)
    u = 0.5 * (left + right)
    gap = float(np.max(np.abs(left - right)))
    du = (u[2:] - u[:-2]) / (x[2:] - x[:-2])
    resid = float(np.max(np.abs(du - f[1:-1])))
    return GreenSolution(x=x, u=u, invariant=D, one_sided_gap=gap, residual=resid)


def green_norm_bound_poly(P, sigma: float, tau: float = 0.0) -> float:
    """(double integral over |y| >= |x| of (1+P(x))^tau/(1+P(y))^sigma)^(1/2).

    Finite exactly when sigma > tau + 1/d, where deg P = 2d.
    """
    P = _as_poly(P)
    d = _check_poly_degree(P)
    sigma, tau = float(sigma), float(tau)
    if tau < 0:
        raise InvalidParameter("tau must be non-negative")
    if not sigma > tau + 1.0 / d:
        raise InvalidParameter(f"sigma must exceed tau + 1/d = {tau + 1.0 / d} for convergence")
    L = _scale_of(P)

    def H(x):
        a = abs(x)
        return _tail_integral(P, sigma, L, a, math.inf) + _tail_integral(P, sigma, L, -math.inf, -a)

    def outer(th):
        c = math.cos(th)
        if c <= 0:
            return 0.0
        x = L * math.tan(th)
        return math.exp(math.log(L) - 2 * math.log(c) + tau * _log1p_P(P, x)) * H(x)

    val = _quad(outer, -math.pi / 2, 0.0) + _quad(outer, 0.0, math.pi / 2)
    return math.sqrt(val)


def green_norm_bound(form: RepForm, sigma: float, tau: float = 0.0, t: float = 0.0, rho=None,
                     scaled: bool = False) -> float:
    """Operator-norm bound of the Green operator in the model of ``form``.

    With ``scaled=True`` the bound is for the rescaled generator e^t X, which
    multiplies it by e^(-t).
    """
    val = green_norm_bound_poly(laplacian_poly(form, t, rho), sigma, tau)
    return val * math.exp(-float(t)) if scaled else val


def p_components(form: RepForm, t: float = 0.0, rho=None) -> list[Polynomial]:
    """Components P_0..P_(k-1) with P_i the rescaled polynomial of Y_(k-i) (degree i)."""
    return [rep_poly(form, form.k - i, t, rho) for i in range(form.k)]


def _normalized_coeffs(components):
    comps = [_as_poly(p) for p in components]
    d = len(comps) - 1
    if d < 1:
        raise InvalidParameter("need at least two components")
    A = np.zeros((d + 1, d + 1))
    for i, p in enumerate(comps):
        c = p.coef
        if len(c) > i + 1 and np.any(c[i + 1:] != 0):
            raise InvalidParameter(f"component {i} has degree above {i}")
        for j in range(min(len(c), i + 1)):
            A[i, j] = c[j] * math.factorial(j)
    if A[d, d] == 0:
        raise InvalidParameter("leading coefficient a_dd must be nonzero")
    return A, d


def p_norm(components) -> float:
    """max(|a_dd|^(-1/d), |a_ij/a_dd|^(1/(d-j))), coefficients in the x^j/j! basis."""
    A, d = _normalized_coeffs(components)
    add = abs(A[d, d])
    out = add ** (-1.0 / d)
    for i in range(d + 1):
        for j in range(min(i, d - 1) + 1):
            if A[i, j] != 0:
                out = max(out, (abs(A[i, j]) / add) ** (1.0 / (d - j)))
    return float(out)


def normalized_components(components) -> tuple[list[Polynomial], float, float]:
    """Rescaled components Q_i(x) = s^-d P_i(|P| x) with s = |a_dd|^(1/d) |P|.

    Returns (Q, |P|, s). Every normalized coefficient of Q is at most 1 in
    absolute value and the top one is +-1.
    """
    A, d = _normalized_coeffs(components)
    norm = p_norm(components)
    s = abs(A[d, d]) ** (1.0 / d) * norm
    out = []
    for i in range(d + 1):
        out.append(Polynomial([s ** (-d) * A[i, j] * norm**j / math.factorial(j) for j in range(i + 1)]))
    return out, norm, s


def omega_upsilon(form: RepForm, t: float = 0.0, rho=None) -> tuple[float, float]:
    """The coefficients omega and upsilon = omega^(k-1) |Lambda| of the (rescaled) form."""
    k = form.k
    lam = form.floats()
    rt = _rho_t(form, t, rho)
    Lam = math.exp(-rt[0]) * lam[k - 1]
    om = abs(1.0 / Lam) ** (1.0 / (k - 1))
    for i in range(k):
        for j in range(min(i, k - 2) + 1):
            # lambda(ad^j Y_(k-i)(t)) = e^(-rho_(k-i) t) lambda_(k-i+j)
            v = math.exp(-rt[k - i - 1]) * lam[k - i - 1 + j]
            if v != 0:
                om = max(om, abs(v / Lam) ** (1.0 / (k - 1 - j)))
    return float(om), float(om ** (k - 1) * abs(Lam))


@dataclass(frozen=True)
class ScalingFit:
    t: np.ndarray
    norms: np.ndarray
    rate: float
    intercept: float
    expected: float  # rho_1/(2(k-1))

    @property
    def holds(self) -> bool:
        return self.rate >= self.expected - 1e-6


def scaling_check(form: RepForm, sigma: float, rho, t_grid) -> ScalingFit:
    """Fit log(norm) = intercept + rate * t over the grid and compare with rho_1/(2(k-1))."""
    ts = np.asarray(t_grid, dtype=np.float64)
    if ts.ndim != 1 or len(ts) < 2 or np.any(np.diff(ts) <= 0):
        raise InvalidParameter("t grid must be increasing with at least two points")
    r = scaling_exponents(rho)
    norms = np.array([dist_norm(form, sigma, t, r) for t in ts])
    rate, intercept = np.polyfit(ts, np.log(norms), 1)
    return ScalingFit(t=ts, norms=norms, rate=float(rate), intercept=float(intercept),
                      expected=float(r.rho[0]) / (2 * (form.k - 1)))


def normalize_orbit_form(form: RepForm) -> tuple[RepForm, int]:
    """Shift an integral form along its X-orbit so that lambda(eta_(k-1)) lies in [0, |lambda_k|).

    The shift is lambda -> lambda o Ad(exp(tX)) with integer t, which acts on
    eta-values by binomial coefficients and so preserves integrality.
    Returns the normalized form and t.
    """
    if not form.integral:
        raise InvalidParameter("form is not integral on the lattice generators")
    mu = form.eta_values()
    k = form.k
    m = abs(mu[k - 1])
    sg = 1 if mu[k - 1] > 0 else -1
    t = -sg * math.floor(mu[k - 2] / m)
    new = [sum(gen_binom(t, l) * mu[j + l] for l in range(k - j)) for j in range(k)]
    return RepForm.from_eta(k, new), t


def multiplicity_bound(form: RepForm) -> tuple[int, int]:
    """Bounds (1, |lambda_k|) on the multiplicity of the orbit class in L^2."""
    if not form.integral:
        raise InvalidParameter("form is not integral on the lattice generators")
    return 1, int(abs(as_fraction(form.lam[-1])))
