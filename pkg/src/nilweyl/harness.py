"""Weyl-sum exponent sweeps and comparisons with the theoretical bounds.

A sweep evaluates W_ell(N) at a dyadic schedule of N in one pass over the
skew-shift orbit, fits log2 |W| against log2 N, and compares the slope with
the exponent of a chosen bound:

    strong   1 - 1/(k(k-1))                    (plus epsilon)
    log      same power times (1 + log+ T)^(1/2)
    sharp    same power, no epsilon
    weak     1 - 1/(2 nu0 (k-1)),  nu0 >= k-1
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from ._numbers import as_fraction
from .dynamics import MODES, monomial_to_section, skew_shift, weyl_partial_sums
from .errors import InvalidParameter
from .lattice import ScalingExponents

__all__ = [
    "REGIMES",
    "BoundExponent",
    "SweepConfig",
    "WeylTable",
    "FitReport",
    "optimal_rho",
    "bound_exponent",
    "dyadic_schedule",
    "dyadic_weyl_sweep",
    "slope_fit",
    "bound_check",
    "report_json",
    "fmt",
]

REGIMES = ("strong", "log", "sharp", "weak")
CSV_HEADER = ["N", "re", "im", "abs", "log2_N", "log2_abs"]


def fmt(x) -> str:
    """17 significant digits, the interchange format for reals."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def optimal_rho(k: int) -> ScalingExponents:
    """rho_i = 2(k-i)/(k(k-1)): equality in every admissibility constraint."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise InvalidParameter("k must be an integer >= 2")
    return ScalingExponents(tuple(Fraction(2 * (k - i), k * (k - 1)) for i in range(1, k + 1)))


@dataclass(frozen=True)
class BoundExponent:
    regime: str
    power: Fraction
    log_power: Fraction = Fraction(0)


def bound_exponent(k: int, regime: str, nu0=None) -> BoundExponent:
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise InvalidParameter("k must be an integer >= 2")
    if regime not in REGIMES:
        raise InvalidParameter(f"regime must be one of {REGIMES}, got {regime!r}")
    if regime == "weak":
        if nu0 is None:
            raise InvalidParameter("weak regime needs nu0")
        nu = as_fraction(nu0)
        if nu < k - 1 or nu <= 1:
            raise InvalidParameter(f"weak regime needs nu0 >= k-1 and nu0 > 1, got {nu0}")
        return BoundExponent(regime, 1 - 1 / (2 * nu * (k - 1)))
    power = 1 - Fraction(1, k * (k - 1))
    if regime == "log":
        return BoundExponent(regime, power, Fraction(1, 2))
    return BoundExponent(regime, power)


def dyadic_schedule(lo: int, hi: int) -> list[int]:
    """[2^lo, ..., 2^hi]."""
    if not 0 <= lo <= hi <= 36:
        raise InvalidParameter("need 0 <= lo <= hi <= 36")
    return [1 << j for j in range(lo, hi + 1)]


@dataclass(frozen=True)
class SweepConfig:
    """A Weyl-sum sweep.

    Give either ``coeffs`` (a_1..a_k, highest degree first) or ``alpha``
    (with optional ``s``, default 0). ``seed`` moves the starting point by a
    seeded uniform shift, which changes only the lower-order terms.
    Numbers may be floats, Fractions or decimal strings.
    """

    k: int
    coeffs: Optional[tuple] = None
    alpha: Optional[tuple] = None
    s: Optional[tuple] = None
    ell: int = 1
    schedule: tuple = field(default_factory=lambda: tuple(dyadic_schedule(8, 20)))
    mode: str = "float64"
    seed: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or not 2 <= self.k <= 64:
            raise InvalidParameter("k must be an integer in [2, 64]")
        if (self.coeffs is None) == (self.alpha is None):
            raise InvalidParameter("give exactly one of coeffs or alpha")
        if self.mode not in MODES:
            raise InvalidParameter(f"mode must be one of {MODES}")
        sched = list(self.schedule)
        if not sched or any(b <= a for a, b in zip(sched, sched[1:])) or sched[0] < 1:
            raise InvalidParameter("schedule must be strictly increasing positive integers")

    def section(self) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        if self.coeffs is not None:
            alpha, s = monomial_to_section(self.k, self.coeffs)
        else:
            alpha = tuple(as_fraction(a) for a in self.alpha)
            s = tuple(as_fraction(v) for v in self.s) if self.s is not None else (Fraction(0),) * self.k
        if len(alpha) != self.k or len(s) != self.k:
            raise InvalidParameter(f"alpha and s must have {self.k} entries")
        if self.seed is not None:
            u = np.random.default_rng(self.seed).random(self.k)
            s = tuple(v + Fraction(float(w)) for v, w in zip(s, u))
        return alpha, s

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("coeffs", "alpha", "s"):
            if d[key] is not None:
                d[key] = [_frac_str(as_fraction(v)) for v in d[key]]
        d["schedule"] = list(d["schedule"])
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class WeylTable:
    N: np.ndarray
    W: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def abs(self) -> np.ndarray:
        return np.abs(self.W)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, val in self.provenance.items():
            buf.write(f"# {key}: {val}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for n, z in zip(self.N, self.W):
            a = abs(z)
            w.writerow([int(n), fmt(z.real), fmt(z.imag), fmt(a), fmt(math.log2(n)),
                        fmt(math.log2(a)) if a > 0 else "-inf"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "WeylTable":
        prov = {}
        rows = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                prov[key.strip()] = val.strip()
            elif line.strip():
                rows.append(line)
        reader = csv.DictReader(rows)
        if reader.fieldnames is None or list(reader.fieldnames)[:3] != CSV_HEADER[:3]:
            raise InvalidParameter("not a Weyl-sum table")
        N, W = [], []
        for r in reader:
            N.append(int(r["N"]))
            W.append(complex(float(r["re"]), float(r["im"])))
        return cls(N=np.array(N, dtype=np.int64), W=np.array(W, dtype=complex), provenance=prov)


def dyadic_weyl_sweep(cfg: SweepConfig) -> WeylTable:
    alpha, s = cfg.section()
    sys = skew_shift(cfg.k, alpha, cfg.mode)
    W = weyl_partial_sums(sys, s, cfg.ell, cfg.schedule)
    prov = {"library": f"nilweyl {__version__}", "config": cfg.digest(), "mode": cfg.mode}
    return WeylTable(N=np.array(cfg.schedule, dtype=np.int64), W=W, provenance=prov)


@dataclass(frozen=True)
class FitReport:
    slope: float
    intercept: float
    r2: float
    used: int
    dropped: int = 0
    regime: Optional[str] = None
    power: Optional[float] = None
    log_power: float = 0.0
    eps: float = 0.0
    max_ratio: Optional[float] = None
    verdict: Optional[str] = None

    def fit_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r2": self.r2}

    def bound_dict(self) -> dict:
        return {"power": self.power, "max_ratio": self.max_ratio, "verdict": self.verdict}


def _table_arrays(table):
    if isinstance(table, WeylTable):
        return np.asarray(table.N, dtype=np.float64), np.abs(table.W)
    N, A = table
    return np.asarray(N, dtype=np.float64), np.abs(np.asarray(A))


def slope_fit(table) -> FitReport:
    """Least-squares line through (log2 N, log2 |W|). Rows with W = 0 are dropped."""
    N, A = _table_arrays(table)
    keep = A > 0
    if keep.sum() < 2:
        raise InvalidParameter("need at least two rows with nonzero |W| to fit")
    x, y = np.log2(N[keep]), np.log2(A[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return FitReport(slope=float(slope), intercept=float(intercept), r2=r2,
                     used=int(keep.sum()), dropped=int((~keep).sum()))


def bound_check(table, k: int, regime: str = "strong", eps: float = 0.05, nu0=None, C: float = 1.0) -> FitReport:
    """Slope fit plus max |W|/(C N^(power+eps) (1+log+ N)^log_power) and the verdict slope <= power + eps."""
    if eps < 0:
        raise InvalidParameter("eps must be non-negative")
    b = bound_exponent(k, regime, nu0)
    fit = slope_fit(table)
    N, A = _table_arrays(table)
    p, lp = float(b.power), float(b.log_power)
    env = C * N ** (p + eps) * (1.0 + np.maximum(np.log(N), 0.0)) ** lp
    ratio = float(np.max(A / env))
    verdict = "pass" if fit.slope <= p + eps else "fail"
    return FitReport(slope=fit.slope, intercept=fit.intercept, r2=fit.r2, used=fit.used, dropped=fit.dropped,
                     regime=regime, power=p, log_power=lp, eps=eps, max_ratio=ratio, verdict=verdict)


def report_json(cfg: SweepConfig, rep: FitReport) -> dict:
    alpha, _ = cfg.section()
    return {
        "k": cfg.k,
        "alpha": [fmt(a) for a in alpha],
        "regime": rep.regime,
        "fit": rep.fit_dict(),
        "bound": rep.bound_dict(),
        "provenance": {"library": f"nilweyl {__version__}", "config": cfg.digest(), "mode": cfg.mode},
    }
