"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 resource limit.
Reals are written with 17 significant digits; phases are fractions of a turn.
Values can also come from an INI file (``--config``) with sections [weyl],
[lattice] and [rep]; command-line flags override the file.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__, algebra, diophantine, dynamics, harness, lattice, representation
from .errors import InvalidParameter, NilweylError, ObstructionError
from .harness import fmt

SECTION = {
    "weyl": "weyl", "fit": "weyl", "orbit": "weyl",
    "lattice-flow": "lattice", "inj": "lattice",
    "dist-norm": "rep", "scaling": "rep", "green": "rep",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _nums(text: str) -> list[str]:
    return [p.strip() for p in str(text).split(",") if p.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(p) for p in _nums(text)]
    except ValueError as exc:
        raise InvalidParameter(f"expected integers, got {text!r}") from exc


def _rho(text, k):
    if text in (None, "optimal"):
        return harness.optimal_rho(k)
    vals = _nums(text)
    return lattice.scaling_exponents([Fraction(v) for v in vals])


def _grid(tmin, tmax, dt):
    tmin, tmax, dt = float(tmin), float(tmax), float(dt)
    if dt <= 0 or tmax < tmin:
        raise InvalidParameter("need dt > 0 and tmax >= tmin")
    n = int(round((tmax - tmin) / dt)) + 1
    return tmin + dt * np.arange(n)


def _provenance(args) -> dict:
    keep = {k: v for k, v in vars(args).items() if k not in ("func", "out", "config", "summary")}
    blob = json.dumps(keep, sort_keys=True, default=str)
    return {"library": f"nilweyl {__version__}", "config": hashlib.sha256(blob.encode()).hexdigest()[:16],
            "mode": getattr(args, "mode", None) or "n/a"}


def _csv(args, header, rows) -> str:
    lines = [f"# {k}: {v}" for k, v in _provenance(args).items()]
    lines.append(",".join(header))
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def _json(args, payload) -> str:
    payload = dict(payload)
    payload["provenance"] = _provenance(args)
    return json.dumps(payload, indent=2) + "\n"


def _sweep_config(args) -> harness.SweepConfig:
    if args.k is None:
        raise InvalidParameter("--k is required")
    if args.n is not None:
        sched = (int(args.n),)
    elif args.schedule:
        sched = tuple(_ints(args.schedule))
    else:
        sched = tuple(harness.dyadic_schedule(int(args.nmin), int(args.nmax)))
    return harness.SweepConfig(
        k=int(args.k),
        coeffs=tuple(_nums(args.coeffs)) if args.coeffs else None,
        alpha=tuple(_nums(args.alpha)) if args.alpha else None,
        s=tuple(_nums(args.s)) if args.s else None,
        ell=int(args.ell),
        schedule=sched,
        mode=args.mode,
        seed=None if args.seed in (None, "") else int(args.seed),
    )


def cmd_weyl(args):
    cfg = _sweep_config(args)
    tab = harness.dyadic_weyl_sweep(cfg)
    rows = []
    for n, z in zip(tab.N, tab.W):
        a = abs(z)
        rows.append([str(int(n)), fmt(z.real), fmt(z.imag), fmt(a), fmt(np.log2(n)),
                     fmt(np.log2(a)) if a > 0 else "-inf"])
    return _csv(args, harness.CSV_HEADER, rows)


def cmd_fit(args):
    if args.table:
        text = sys.stdin.read() if args.table == "-" else open(args.table).read()
        tab = harness.WeylTable.from_csv(text)
        alpha = None
    else:
        cfg = _sweep_config(args)
        tab = harness.dyadic_weyl_sweep(cfg)
        alpha = [fmt(a) for a in cfg.section()[0]]
    if args.k is None:
        raise InvalidParameter("--k is required")
    rep = harness.bound_check(tab, int(args.k), args.regime, float(args.eps), args.nu0, float(args.C))
    return _json(args, {"k": int(args.k), "alpha": alpha, "regime": rep.regime,
                        "fit": rep.fit_dict(), "bound": rep.bound_dict()})


def cmd_orbit(args):
    k = int(args.k)
    sysm = dynamics.skew_shift(k, _nums(args.alpha), args.mode)
    s = _nums(args.s) if args.s else ["0"] * k
    pts = dynamics.orbit(sysm, s, int(args.n))
    rows = [[str(n)] + [fmt(v) for v in p] for n, p in enumerate(pts)]
    return _csv(args, ["n"] + [f"s{i}" for i in range(1, k + 1)], rows)


def cmd_lattice_flow(args):
    alpha = _nums(args.alpha)
    rho = _rho(args.rho, len(alpha))
    ts = _grid(args.tmin, args.tmax, args.dt)
    tr = lattice.inj_trajectory(alpha, rho, ts)
    rows = [[fmt(t), fmt(i), fmt(np.log(i))] for t, i in zip(tr.t, tr.inj)]
    summary = {"delta_hat": tr.delta_hat, "C": tr.C, "floor": tr.floor, "argmin": tr.argmin,
               "grid": {"tmin": float(ts[0]), "tmax": float(ts[-1]), "dt": float(args.dt), "n": len(ts)}}
    text = _json(args, summary)
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)
    return _csv(args, ["t", "inj", "log_inj"], rows)


def cmd_inj(args):
    try:
        vecs = [[float(v) for v in _nums(row)] for row in args.vectors.split(";") if row.strip()]
    except ValueError as exc:
        raise InvalidParameter(f"bad basis: {exc}") from exc
    if args.alpha:
        alpha = _nums(args.alpha)
        basis = lattice.alpha_lattice_basis(alpha, _rho(args.rho, len(alpha)), float(args.t))
    else:
        if not vecs or any(len(v) != len(vecs) for v in vecs):
            raise InvalidParameter("basis must be n vectors of length n")
        basis = lattice.lattice_basis(np.array(vecs).T)
    r = lattice.shortest_vector(basis)
    return _json(args, {"inj": r.length / 2, "systole": r.length, "vector": [float(v) for v in r.vector],
                        "coeffs": list(r.coeffs)})


def _map(args, fn, items):
    threads = max(1, int(getattr(args, "threads", 1) or 1))
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def cmd_dist_norm(args):
    sigma = float(args.sigma)
    if args.poly:
        val = representation.dist_norm_poly([float(c) for c in _nums(args.poly)], sigma)
        return _json(args, {"sigma": sigma, "norm": val})
    lam = _nums(args.lam)
    form = representation.rep_form(len(lam), lam)
    rho = _rho(args.rho, form.k)
    ts = _grid(args.tmin, args.tmax, args.dt)
    norms = np.array(_map(args, lambda t: representation.dist_norm(form, sigma, t, rho), ts))
    rate = float(np.polyfit(ts, np.log(norms), 1)[0]) if len(ts) > 1 else float("nan")
    rows = [[fmt(t), fmt(sigma), fmt(v), fmt(rate)] for t, v in zip(ts, norms)]
    return _csv(args, ["t", "sigma", "norm", "rate_fit"], rows)


def cmd_scaling(args):
    lam = _nums(args.lam)
    form = representation.rep_form(len(lam), lam)
    rho = _rho(args.rho, form.k)
    fit = representation.scaling_check(form, float(args.sigma), rho, _grid(args.tmin, args.tmax, args.dt))
    return _json(args, {"rate": fit.rate, "intercept": fit.intercept, "expected": fit.expected,
                        "holds": fit.holds})


_SAMPLES = {
    "gauss-deriv": lambda x: -2 * x * np.exp(-x * x),
    "x3-gauss": lambda x: x**3 * np.exp(-x * x),
    "gauss": lambda x: np.exp(-x * x),
}


def cmd_green(args):
    if args.input:
        data = np.loadtxt(args.input, delimiter=",", comments="#", ndmin=2)
        x, f = data[:, 0], data[:, 1]
    else:
        if args.f not in _SAMPLES:
            raise InvalidParameter(f"--f must be one of {sorted(_SAMPLES)}")
        x = np.linspace(-float(args.L), float(args.L), int(args.n))
        f = _SAMPLES[args.f](x)
    try:
        sol = representation.green_apply(x, f)
    except ObstructionError as exc:
        sys.stderr.write(json.dumps({"obstruction": exc.value}) + "\n")
        raise
    return _json(args, {"residual": sol.residual, "one_sided_gap": sol.one_sided_gap,
                        "invariant": sol.invariant, "points": len(x)})


def cmd_cf(args):
    cf = diophantine.continued_fraction(args.x, depth=int(args.depth))
    payload = cf.to_json()
    payload["x"] = args.x
    payload["nu_hat"] = diophantine.diophantine_exponent_estimate(args.x, int(float(args.qmax)))
    payload["truncated"] = cf.truncated
    return _json(args, payload)


def cmd_algebra(args):
    k = int(args.k)
    if args.basis == "canonical":
        data = algebra.filiform(k).to_json()
    elif args.basis == "eta":
        data = algebra.eta_algebra(k).to_json()
        data["S"] = [[str(v) for v in row] for row in algebra.vergne_matrix(k)]
    else:
        q = algebra.quasi_abelian(k)
        data = {"k": k, **q.algebra.to_json(), "quotient_ok": q.verify_quotient()}
    return json.dumps(data, indent=2) + "\n"


def cmd_rho(args):
    r = harness.optimal_rho(int(args.k))
    return json.dumps({"k": r.k, "rho": [str(v) for v in r.rho], "admissible": r.admissible()}) + "\n"


def cmd_bound(args):
    b = harness.bound_exponent(int(args.k), args.regime, args.nu0)
    return json.dumps({"k": int(args.k), "regime": b.regime, "power": str(b.power),
                       "log_power": str(b.log_power)}) + "\n"


def _sweep_args(p):
    p.add_argument("--k", type=int)
    p.add_argument("--coeffs", help="a_1..a_k, highest degree first, comma separated")
    p.add_argument("--alpha", help="frequency vector, comma separated")
    p.add_argument("--s", help="starting point, comma separated")
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--n", type=int, help="single N")
    p.add_argument("--schedule", help="explicit increasing N values")
    p.add_argument("--nmin", type=int, default=8, help="first dyadic exponent")
    p.add_argument("--nmax", type=int, default=20, help="last dyadic exponent")
    p.add_argument("--mode", choices=dynamics.MODES, default="float64")
    p.add_argument("--seed")
    p.add_argument("--threads", type=int, default=1, help="accepted for uniformity; a sweep is one pass")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nilweyl", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"nilweyl {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="INI file with [weyl], [lattice], [rep] sections")
        p.add_argument("--out", help="output path (default stdout)")
        p.set_defaults(func=func)
        return p

    p = add("weyl", cmd_weyl, "Weyl sums on a schedule of N (CSV)")
    _sweep_args(p)

    p = add("fit", cmd_fit, "slope fit and bound comparison (JSON)")
    _sweep_args(p)
    p.add_argument("--table", help="CSV produced by 'weyl' ('-' for stdin)")
    p.add_argument("--regime", choices=harness.REGIMES, default="strong")
    p.add_argument("--eps", default="0.05")
    p.add_argument("--nu0")
    p.add_argument("--C", default="1")

    p = add("orbit", cmd_orbit, "skew-shift orbit (CSV)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--s")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--mode", choices=dynamics.MODES, default="float64")

    p = add("lattice-flow", cmd_lattice_flow, "injectivity radius along the diagonal orbit (CSV)")
    p.add_argument("--alpha", required=True)
    p.add_argument("--rho", help="comma separated, or 'optimal'")
    p.add_argument("--tmin", default="0")
    p.add_argument("--tmax", default="10")
    p.add_argument("--dt", default="0.25")
    p.add_argument("--summary", help="write the JSON summary here (default stderr)")

    p = add("inj", cmd_inj, "injectivity radius of one lattice (JSON)")
    p.add_argument("--vectors", default="", help="basis vectors 'a,b;c,d'")
    p.add_argument("--alpha")
    p.add_argument("--rho")
    p.add_argument("--t", default="0")

    p = add("dist-norm", cmd_dist_norm, "invariant-distribution norm on a t grid (CSV)")
    p.add_argument("--lambda", dest="lam", default="0,1")
    p.add_argument("--sigma", default="1")
    p.add_argument("--rho")
    p.add_argument("--tmin", default="0")
    p.add_argument("--tmax", default="6")
    p.add_argument("--dt", default="1")
    p.add_argument("--poly", help="raw polynomial P, ascending coefficients (JSON output)")
    p.add_argument("--threads", type=int, default=1)

    p = add("scaling", cmd_scaling, "fitted scaling rate of the distribution norm (JSON)")
    p.add_argument("--lambda", dest="lam", default="0,1")
    p.add_argument("--sigma", default="1")
    p.add_argument("--rho")
    p.add_argument("--tmin", default="0")
    p.add_argument("--tmax", default="6")
    p.add_argument("--dt", default="1")

    p = add("green", cmd_green, "solve u' = f and report the residual (JSON)")
    p.add_argument("--f", default="gauss-deriv", help=f"one of {sorted(_SAMPLES)}")
    p.add_argument("--input", help="CSV with columns x,f")
    p.add_argument("--L", default="8")
    p.add_argument("--n", default="65537")

    p = add("cf", cmd_cf, "continued fraction and exponent estimate (JSON)")
    p.add_argument("--x", required=True)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--qmax", default="1e6")

    p = add("algebra", cmd_algebra, "bracket table (JSON)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--basis", choices=("canonical", "eta", "quasi"), default="canonical")

    p = add("rho", cmd_rho, "optimal scaling exponents (JSON)")
    p.add_argument("--k", type=int, required=True)

    p = add("bound", cmd_bound, "bound exponent for a regime (JSON)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--regime", choices=harness.REGIMES, default="strong")
    p.add_argument("--nu0")
    return ap


def _apply_config(ap, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cp = configparser.ConfigParser()
    if not cp.read(known.config):
        raise InvalidParameter(f"cannot read config file {known.config}")
    cmd = next((a for a in argv if not a.startswith("-") and a in SECTION), None)
    if cmd is None or not cp.has_section(SECTION[cmd]):
        return
    subs = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction))
    values = {k.replace("-", "_"): v for k, v in cp.items(SECTION[cmd])}
    if "lambda" in values:
        values["lam"] = values.pop("lambda")
    subs.choices[cmd].set_defaults(**values)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
        args = ap.parse_args(argv)
        text = args.func(args)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    except NilweylError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except MemoryError:
        print("error: out of memory", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
