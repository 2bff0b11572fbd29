"""Command-line front end.

    kpzlab dist --name gue --method fredholm --rmin -6 --rmax 4 --step 0.5 --out t.csv
    kpzlab painleve --out hm.csv
    kpzlab verify --suite all
    kpzlab hit --kind sqrt --level 0 --param 1 --y -1 --tmax 5 --out h.csv
    kpzlab lpp --q 0.5 --alpha-minus 1 --alpha-plus 1 --N 200 --samples 2000 --out s.csv
    kpzlab lpp-dominance --q 0.5 --N 100 --samples 2000
    kpzlab lpp-profile --a 0.5 --kappa 1 --N 100 --samples 1000

Tables are CSV, reports are JSON on standard output.  Exit status is 0 on
success, 1 when a verification fails and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import airydist, barrier, lpp, painleve, scattering
from .report import dumps_report, merge_reports, suite_report

FLOAT_FORMAT = "%.11e"

# name -> method -> function of r; "goe" is F_GOE in its standard scaling
DISTRIBUTIONS = {
    "gue": {
        "painleve": lambda r, a: float(painleve.f_gue_p(r)),
        "fredholm": lambda r, a: airydist.f_gue_fd(r),
        "scattering": lambda r, a: scattering.hitting_det(scattering.narrow_wedge_barrier(r)),
    },
    "goe": {
        "painleve": lambda r, a: float(painleve.f_goe_p(r)),
        "fredholm": lambda r, a: airydist.f_goe_fd(r / 4 ** (1 / 3)),
        "scattering": lambda r, a: scattering.hitting_det(scattering.flat_barrier(r / 4 ** (1 / 3))),
    },
    "br": {"painleve": lambda r, a: float(painleve.f_br(r))},
    "crossover": {
        "fredholm": lambda r, a: airydist.f_curved_to_flat(a.alpha, r),
        "scattering": lambda r, a: scattering.hitting_det(scattering.half_flat_barrier(a.alpha, r)),
    },
    "sqrt": {"scattering": lambda r, a: scattering.f_sqrt(a.alpha, a.b1, a.b2, r)},
    "parbl": {"scattering": lambda r, a: scattering.f_parbl(a.beta1, a.beta2, r)},
}
DEFAULT_METHOD = {"gue": "painleve", "goe": "painleve", "br": "painleve", "crossover": "fredholm"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# CSV


def _fmt(x) -> str:
    return FLOAT_FORMAT % float(x)


def write_rows(path, header: list[str], columns) -> None:
    cols = [np.asarray(c, dtype=float) for c in columns]
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in zip(*cols):
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e


def emit_csv(table, path) -> None:
    """Write a DistributionTable, EmpiricalCdf or PainleveSolution as CSV."""
    if isinstance(table, painleve.DistributionTable):
        write_rows(path, ["r", "value"], [table.r_values, table.cdf_values])
    elif isinstance(table, barrier.EmpiricalCdf):
        x = table.sorted_samples
        write_rows(path, ["x", "cdf"], [x, np.arange(1, len(x) + 1) / table.n])
    elif isinstance(table, painleve.PainleveSolution):
        if not table.complete:
            table = painleve.derived_quantities(table)
        cols = [table.grid, table.u, table.u_prime, table.v, table.y, table.E, table.F]
        write_rows(path, ["x", "u", "uprime", "v", "y", "E", "F"], cols)
    else:
        raise TypeError(f"cannot write {type(table).__name__} as CSV")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and a float array (rows x columns) from a file written by emit_csv."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    return header, data.reshape(len(rows) - 1, len(header))


def r_grid(rmin: float, rmax: float, step: float) -> np.ndarray:
    if step <= 0 or rmax < rmin:
        raise UsageError("need step > 0 and rmax >= rmin")
    n = int(math.floor((rmax - rmin) / step + 1e-9))
    return rmin + step * np.arange(n + 1)


# ---------------------------------------------------------------------------
# verbs


def cmd_dist(a) -> int:
    methods = DISTRIBUTIONS[a.name]
    method = a.method or DEFAULT_METHOD.get(a.name, "scattering")
    if method not in methods:
        raise UsageError(f"--name {a.name} supports --method {', '.join(methods)}")
    need = {"crossover": ["alpha"], "sqrt": ["alpha", "b1", "b2"], "parbl": ["beta1", "beta2"]}.get(a.name, [])
    missing = [k for k in need if getattr(a, k) is None]
    if missing:
        raise UsageError(f"--name {a.name} needs " + ", ".join("--" + k for k in missing))
    fn = methods[method]
    r = r_grid(a.rmin, a.rmax, a.step)
    table = painleve.tabulate(lambda v: fn(float(v), a), r, method, a.name)
    _write_or_print(table, a.out)
    return 0


def cmd_painleve(a) -> int:
    sol = painleve.derived_quantities(painleve.solve_hastings_mcleod(a.xmin, a.xmax, a.n))
    _write_or_print(sol, a.out)
    return 0


SUITES = {
    "identities": lambda: suite_report("identities", scattering.identity_suite()),
    "painleve": lambda: suite_report("painleve", painleve.verification_checks()),
    "airydist": lambda: suite_report("airydist", airydist.route_checks()),
    "barrier": lambda: suite_report("barrier", barrier.oracle_checks()),
}


def cmd_verify(a) -> int:
    if a.suite == "all":
        report = merge_reports("all", [SUITES[k]() for k in SUITES])
    else:
        report = SUITES[a.suite]()
    print(dumps_report(report))
    return 0 if report["pass"] else 1


BRANCHES = {
    "const": lambda lv, p: barrier.Constant(lv),
    "linear": lambda lv, p: barrier.Linear(lv, p),
    "sqrt": lambda lv, p: barrier.Sqrt(lv, p),
    "parbl": lambda lv, p: barrier.Parabola(lv, p),
}


def cmd_hit(a) -> int:
    if a.kind != "const" and a.param is None:
        raise UsageError(f"--kind {a.kind} needs --param")
    if a.y >= a.level:
        raise UsageError("--y must lie below --level")
    branch = BRANCHES[a.kind](a.level, a.param)
    t = r_grid(a.tmin, a.tmax, a.step)
    if a.method == "mc":
        s = barrier.mc_first_passage(branch, a.y, horizon=a.tmax, n_paths=a.paths, seed=a.seed)
        values = s.cdf(t)
    else:
        values = scattering.passage_cdf(branch, np.array([a.y]), t)[0]
    write_rows(a.out, ["t", "cdf"], [t, values]) if a.out else _print_rows(["t", "cdf"], [t, values])
    return 0


def _fit(a):
    n_list = a.fit_N or [max(a.N // 4, 2), max(a.N // 2, 3), a.N]
    return lpp.estimate_scaling(a.q, n_list, a.fit_samples, seed=a.seed + 1)


def _fit_dict(fit):
    return {"c1": fit.c1, "c2": fit.c2, "r2": fit.r2, "N_list": list(fit.N_list)}


def cmd_lpp(a) -> int:
    config = lpp.LppConfig(a.q, a.alpha_minus, a.alpha_plus, a.N, a.samples, a.seed)
    fit = _fit(a)
    ecdf, ks = lpp.empirical_rescaled_cdf(config, fit)
    if a.out:
        emit_csv(ecdf, a.out)
    report = {
        "config": {"q": a.q, "alpha_minus": a.alpha_minus, "alpha_plus": a.alpha_plus, "N": a.N, "samples": a.samples, "seed": a.seed},
        "fit": _fit_dict(fit),
        "target": config.target,
        "ks": ks,
        "tolerance": a.tol,
        "pass": ks <= a.tol,
    }
    print(json.dumps(report, indent=2))
    return 0 if report["pass"] else 1


def cmd_lpp_dominance(a) -> int:
    if a.seed2 is not None and a.seed2 == a.seed:
        raise UsageError("--seed2 must differ from --seed")
    report = lpp.dominance_experiment(a.q, a.N, a.samples, a.seed, a.seed2)
    print(json.dumps(report, indent=2))
    return 0 if report["pass"] else 1


def cmd_lpp_profile(a) -> int:
    prof = lpp.Profile(a.a, a.kappa, a.sign)
    config = lpp.LppConfig(a.q, 0.0, 0.0, a.N, a.samples, a.seed, prof)
    fit = _fit(a)
    ecdf = lpp.profile_lpp(config, fit)
    if a.out:
        emit_csv(ecdf, a.out)
    flat_ks, loc, scale = lpp.affine_ks(ecdf, lpp.goe_flat_cdf)
    report = {
        "config": {"q": a.q, "N": a.N, "samples": a.samples, "seed": a.seed, "a": a.a, "kappa": a.kappa, "sign": a.sign},
        "fit": _fit_dict(fit),
        "median": float(np.median(ecdf.sorted_samples)),
        "ks_gue": ecdf.ks_distance(lpp.TARGETS["gue"]),
        "affine_ks_flat": {"ks": flat_ks, "loc": loc, "scale": scale},
    }
    print(json.dumps(report, indent=2))
    return 0


def _print_rows(header, columns):
    sys.stdout.write(",".join(header) + "\n")
    for row in zip(*[np.asarray(c, dtype=float) for c in columns]):
        sys.stdout.write(",".join(_fmt(v) for v in row) + "\n")


def _write_or_print(table, out):
    if out:
        emit_csv(table, out)
    elif isinstance(table, painleve.DistributionTable):
        _print_rows(["r", "value"], [table.r_values, table.cdf_values])
    else:
        _print_rows(["x", "u", "uprime", "v", "y", "E", "F"], [table.grid, table.u, table.u_prime, table.v, table.y, table.E, table.F])


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kpzlab", description="KPZ fixed-point distributions and desk-scale experiments.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    d = sub.add_parser("dist", help="tabulate a CDF on an r grid")
    d.add_argument("--name", required=True, choices=sorted(DISTRIBUTIONS))
    d.add_argument("--method", choices=["painleve", "fredholm", "scattering"])
    d.add_argument("--rmin", type=float, default=-6.0)
    d.add_argument("--rmax", type=float, default=4.0)
    d.add_argument("--step", type=float, default=0.5)
    for k in ("alpha", "b1", "b2", "beta1", "beta2"):
        d.add_argument("--" + k, type=float)
    d.add_argument("--out", type=Path)
    d.set_defaults(func=cmd_dist)

    s = sub.add_parser("painleve", help="Hastings-McLeod solution and derived columns")
    s.add_argument("--xmin", type=float, default=painleve.X_MIN)
    s.add_argument("--xmax", type=float, default=painleve.X_MAX)
    s.add_argument("--n", type=int, default=painleve.N_GRID)
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_painleve)

    v = sub.add_parser("verify", help="run a verification suite, JSON report on stdout")
    v.add_argument("--suite", required=True, choices=[*SUITES, "all"])
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("hit", help="first-passage CDF of a one-sided barrier")
    h.add_argument("--kind", required=True, choices=sorted(BRANCHES))
    h.add_argument("--level", type=float, default=0.0)
    h.add_argument("--param", type=float)
    h.add_argument("--y", type=float, default=-1.0)
    h.add_argument("--tmin", type=float, default=0.0)
    h.add_argument("--tmax", type=float, default=5.0)
    h.add_argument("--step", type=float, default=0.1)
    h.add_argument("--method", choices=["exact", "mc"], default="exact")
    h.add_argument("--paths", type=int, default=100_000)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--out", type=Path)
    h.set_defaults(func=cmd_hit)

    def lpp_common(q):
        q.add_argument("--q", type=float, default=0.5)
        q.add_argument("--N", type=int, default=200)
        q.add_argument("--samples", type=int, default=2000)
        q.add_argument("--seed", type=int, default=0)

    def fit_flags(q):
        q.add_argument("--fit-N", type=int, nargs="+", dest="fit_N")
        q.add_argument("--fit-samples", type=int, default=8000, dest="fit_samples")

    l = sub.add_parser("lpp", help="rescaled LPP samples and KS distance to the limit law")
    lpp_common(l)
    fit_flags(l)
    l.add_argument("--alpha-minus", type=float, default=0.0, dest="alpha_minus")
    l.add_argument("--alpha-plus", type=float, default=0.0, dest="alpha_plus")
    l.add_argument("--tol", type=float, default=0.08)
    l.add_argument("--out", type=Path)
    l.set_defaults(func=cmd_lpp)

    m = sub.add_parser("lpp-dominance", help="finite-N dominance experiment")
    lpp_common(m)
    m.add_argument("--seed2", type=int)
    m.set_defaults(func=cmd_lpp_dominance, N=100)

    f = sub.add_parser("lpp-profile", help="point-to-curve LPP with a start-point penalty")
    lpp_common(f)
    fit_flags(f)
    f.add_argument("--a", type=float, required=True)
    f.add_argument("--kappa", type=float, required=True)
    f.add_argument("--sign", type=float, default=1.0)
    f.add_argument("--out", type=Path)
    f.set_defaults(func=cmd_lpp_profile, N=100, samples=1000)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        sys.stderr.write(parser.format_usage())
        sys.stderr.write(f"error: {e}\n")
        return 2
    except ValueError as e:
        # domain errors from the library on user-supplied values
        sys.stderr.write(f"error: {e}\n")
        return 2


def main() -> None:
    sys.exit(run())
