"""Command-line front door: ``recurfrac <subcommand> [flags]``.

Exit codes: 0 ok, 1 verification failure, 2 usage or configuration error.
Without ``--out`` the artifact goes to stdout; with it, to ``<out>/<subcommand>.<format>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .asymptotics import (
    Clamped,
    b_exponent,
    dim_formula,
    jarnik_classify,
    khintchine_classify,
    parse_dimension,
    parse_rate,
)
from .coding import coding_from_json, recurrence_distance
from .errors import RecurFracError
from .experiments import (
    covering_curve,
    covering_exponent,
    dumps,
    liminf_statistic,
    provenance,
    recurrent_fraction,
    sample_point,
    write_curve_svg,
)
from .gexpr import parse as parse_gexpr
from .ifs import MIDDLE_THIRD, IFSConfig, Interval, as_fraction, cylinder_interval, load_config
from .measure import ahlfors_scan
from .recurrence import level_table, quasi_independence, rows_to_csv
from .verify import run_all


class UsageError(Exception):
    pass


def _csv(header: list[str], rows) -> str:
    return "\n".join([",".join(header)] + [",".join(str(v) for v in r) for r in rows]) + "\n"


def _rate(args, config: IFSConfig):
    phi = parse_rate(args.phi)
    return Clamped(phi) if getattr(args, "clamp", False) else phi


# -- subcommands: each returns (exit code, json doc, csv text) ------------------------------


def cmd_verify(args, config):
    report = run_all(config)
    report["provenance"] = provenance(config)
    rows = [(c["name"], c["ok"], c["cases"]) for c in report["checks"]]
    return (0 if report["ok"] else 1), report, _csv(["check", "ok", "cases"], rows)


def cmd_orbit(args, config):
    if args.point:
        p = coding_from_json(config, json.loads(args.point))
    else:
        p = sample_point(config, args.seed, args.depth)
    if not p.is_exact and args.N >= p.depth:
        raise UsageError(f"--N must be below the orbit depth {p.depth}")
    rows = []
    for n in range(1, args.N + 1):
        d = recurrence_distance(config, p, n)
        rows.append((n, float(d.lo), float(d.hi)))
    doc = {"point": p.to_json(), "rows": [{"n": n, "lo": lo, "hi": hi} for n, lo, hi in rows],
           "provenance": provenance(config, None if p.is_exact else args.seed, N=args.N)}
    return 0, doc, _csv(["n", "dist_lo", "dist_hi"], ((n, repr(lo), repr(hi)) for n, lo, hi in rows))


def cmd_dichotomy(args, config):
    phi = _rate(args, config)
    verdict = khintchine_classify(config, phi)
    rows = level_table(config, phi, args.k, args.N)
    doc = {
        "phi": phi.to_json(),
        "verdict": verdict.to_json(),
        "rows": [{"n": r.n, "count": r.count, "mu_An": r.mu.to_json(), "cumulative": r.cumulative.to_json()} for r in rows],
        "provenance": provenance(config, args.seed if args.samples else None, k=args.k, N=args.N),
    }
    if args.samples:
        mc = recurrent_fraction(config, phi, args.N, args.k, args.samples, args.seed)
        doc["monte_carlo"] = mc.to_json()
    return 0, doc, rows_to_csv(rows)


def cmd_jarnik(args, config):
    f = parse_dimension(args.f)
    phi = _rate(args, config)
    verdict = jarnik_classify(config, f, phi)
    doc = {"f": f.to_json(), "phi": phi.to_json(), "verdict": verdict.to_json(), "provenance": provenance(config)}
    return 0, doc, _csv(["outcome", "basis", "hf_of_K"], [(verdict.outcome, verdict.basis, verdict.hf_of_K)])


def cmd_dimension(args, config):
    phi = _rate(args, config)
    s = covering_exponent(config, phi, args.k, args.N)
    b = b_exponent(config, phi, args.horizon)
    formula = dim_formula(config, b.value)
    curve = covering_curve(config, phi, args.k, args.N)
    if args.plot:
        write_curve_svg(args.plot, curve, root=s, formula=formula, title=f"k={args.k}, N={args.N}")
    doc = {"phi": phi.to_json(), "estimate": s, "b": b.to_json(), "formula": formula, "gap": abs(s - formula),
           "provenance": provenance(config, k=args.k, N=args.N)}
    return 0, doc, _csv(["s", "log_sum"], ((repr(x), repr(y)) for x, y in curve))


def _ball(args, config) -> Interval:
    if args.word:
        return cylinder_interval(config, [int(t) for t in args.word.split(",")])
    lo, hi = (as_fraction(t.strip()) for t in args.ball.split(","))
    return Interval(lo, hi)


def cmd_quasi_indep(args, config):
    phi = _rate(args, config)
    ball = _ball(args, config)
    rows = []
    for N in range(1, args.N + 1):
        rep = quasi_independence(config, ball, phi, N)
        rows.append((N, repr(rep.ratio), repr(rep.pz_lower), repr(float(rep.union.value)), rep.pz_consistent))
    doc = {"phi": phi.to_json(), "report": rep.to_json(), "provenance": provenance(config, N=args.N)}
    return 0, doc, _csv(["N", "ratio", "pz_lower", "mu_union", "pz_consistent"], rows)


def cmd_liminf(args, config):
    alpha = parse_gexpr(args.alpha)
    res = liminf_statistic(config, alpha, args.N, args.samples, args.seed)
    return 0, res.to_json(), res.to_csv()


def cmd_ahlfors(args, config):
    rep = ahlfors_scan(config, args.samples, args.r_min, args.r_max, args.seed)
    doc = json.loads(rep.to_json())
    doc["provenance"] = provenance(config, args.seed, samples=args.samples)
    return (0 if rep.ok else 1), doc, rep.to_csv()


# -- parser ------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="IFS config JSON (default: middle-third Cantor set)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized runs")
    common.add_argument("--out", help="directory for artifacts (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--plot", help="SVG path for subcommands that draw a curve")

    p = argparse.ArgumentParser(prog="recurfrac", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"recurfrac {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    add("verify", cmd_verify, "run the invariant suite")

    sp = add("orbit", cmd_orbit, "distances |T^n x - x| along one orbit")
    sp.add_argument("--point", help='coding JSON, e.g. {"preperiod": [1], "period": [2, 1]}')
    sp.add_argument("--depth", type=int, default=128, help="digits for a sampled point")
    sp.add_argument("--N", type=int, default=20)

    def rate_flags(sp, default="clamped:power:1,gamma"):
        sp.add_argument("--phi", default=default, help="rate, e.g. geometric:1 or clamped:power:1,gamma")
        sp.add_argument("--clamp", action="store_true", help="use min(phi, (1-rho)/4)")

    sp = add("dichotomy", cmd_dichotomy, "exact mu(A_n), cumulative unions and the measure verdict")
    rate_flags(sp)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--N", type=int, default=12)
    sp.add_argument("--samples", type=int, default=0, help="also run the Monte Carlo fraction")

    sp = add("jarnik", cmd_jarnik, "Hausdorff f-measure verdict")
    rate_flags(sp, "geometric:1")
    sp.add_argument("--f", default="power:gamma/2", help="dimension function, e.g. power:gamma/2")

    sp = add("dimension", cmd_dimension, "covering exponent versus the dimension formula")
    rate_flags(sp, "geometric:1")
    sp.add_argument("--k", type=int, default=10)
    sp.add_argument("--N", type=int, default=60)
    sp.add_argument("--horizon", type=int, default=None, help="horizon for tabulated rates")

    sp = add("quasi-indep", cmd_quasi_indep, "pairwise-intersection ratio and Paley-Zygmund bound")
    rate_flags(sp)
    sp.add_argument("--N", type=int, default=8)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--ball", default="0,1", help="interval lo,hi")
    g.add_argument("--word", help="use the cylinder of this word, e.g. 2,1")

    sp = add("liminf", cmd_liminf, "min_{n<=N} n^(1/alpha) |T^n x - x| over mu-samples")
    sp.add_argument("--alpha", default="gamma")
    sp.add_argument("--N", type=int, default=100)
    sp.add_argument("--samples", type=int, default=1000)

    sp = add("ahlfors", cmd_ahlfors, "sampled mu(B(x, r)) / r^gamma against the regularity constants")
    sp.add_argument("--samples", type=int, default=500)
    sp.add_argument("--r-min", type=float, default=1e-6)
    sp.add_argument("--r-max", type=float, default=0.25)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else MIDDLE_THIRD
        code, doc, csv_text = args.fn(args, config)
    except (RecurFracError, UsageError, ValueError, KeyError, OSError) as exc:
        print(f"recurfrac: error: {exc}", file=sys.stderr)
        return 2
    text = dumps(doc) if args.format == "json" else csv_text
    if code == 1 and args.format == "csv":
        # failures are always reported as JSON
        text = dumps(doc)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.{args.format}").write_text(text)
        if args.format == "csv":
            (out / f"{args.command}.json").write_text(dumps(doc))
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
