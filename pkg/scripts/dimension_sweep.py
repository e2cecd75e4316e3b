"""Covering-exponent estimates against gamma/(1+b) for geometric rates.

Sweeps the start level k and horizon N, writing one CSV row per (b, k, N).

    python3 scripts/dimension_sweep.py [--out dimension_sweep.csv] [--plot sweep.svg]
"""

import argparse
import csv
import sys
from fractions import Fraction

from recurfrac.asymptotics import Geometric, dim_formula
from recurfrac.experiments import covering_curve, covering_exponent, write_curve_svg
from recurfrac.ifs import MIDDLE_THIRD, load_config


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--b", default="1/2,1,2", help="comma-separated exponents")
    ap.add_argument("--k", default="1,10,30,60,120")
    ap.add_argument("--N", default="60,120,480")
    ap.add_argument("--out", help="CSV path (default: stdout)")
    ap.add_argument("--plot", help="SVG of the log cover sum for b=1, k=10, N=60")
    args = ap.parse_args()
    config = load_config(args.config) if args.config else MIDDLE_THIRD
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["b", "k", "N", "estimate", "formula", "gap"])
    for b in (Fraction(t) for t in args.b.split(",")):
        target = dim_formula(config, b)
        for k in map(int, args.k.split(",")):
            for N in map(int, args.N.split(",")):
                if N < k:
                    continue
                s = covering_exponent(config, Geometric(b), k, N)
                w.writerow([b, k, N, f"{s:.6f}", f"{target:.6f}", f"{s - target:.6f}"])
    if args.out:
        fh.close()
    if args.plot:
        phi = Geometric(1)
        write_curve_svg(args.plot, covering_curve(config, phi, 10, 60), covering_exponent(config, phi, 10, 60),
                        dim_formula(config, 1), "b=1, k=10, N=60")


if __name__ == "__main__":
    main()
