"""Trend of the pairwise-intersection ratio and the Paley-Zygmund bound in N.

For each ball, prints N, ratio, pz_lower, exact mu of the union and whether
the bound holds.

    python3 scripts/quasi_independence_trend.py [--N 12] [--words "1;2,1;1,2,1"]
"""

import argparse

from recurfrac.asymptotics import Clamped, parse_rate
from recurfrac.ifs import MIDDLE_THIRD, UNIT, cylinder_interval, load_config
from recurfrac.recurrence import quasi_independence


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--phi", default="power:1,gamma")
    ap.add_argument("--N", type=int, default=12)
    ap.add_argument("--words", default="1;2,1", help="semicolon-separated cylinder words; [0,1] is always included")
    args = ap.parse_args()
    config = load_config(args.config) if args.config else MIDDLE_THIRD
    phi = Clamped(parse_rate(args.phi))
    balls = [("[0,1]", UNIT)]
    for text in filter(None, args.words.split(";")):
        word = tuple(int(t) for t in text.split(","))
        balls.append((f"I({text})", cylinder_interval(config, word)))
    print("ball,N,ratio,pz_lower,mu_union,pz_consistent")
    for name, ball in balls:
        for N in range(1, args.N + 1):
            r = quasi_independence(config, ball, phi, N)
            print(f"{name},{N},{r.ratio:.6f},{r.pz_lower:.6f},{float(r.union.value):.6f},{r.pz_consistent}")


if __name__ == "__main__":
    main()
